#include "tapo/parse.hpp"

#include <array>
#include <cctype>
#include <vector>

#include "tapo/error.hpp"

namespace tapo {

namespace {

constexpr std::array kKeywords = {
    "abox",      "accept",     "add",   "and",      "bot",         "cert",     "certs",
    "compose",   "concepts",   "consult", "context", "contexts",   "default",  "defer",
    "del",       "do",         "drop",  "else",     "exists",      "false",    "for",
    "forall",    "frame",      "hesitation", "if",  "import",      "individuals", "level",
    "levels",    "map",        "not",   "obox",     "or",          "order",    "pbox",
    "policy",    "program",    "query", "reject",   "response",    "restriction", "roles",
    "signature", "skip",       "sub",   "tbox",     "then",        "threshold", "top",
    "true",      "trust",      "while",
};

enum class Tok : std::uint8_t { Ident, String, Symbol, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.line = line_;
      t.column = col_;
      if (pos_ >= src_.size()) {
        out.push_back(t);
        return out;
      }
      char c = src_[pos_];
      if (ident_start(c)) {
        t.kind = Tok::Ident;
        t.text = word();
        // Indexed names like Orders(c1): glued, no whitespace, non-keyword base.
        if (!is_keyword(t.text) && peek() == '(' && pos_ + 1 < src_.size() &&
            ident_start(src_[pos_ + 1])) {
          std::size_t save = pos_, save_col = col_;
          advance();
          std::string inner = word();
          if (peek() == ')' && !is_keyword(inner)) {
            advance();
            t.text += "(" + inner + ")";
          } else {
            pos_ = save;
            col_ = save_col;
          }
        }
      } else if (c == '"') {
        t.kind = Tok::String;
        advance();
        while (pos_ < src_.size() && src_[pos_] != '"') {
          if (src_[pos_] == '\n') throw SyntaxError("unterminated string", t.line, t.column);
          if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) advance();
          t.text += src_[pos_];
          advance();
        }
        if (pos_ >= src_.size()) throw SyntaxError("unterminated string", t.line, t.column);
        advance();
      } else {
        t.kind = Tok::Symbol;
        static constexpr std::array two = {"->", "<=", ">=", "=>"};
        for (const char* s : two) {
          if (src_.substr(pos_, 2) == s) t.text = s;
        }
        if (t.text.empty()) {
          if (std::string_view("{}()[],:@.;<=>+").find(c) == std::string_view::npos) {
            throw SyntaxError(std::string("unexpected character '") + c + "'", line_, col_);
          }
          t.text = std::string(1, c);
        }
        for (std::size_t i = 0; i < t.text.size(); ++i) advance();
      }
      out.push_back(std::move(t));
    }
  }

 private:
  char peek() const { return pos_ < src_.size() ? src_[pos_] : '\0'; }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  std::string word() {
    std::string w;
    while (pos_ < src_.size() && ident_char(src_[pos_])) {
      w += src_[pos_];
      advance();
    }
    return w;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

class Parser {
 public:
  Parser(std::string_view text, const Signature* sig) : toks_(Lexer(text).run()), sig_(sig) {}

  // Expression grammars.

  Concept concept_expr() {
    Concept c = conj_concept();
    while (accept("or")) c = Concept::disj(c, conj_concept());
    return c;
  }

  Assertion assertion() {
    if (at("(")) {
      expect("(");
      Name a = individual();
      expect(",");
      Name b = individual();
      expect(")");
      expect(":");
      Name r = role();
      expect("@");
      return Assertion::related(a, b, r, context());
    }
    Name a = individual();
    expect(":");
    Concept c = concept_expr();
    expect("@");
    return Assertion::member(a, c, context());
  }

  TBoxAxiom axiom() {
    Concept lhs = concept_expr();
    expect("sub");
    return TBoxAxiom{lhs, concept_expr()};
  }

  GuardExpr guard() {
    GuardExpr g = conj_guard();
    while (accept("or")) g = GuardExpr::disj(g, conj_guard());
    return g;
  }

  Program program() {
    Program first = statement();
    if (accept(";")) {
      if (at("}") || done()) return first;
      return Program::seq(first, program());
    }
    return first;
  }

  bool done() const { return cur().kind == Tok::End; }

  void finish() {
    if (!done()) fail("unexpected '" + cur().text + "'");
  }

  KnowledgeBase kb() {
    KnowledgeBase out;
    sig_ = &out.signature;
    kb_ = &out;
    while (!done()) {
      if (accept("signature")) signature(out.signature);
      else if (accept("context")) context_edges(out.signature);
      else if (accept("tbox")) tbox_section();
      else if (accept("abox")) abox_section();
      else if (accept("pbox")) pbox_section();
      else if (accept("obox")) obox_section();
      else if (accept("restriction")) restriction_section();
      else fail("expected a section keyword, found '" + cur().text + "'");
    }
    return finalize(std::move(out));
  }

 private:
  const Token& cur() const { return toks_[pos_]; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw SyntaxError(msg, cur().line, cur().column);
  }

  bool at(std::string_view s) const {
    return (cur().kind == Tok::Symbol || cur().kind == Tok::Ident) && cur().text == s;
  }

  bool accept(std::string_view s) {
    if (!at(s)) return false;
    ++pos_;
    return true;
  }

  void expect(std::string_view s) {
    if (!accept(s)) {
      fail("expected '" + std::string(s) + "', found '" + (done() ? "end of input" : cur().text) + "'");
    }
  }

  bool at_name() const { return cur().kind == Tok::Ident && !is_keyword(cur().text); }

  Name name(const char* what) {
    if (!at_name()) {
      fail(std::string("expected ") + what + ", found '" + (done() ? "end of input" : cur().text) + "'");
    }
    return toks_[pos_++].text;
  }

  std::string string_lit() {
    if (cur().kind != Tok::String) fail("expected a string literal");
    return toks_[pos_++].text;
  }

  template <class Pred>
  Name checked(const char* kind, Pred has) {
    Name n = name(kind);
    if (sig_ && !has(n)) throw UnknownNameError(kind, n);
    return n;
  }

  Name individual() {
    return checked("individual", [&](const Name& n) { return sig_->has_individual(n); });
  }
  Name role() {
    return checked("role", [&](const Name& n) { return sig_->has_role(n); });
  }
  Name context() {
    return checked("context", [&](const Name& n) { return sig_->has_context(n); });
  }

  Concept conj_concept() {
    Concept c = unary_concept();
    while (accept("and")) c = Concept::conj(c, unary_concept());
    return c;
  }

  Concept unary_concept() {
    if (accept("top")) return Concept::top();
    if (accept("bot")) return Concept::bottom();
    if (accept("not")) return Concept::negation(unary_concept());
    if (at("exists") || at("forall")) {
      bool ex = accept("exists");
      if (!ex) expect("forall");
      Name r = role();
      expect(".");
      Concept body = unary_concept();
      return ex ? Concept::exists(r, body) : Concept::forall(r, body);
    }
    if (accept("(")) {
      Concept c = concept_expr();
      expect(")");
      return c;
    }
    return Concept::atom(checked("concept", [&](const Name& n) { return sig_->has_concept(n); }));
  }

  GuardExpr conj_guard() {
    GuardExpr g = unary_guard();
    while (accept("and")) g = GuardExpr::conj(g, unary_guard());
    return g;
  }

  bool role_assertion_ahead() const {
    return at("(") && pos_ + 2 < toks_.size() && toks_[pos_ + 1].kind == Tok::Ident &&
           toks_[pos_ + 2].text == ",";
  }

  GuardExpr unary_guard() {
    if (accept("true")) return GuardExpr::truth();
    if (accept("false")) return GuardExpr::falsity();
    if (accept("not")) return GuardExpr::negation(unary_guard());
    if (accept("[")) {
      Concept c = concept_expr();
      expect("sub");
      Concept d = concept_expr();
      expect("]");
      return GuardExpr::atom(GuardAtom::subsumption(c, d));
    }
    if (at("(") && !role_assertion_ahead()) {
      expect("(");
      GuardExpr g = guard();
      expect(")");
      return g;
    }
    return GuardExpr::atom(assertion());
  }

  Program statement() {
    if (accept("skip")) return Program::skip();
    if (accept("add")) return Program::add(assertion());
    if (accept("del")) return Program::del(assertion());
    if (accept("consult")) return Program::consult(name("query identifier"));
    if (accept("if")) {
      GuardExpr g = guard();
      expect("then");
      Program t = block();
      Program e = Program::skip();
      if (accept("else")) e = block();
      return Program::branch(g, t, e);
    }
    if (accept("while")) {
      GuardExpr g = guard();
      expect("do");
      return Program::loop(g, block());
    }
    if (at("{")) return block();
    fail("expected a program statement, found '" + (done() ? std::string("end of input") : cur().text) + "'");
  }

  Program block() {
    expect("{");
    if (accept("}")) return Program::skip();
    Program p = program();
    expect("}");
    return p;
  }

  // KB sections.

  void declare(std::set<Name>& into, const Name& n, const char* kind) {
    if (!into.insert(n).second) throw ConfigError(std::string("duplicate ") + kind + " '" + n + "'");
  }

  void signature(Signature& sig) {
    expect("{");
    while (!accept("}")) {
      if (accept("concepts")) {
        while (at_name()) declare(sig.concept_names, name("concept"), "concept");
      } else if (accept("roles")) {
        while (at_name()) declare(sig.role_names, name("role"), "role");
      } else if (accept("individuals")) {
        while (at_name()) declare(sig.individual_names, name("individual"), "individual");
      } else if (accept("contexts")) {
        while (at_name()) {
          Name c = name("context");
          if (sig.has_context(c)) throw ConfigError("duplicate context '" + c + "'");
          sig.contexts.add_context(c);
        }
      } else {
        fail("expected concepts, roles, individuals or contexts");
      }
    }
  }

  Name known_context() {
    Name c = name("context");
    if (!sig_->has_context(c)) throw ContextError("undeclared context '" + c + "'");
    return c;
  }

  void context_edges(Signature& sig) {
    expect("{");
    while (!accept("}")) {
      Name finer = known_context();
      expect("<=");
      Name coarser = known_context();
      if (sig.contexts.refinements().count({finer, coarser})) {
        throw ConfigError("duplicate refinement " + finer + " <= " + coarser);
      }
      sig.contexts.add_refinement(finer, coarser);
    }
  }

  void tbox_section() {
    expect("{");
    while (!accept("}")) tbox_.push_back(axiom());
  }

  void abox_section() {
    expect("{");
    while (!accept("}")) {
      Assertion a = assertion();
      if (!abox_.insert(a).second) throw ConfigError("duplicate assertion '" + to_string(a) + "'");
    }
  }

  void pbox_section() {
    Name ctx = known_context();
    expect("{");
    while (!accept("}")) {
      expect("program");
      Name n = name("program name");
      if (pbox_[ctx].count(n)) throw ConfigError("duplicate program '" + n + "' at " + ctx);
      expect("{");
      Program p = at("}") ? Program::skip() : program();
      expect("}");
      pbox_[ctx].emplace(n, p);
    }
  }

  Verdict verdict() {
    if (accept("accept")) return Verdict::Accept;
    if (accept("reject")) return Verdict::Reject;
    if (accept("defer")) return Verdict::Defer;
    fail("expected accept, reject or defer");
  }

  void policy(ValidationPolicy& pol) {
    expect("{");
    bool has_default = false;
    while (!accept("}")) {
      if (accept("default")) {
        if (has_default) throw ConfigError("policy declares two defaults");
        pol.fallback = verdict();
        has_default = true;
        continue;
      }
      if (has_default) fail("policy rules must precede the default");
      PolicyRule rule;
      rule.verdict = verdict();
      if (accept("if")) {
        do {
          if (accept("trust")) {
            expect(">=");
            rule.trust_floor = name("trust level");
          } else if (accept("certs")) {
            expect("{");
            while (at_name()) rule.required_kinds.insert(name("certificate kind"));
            expect("}");
          } else {
            fail("expected 'trust' or 'certs'");
          }
        } while (accept("and"));
      }
      pol.rules.push_back(std::move(rule));
    }
    if (!has_default) throw ConfigError("policy has no default verdict");
  }

  Response response_body(Name id) {
    Response r;
    r.id = std::move(id);
    expect("trust");
    r.trust = name("trust level");
    expect("{");
    while (!accept("}")) {
      if (accept("import")) {
        r.payload.insert(assertion());
      } else if (accept("cert")) {
        Certificate c;
        c.id = name("certificate id");
        c.kind = name("certificate kind");
        while (at_name() && pos_ + 1 < toks_.size() && toks_[pos_ + 1].text == "=") {
          Name key = name("attribute");
          expect("=");
          c.attributes[key] = string_lit();
        }
        r.certificates.push_back(std::move(c));
      } else {
        fail("expected 'import' or 'cert'");
      }
    }
    return r;
  }

  OracleFrame frame(const Name& ctx) {
    OracleFrame f;
    f.name = name("frame name");
    f.context = ctx;
    bool has_threshold = false;
    std::set<Name> response_ids;
    expect("{");
    while (!accept("}")) {
      if (accept("levels")) {
        while (at_name()) declare(f.trust.levels, name("trust level"), "trust level");
      } else if (accept("order")) {
        Name lo = name("trust level");
        expect("<");
        do {
          Name hi = name("trust level");
          f.trust.order.insert({lo, hi});
          lo = hi;
        } while (accept("<"));
      } else if (accept("threshold")) {
        if (has_threshold) throw ConfigError("frame '" + f.name + "' declares two thresholds");
        f.trust.threshold = name("trust level");
        has_threshold = true;
      } else if (accept("query")) {
        Name q = name("query identifier");
        if (f.queries.count(q)) throw ConfigError("duplicate query '" + q + "'");
        f.queries[q] = at_string() ? string_lit() : q;
      } else if (accept("response")) {
        Name id = name("response id");
        if (!response_ids.insert(id).second) throw ConfigError("duplicate response '" + id + "'");
        expect("for");
        Name q = name("query identifier");
        if (!f.queries.count(q)) throw ConfigError("response '" + id + "' answers undeclared query '" + q + "'");
        if (f.answers.count(q)) throw ConfigError("query '" + q + "' is answered twice");
        f.answers[q] = response_body(id);
      } else if (accept("policy")) {
        policy(f.policy);
      } else if (accept("hesitation")) {
        Name q = name("query identifier");
        f.hesitation[q] = individual();
      } else {
        fail("unexpected '" + cur().text + "' in frame");
      }
    }
    if (!has_threshold) throw ConfigError("frame '" + f.name + "' has no threshold");
    return f;
  }

  bool at_string() const { return cur().kind == Tok::String; }

  void obox_section() {
    Name ctx = known_context();
    auto& frames = obox_[ctx];
    expect("{");
    while (!accept("}")) {
      if (accept("frame")) {
        OracleFrame f = frame(ctx);
        if (frames.count(f.name)) throw ConfigError("duplicate frame '" + f.name + "' at " + ctx);
        frames.emplace(f.name, std::move(f));
      } else if (accept("compose")) {
        Name n = name("frame name");
        expect("=");
        Name a = name("frame name");
        expect("+");
        Name b = name("frame name");
        if (!frames.count(a)) throw ConfigError("unknown frame '" + a + "' at " + ctx);
        if (!frames.count(b)) throw ConfigError("unknown frame '" + b + "' at " + ctx);
        if (frames.count(n)) throw ConfigError("duplicate frame '" + n + "' at " + ctx);
        OracleFrame f = compose_frames(frames.at(a), frames.at(b));
        f.name = n;
        frames.emplace(n, std::move(f));
      } else {
        fail("expected 'frame' or 'compose'");
      }
    }
  }

  void name_list(std::optional<std::set<Name>>& into, bool (Signature::*has)(const Name&) const,
                 const char* kind) {
    into.emplace();
    while (at_name()) {
      Name n = name(kind);
      if (!(sig_->*has)(n)) throw UnknownNameError(kind, n);
      into->insert(n);
    }
  }

  void restriction_section() {
    Restriction r;
    r.source = known_context();
    expect("->");
    r.target = known_context();
    if (!sig_->contexts.leq(r.target, r.source)) {
      throw ContextError("restriction " + r.source + " -> " + r.target + " does not follow a refinement");
    }
    for (const auto& other : kb_->restrictions) {
      if (other.source == r.source && other.target == r.target) {
        throw ConfigError("duplicate restriction " + r.source + " -> " + r.target);
      }
    }
    expect("{");
    while (!accept("}")) {
      if (accept("individuals")) {
        name_list(r.individuals, &Signature::has_individual, "individual");
      } else if (accept("concepts")) {
        name_list(r.concepts, &Signature::has_concept, "concept");
      } else if (accept("roles")) {
        name_list(r.roles, &Signature::has_role, "role");
      } else if (accept("map")) {
        Assertion from = assertion();
        expect("=>");
        Assertion to = assertion();
        if (from.context != r.source || to.context != r.target) {
          throw ContextError("map '" + to_string(from) + "' => '" + to_string(to) +
                             "' does not follow " + r.source + " -> " + r.target);
        }
        r.overrides[from] = to;
      } else if (accept("drop")) {
        Assertion from = assertion();
        if (from.context != r.source) throw ContextError("drop '" + to_string(from) + "' is not over " + r.source);
        r.overrides[from] = std::nullopt;
      } else if (accept("frame")) {
        Name src = name("frame name");
        expect("=>");
        FrameMap fm;
        fm.target_frame = name("frame name");
        expect("{");
        while (!accept("}")) {
          std::map<Name, Name>* into = nullptr;
          if (accept("query")) into = &fm.queries;
          else if (accept("level")) into = &fm.levels;
          else if (accept("response")) into = &fm.responses;
          else if (accept("cert")) into = &fm.certificates;
          else fail("expected query, level, response or cert");
          Name a = name("identifier");
          expect("=>");
          (*into)[a] = name("identifier");
        }
        r.frames[src] = std::move(fm);
      } else {
        fail("unexpected '" + cur().text + "' in restriction");
      }
    }
    kb_->restrictions.push_back(std::move(r));
  }

  KnowledgeBase finalize(KnowledgeBase out) {
    out.signature.validate();
    for (const auto& c : out.signature.contexts.elements()) {
      TapoObject x;
      x.state.context = c;
      x.state.tbox = tbox_;
      for (const auto& a : abox_) {
        if (a.context == c) x.state.abox.insert(a);
      }
      if (auto it = pbox_.find(c); it != pbox_.end()) x.pbox = it->second;
      if (auto it = obox_.find(c); it != obox_.end()) x.obox = it->second;
      x.validate();
      out.objects.push_back(std::move(x));
    }
    // Every declared edge carries a restriction; undeclared ones relabel
    // everything.
    for (const auto& [finer, coarser] : out.signature.contexts.refinements()) {
      if (!out.restriction(coarser, finer)) {
        Restriction r;
        r.source = coarser;
        r.target = finer;
        out.restrictions.push_back(std::move(r));
      }
    }
    for (const auto& r : out.restrictions) {
      for (const auto& [src, fm] : r.frames) {
        if (!out.object(r.source).obox.count(src)) {
          throw ConfigError("restriction " + r.source + " -> " + r.target + " maps unknown frame '" + src + "'");
        }
        if (!out.object(r.target).obox.count(fm.target_frame)) {
          throw ConfigError("restriction " + r.source + " -> " + r.target + " maps to unknown frame '" +
                            fm.target_frame + "'");
        }
      }
    }
    return out;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const Signature* sig_;
  KnowledgeBase* kb_ = nullptr;

  TBox tbox_;
  ABox abox_;
  std::map<Name, std::map<Name, Program>> pbox_;
  std::map<Name, std::map<Name, OracleFrame>> obox_;
};

template <class F>
auto parse_whole(std::string_view text, const Signature& sig, F f) {
  Parser p(text, &sig);
  auto v = f(p);
  p.finish();
  return v;
}

}  // namespace

bool is_keyword(std::string_view word) {
  for (const char* k : kKeywords) {
    if (word == k) return true;
  }
  return false;
}

Concept parse_concept(std::string_view text, const Signature& sig) {
  return parse_whole(text, sig, [](Parser& p) { return p.concept_expr(); });
}

Assertion parse_assertion(std::string_view text, const Signature& sig) {
  return parse_whole(text, sig, [](Parser& p) { return p.assertion(); });
}

TBoxAxiom parse_axiom(std::string_view text, const Signature& sig) {
  return parse_whole(text, sig, [](Parser& p) { return p.axiom(); });
}

GuardExpr parse_guard(std::string_view text, const Signature& sig) {
  return parse_whole(text, sig, [](Parser& p) { return p.guard(); });
}

Program parse_program(std::string_view text, const Signature& sig) {
  return parse_whole(text, sig, [](Parser& p) { return p.program(); });
}

KnowledgeBase parse_kb(std::string_view text) {
  Parser p(text, nullptr);
  return p.kb();
}

}  // namespace tapo
