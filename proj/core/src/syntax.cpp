#include "tapo/syntax.hpp"

#include <cctype>
#include <cstdio>
#include <deque>
#include <map>
#include <sstream>

#include "tapo/error.hpp"

namespace tapo {

namespace {

const std::shared_ptr<const Concept>& empty_operand() {
  static const auto top = std::make_shared<const Concept>();
  return top;
}

int precedence(const Concept& c) {
  switch (c.kind()) {
    case ConceptKind::Or: return 1;
    case ConceptKind::And: return 2;
    default: return 3;
  }
}

void print(const Concept& c, std::string& out) {
  auto operand = [&out](const Concept& sub, bool parens) {
    if (parens) out += '(';
    print(sub, out);
    if (parens) out += ')';
  };
  switch (c.kind()) {
    case ConceptKind::Top: out += "top"; return;
    case ConceptKind::Bottom: out += "bot"; return;
    case ConceptKind::Atom: out += c.name(); return;
    case ConceptKind::And:
    case ConceptKind::Or: {
      // Binary connectives associate to the left.
      int p = precedence(c);
      operand(c.lhs(), precedence(c.lhs()) < p);
      out += c.is(ConceptKind::And) ? " and " : " or ";
      operand(c.rhs(), precedence(c.rhs()) <= p);
      return;
    }
    case ConceptKind::Not:
      out += "not ";
      operand(c.body(), precedence(c.body()) < 3);
      return;
    case ConceptKind::Exists:
    case ConceptKind::Forall:
      out += c.is(ConceptKind::Exists) ? "exists " : "forall ";
      out += c.name();
      out += '.';
      operand(c.body(), precedence(c.body()) < 3);
      return;
  }
}

}  // namespace

Concept::Concept() : node_(std::make_shared<const Node>(Node{ConceptKind::Top, {}, {}})) {}

Concept Concept::top() {
  static const Concept t;
  return t;
}

Concept Concept::bottom() {
  static const Concept b(std::make_shared<const Node>(Node{ConceptKind::Bottom, {}, {}}));
  return b;
}

Concept Concept::atom(Name name) {
  return Concept(std::make_shared<const Node>(Node{ConceptKind::Atom, std::move(name), {}}));
}

Concept Concept::conj(Concept lhs, Concept rhs) {
  return Concept(std::make_shared<const Node>(
      Node{ConceptKind::And, {}, {std::move(lhs), std::move(rhs)}}));
}

Concept Concept::disj(Concept lhs, Concept rhs) {
  return Concept(std::make_shared<const Node>(
      Node{ConceptKind::Or, {}, {std::move(lhs), std::move(rhs)}}));
}

Concept Concept::negation(Concept body) {
  return Concept(std::make_shared<const Node>(Node{ConceptKind::Not, {}, {std::move(body)}}));
}

Concept Concept::exists(Name role, Concept body) {
  return Concept(std::make_shared<const Node>(
      Node{ConceptKind::Exists, std::move(role), {std::move(body)}}));
}

Concept Concept::forall(Name role, Concept body) {
  return Concept(std::make_shared<const Node>(
      Node{ConceptKind::Forall, std::move(role), {std::move(body)}}));
}

const Concept& Concept::lhs() const {
  return node_->args.empty() ? *empty_operand() : node_->args[0];
}

const Concept& Concept::rhs() const {
  return node_->args.size() < 2 ? *empty_operand() : node_->args[1];
}

const Concept& Concept::body() const { return lhs(); }

std::size_t Concept::size() const {
  std::size_t n = 1;
  for (const auto& a : node_->args) n += a.size();
  return n;
}

std::size_t Concept::depth() const {
  std::size_t d = 0;
  for (const auto& a : node_->args) d = std::max(d, a.depth());
  return d + 1;
}

bool operator==(const Concept& a, const Concept& b) {
  if (a.node_ == b.node_) return true;
  return a.node_->kind == b.node_->kind && a.node_->name == b.node_->name &&
         a.node_->args == b.node_->args;
}

std::strong_ordering operator<=>(const Concept& a, const Concept& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = a.node_->kind <=> b.node_->kind; c != 0) return c;
  if (auto c = a.node_->name <=> b.node_->name; c != 0) return c;
  const auto& x = a.node_->args;
  const auto& y = b.node_->args;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (auto c = x[i] <=> y[i]; c != 0) return c;
  }
  return x.size() <=> y.size();
}

std::string to_string(const Concept& c) {
  std::string out;
  print(c, out);
  return out;
}

void collect_subconcepts(const Concept& c, std::set<Concept>& out) {
  if (!out.insert(c).second) return;
  switch (c.kind()) {
    case ConceptKind::And:
    case ConceptKind::Or:
      collect_subconcepts(c.lhs(), out);
      collect_subconcepts(c.rhs(), out);
      break;
    case ConceptKind::Not:
    case ConceptKind::Exists:
    case ConceptKind::Forall:
      collect_subconcepts(c.body(), out);
      break;
    default:
      break;
  }
}

void collect_atoms(const Concept& c, std::set<Name>& out) {
  switch (c.kind()) {
    case ConceptKind::Atom: out.insert(c.name()); break;
    case ConceptKind::And:
    case ConceptKind::Or:
      collect_atoms(c.lhs(), out);
      collect_atoms(c.rhs(), out);
      break;
    case ConceptKind::Not:
    case ConceptKind::Exists:
    case ConceptKind::Forall:
      collect_atoms(c.body(), out);
      break;
    default: break;
  }
}

void collect_roles(const Concept& c, std::set<Name>& out) {
  switch (c.kind()) {
    case ConceptKind::And:
    case ConceptKind::Or:
      collect_roles(c.lhs(), out);
      collect_roles(c.rhs(), out);
      break;
    case ConceptKind::Exists:
    case ConceptKind::Forall:
      out.insert(c.name());
      [[fallthrough]];
    case ConceptKind::Not:
      collect_roles(c.body(), out);
      break;
    default: break;
  }
}

Assertion Assertion::member(Name individual, Concept term, Name context) {
  Assertion a;
  a.kind = Kind::Concept;
  a.individual = std::move(individual);
  a.term = std::move(term);
  a.context = std::move(context);
  return a;
}

Assertion Assertion::related(Name individual, Name other, Name role, Name context) {
  Assertion a;
  a.kind = Kind::Role;
  a.individual = std::move(individual);
  a.other = std::move(other);
  a.role = std::move(role);
  a.context = std::move(context);
  return a;
}

Assertion Assertion::at(Name ctx) const {
  Assertion a = *this;
  a.context = std::move(ctx);
  return a;
}

bool operator==(const Assertion& a, const Assertion& b) {
  return a.kind == b.kind && a.individual == b.individual && a.other == b.other &&
         a.role == b.role && a.context == b.context && a.term == b.term;
}

std::strong_ordering operator<=>(const Assertion& a, const Assertion& b) {
  if (auto c = a.context <=> b.context; c != 0) return c;
  if (auto c = a.kind <=> b.kind; c != 0) return c;
  if (auto c = a.individual <=> b.individual; c != 0) return c;
  if (auto c = a.other <=> b.other; c != 0) return c;
  if (auto c = a.role <=> b.role; c != 0) return c;
  return a.term <=> b.term;
}

std::string to_string(const Assertion& a) {
  if (a.is_role()) {
    return "(" + a.individual + ", " + a.other + ") : " + a.role + " @ " + a.context;
  }
  return a.individual + " : " + to_string(a.term) + " @ " + a.context;
}

std::strong_ordering operator<=>(const TBoxAxiom& a, const TBoxAxiom& b) {
  if (auto c = a.lhs <=> b.lhs; c != 0) return c;
  return a.rhs <=> b.rhs;
}

std::string to_string(const TBoxAxiom& ax) {
  return to_string(ax.lhs) + " sub " + to_string(ax.rhs);
}

void ContextPoset::add_context(const Name& c) { elements_.insert(c); }

void ContextPoset::add_refinement(const Name& finer, const Name& coarser) {
  require(finer);
  require(coarser);
  refinements_.emplace(finer, coarser);
}

void ContextPoset::require(const Name& c) const {
  if (!contains(c)) throw ContextError("unknown context '" + c + "'");
}

bool ContextPoset::leq(const Name& v, const Name& u) const {
  require(v);
  require(u);
  if (v == u) return true;
  std::set<Name> seen{v};
  std::deque<Name> frontier{v};
  while (!frontier.empty()) {
    Name cur = frontier.front();
    frontier.pop_front();
    for (const auto& [finer, coarser] : refinements_) {
      if (finer != cur || seen.count(coarser)) continue;
      if (coarser == u) return true;
      seen.insert(coarser);
      frontier.push_back(coarser);
    }
  }
  return false;
}

std::set<Name> ContextPoset::down_set(const Name& u) const {
  std::set<Name> out;
  for (const auto& w : elements_) {
    if (leq(w, u)) out.insert(w);
  }
  return out;
}

std::optional<Name> ContextPoset::meet(const Name& a, const Name& b) const {
  std::vector<Name> lower;
  for (const auto& w : elements_) {
    if (leq(w, a) && leq(w, b)) lower.push_back(w);
  }
  for (const auto& g : lower) {
    bool greatest = true;
    for (const auto& w : lower) {
      if (!leq(w, g)) {
        greatest = false;
        break;
      }
    }
    if (greatest) return g;
  }
  return std::nullopt;
}

void ContextPoset::validate() const {
  for (const auto& [finer, coarser] : refinements_) {
    require(finer);
    require(coarser);
  }
  for (const auto& a : elements_) {
    for (const auto& b : elements_) {
      if (a < b && leq(a, b) && leq(b, a)) {
        throw ConfigError("contexts '" + a + "' and '" + b + "' refine each other");
      }
    }
  }
}

bool context_leq(const ContextPoset& poset, const Name& v, const Name& u) { return poset.leq(v, u); }

void Signature::validate() const {
  auto overlap = [](const std::set<Name>& x, const std::set<Name>& y, const char* what) {
    for (const auto& n : x) {
      if (y.count(n)) throw ConfigError(std::string("name '") + n + "' declared as " + what);
    }
  };
  overlap(concept_names, role_names, "both concept and role");
  overlap(concept_names, individual_names, "both concept and individual");
  overlap(role_names, individual_names, "both role and individual");
  overlap(concept_names, contexts.elements(), "both concept and context");
  overlap(role_names, contexts.elements(), "both role and context");
  overlap(individual_names, contexts.elements(), "both individual and context");
  for (const auto* names : {&concept_names, &role_names, &individual_names, &contexts.elements()}) {
    for (const auto& n : *names) {
      if (!is_identifier(n)) throw ConfigError("malformed identifier '" + n + "'");
    }
  }
  contexts.validate();
}

void Signature::check(const Concept& c) const {
  std::set<Name> atoms, roles;
  collect_atoms(c, atoms);
  collect_roles(c, roles);
  for (const auto& a : atoms) {
    if (!has_concept(a)) throw UnknownNameError("concept", a);
  }
  for (const auto& r : roles) {
    if (!has_role(r)) throw UnknownNameError("role", r);
  }
}

void Signature::check(const Assertion& a) const {
  if (!has_individual(a.individual)) throw UnknownNameError("individual", a.individual);
  if (!has_context(a.context)) throw UnknownNameError("context", a.context);
  if (a.is_role()) {
    if (!has_individual(a.other)) throw UnknownNameError("individual", a.other);
    if (!has_role(a.role)) throw UnknownNameError("role", a.role);
  } else {
    check(a.term);
  }
}

void KnowledgeState::validate() const {
  for (const auto& a : abox) {
    if (a.context != context) {
      throw ContextError("assertion '" + to_string(a) + "' is not tagged with context '" +
                         context + "'");
    }
  }
}

std::string to_string(const KnowledgeState& s) {
  std::string out = "context " + s.context + "\n";
  for (const auto& ax : s.tbox) out += "tbox " + to_string(ax) + "\n";
  for (const auto& a : s.abox) out += "abox " + to_string(a) + "\n";
  return out;
}

std::string digest(const KnowledgeState& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : to_string(s)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

bool is_identifier(const std::string& s) {
  // ident := [A-Za-z][A-Za-z0-9_]* with an optional "(ident)" index suffix,
  // which names indexed concepts such as Orders(c1).
  auto plain = [](const std::string& t, std::size_t b, std::size_t e) {
    if (b >= e || !std::isalpha(static_cast<unsigned char>(t[b]))) return false;
    for (std::size_t i = b + 1; i < e; ++i) {
      unsigned char ch = t[i];
      if (!std::isalnum(ch) && ch != '_') return false;
    }
    return true;
  };
  auto open = s.find('(');
  if (open == std::string::npos) return plain(s, 0, s.size());
  return s.back() == ')' && plain(s, 0, open) && plain(s, open + 1, s.size() - 1);
}

}  // namespace tapo
