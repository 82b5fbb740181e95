#include "tapo/derivation.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include "tapo/error.hpp"
#include "tapo/finite_models.hpp"

namespace tapo {

namespace {

std::string state_tag(const KnowledgeState& s) { return "S" + digest(s).substr(0, 8); }

std::string truth(bool b) { return b ? "t" : "f"; }

}  // namespace

std::string to_string(const Judgment& j) {
  struct Printer {
    std::string operator()(const SubJ& s) const {
      return "T |- " + to_string(TBoxAxiom{s.sub, s.super});
    }
    std::string operator()(const AsrtJ& a) const {
      return state_tag(a.state) + " |- " + to_string(a.assertion);
    }
    std::string operator()(const GuardJ& g) const {
      return "|-g[" + g.provider + "] " + to_string(g.guard) + " : " + truth(g.value) + " at " +
             state_tag(g.state);
    }
    std::string operator()(const TransJ& t) const {
      return to_string(t.program) + " : " + state_tag(t.before) + " ~> " + state_tag(t.after);
    }
    std::string operator()(const OracleJ& o) const {
      return o.query + " =>" + o.frame + " " + state_tag(o.before) + " ~> " + state_tag(o.after);
    }
    std::string operator()(const AnswerJ& a) const {
      return "ans[" + a.frame + "](" + a.query + ") = " + a.response;
    }
  };
  return std::visit(Printer{}, j);
}

std::size_t ProofTree::size() const {
  std::size_t n = 1;
  for (const auto& c : children) n += c.size();
  return n;
}

ProofTree lift(const StaticDerivation& d, const KnowledgeState& state) {
  ProofTree t;
  t.rule = d.rule;
  if (const auto* a = std::get_if<Assertion>(&d.conclusion)) {
    t.conclusion = AsrtJ{state, *a};
  } else {
    const auto& ax = std::get<TBoxAxiom>(d.conclusion);
    t.conclusion = SubJ{state.tbox, ax.lhs, ax.rhs};
  }
  for (const auto& p : d.premises) t.children.push_back(lift(p, state));
  return t;
}

namespace {

// Stage i of a composite frame sees its own certificates plus those of the
// earlier stages. Plain frames are their own single stage.
struct StageView {
  std::vector<const OracleFrame*> stages;
  std::vector<Response> parts;
};

StageView stages_of(const OracleFrame& frame, const Response& r) {
  StageView v;
  if (!frame.composite()) {
    v.stages.push_back(&frame);
    v.parts.push_back(r);
    return v;
  }
  std::vector<Certificate> carried;
  for (std::size_t i = 0; i < r.parts.size() && i < frame.stages.size(); ++i) {
    Response part = r.parts[i];
    part.certificates.insert(part.certificates.begin(), carried.begin(), carried.end());
    carried.insert(carried.end(), r.parts[i].certificates.begin(), r.parts[i].certificates.end());
    v.stages.push_back(&frame.stages[i]);
    v.parts.push_back(std::move(part));
  }
  return v;
}

struct Invalid {
  std::string reason;
};

bool guard_value(const ProofTree& t) { return std::get<GuardJ>(t.conclusion).value; }

const KnowledgeState& after_of(const ProofTree& t) { return std::get<TransJ>(t.conclusion).after; }

class Checker {
 public:
  explicit Checker(const CheckEnv& env) : env_(env) {}

  CheckVerdict run(const ProofTree& root) {
    CheckVerdict v;
    try {
      visit(root);
      if (charged_ > env_.fuel) {
        path_.clear();
        throw Invalid{"fuel side condition: " + std::to_string(charged_) +
                      " While-T/Consult steps exceed fuel " + std::to_string(env_.fuel)};
      }
    } catch (Invalid& e) {
      v.valid = false;
      v.path = path_;
      v.reason = std::move(e.reason);
    } catch (const Error& e) {
      v.valid = false;
      v.path = path_;
      v.reason = e.what();
    }
    return v;
  }

 private:
  [[noreturn]] void fail(const ProofTree& t, const std::string& why) {
    throw Invalid{std::string(to_string(t.rule)) + ": " + why};
  }

  void require(const ProofTree& t, bool ok, const std::string& why) {
    if (!ok) fail(t, why);
  }

  template <class J>
  const J& conclusion(const ProofTree& t, const char* kind) {
    const auto* j = std::get_if<J>(&t.conclusion);
    if (!j) fail(t, std::string("conclusion must be a ") + kind + " judgment");
    return *j;
  }

  template <class J>
  const J& premise(const ProofTree& t, std::size_t i, const char* kind) {
    const auto* j = std::get_if<J>(&t.children[i].conclusion);
    if (!j) fail(t, "premise " + std::to_string(i + 1) + " must be a " + kind + " judgment");
    return *j;
  }

  void visit(const ProofTree& t) {
    require(t, t.children.size() == rule_arity(t.rule),
            "expects " + std::to_string(rule_arity(t.rule)) + " premises, has " +
                std::to_string(t.children.size()));
    node(t);
    for (std::size_t i = 0; i < t.children.size(); ++i) {
      path_.push_back(i);
      visit(t.children[i]);
      path_.pop_back();
    }
  }

  void node(const ProofTree& t) {
    switch (t.rule) {
      case Rule::AAx:
      case Rule::RAx:
      case Rule::TSub:
      case Rule::AndIntro:
      case Rule::AndElim1:
      case Rule::AndElim2:
      case Rule::ExistsIntro: return assertional(t);
      case Rule::SubRefl:
      case Rule::SubTrans:
      case Rule::SubAxiom:
      case Rule::SubConjProj:
      case Rule::SubBot:
      case Rule::SubTop: return terminological(t);
      case Rule::GuardTrue:
      case Rule::GuardFalse:
      case Rule::GuardAtom:
      case Rule::GuardAndT:
      case Rule::GuardAndF1:
      case Rule::GuardAndF2:
      case Rule::GuardOrT1:
      case Rule::GuardOrT2:
      case Rule::GuardOrF:
      case Rule::GuardNotT:
      case Rule::GuardNotF: return guard(t);
      case Rule::Skip:
      case Rule::Add:
      case Rule::Del:
      case Rule::Seq:
      case Rule::IfT:
      case Rule::IfF:
      case Rule::WhileT:
      case Rule::WhileF:
      case Rule::Consult: return procedural(t);
      case Rule::Query: return query(t);
      case Rule::OracleAccept:
      case Rule::OracleHold:
      case Rule::OracleNoAnswer: return oracle(t);
    }
  }

  void assertional(const ProofTree& t) {
    const auto& j = conclusion<AsrtJ>(t, "assertion");
    const auto& a = j.assertion;
    const Name& ctx = j.state.context;
    require(t, a.context == ctx, "assertion '" + to_string(a) + "' is not over " + ctx);
    auto same_state = [&](std::size_t i) {
      const auto& p = premise<AsrtJ>(t, i, "assertion");
      require(t, p.state == j.state, "premise " + std::to_string(i + 1) + " is over another state");
      return p.assertion;
    };
    switch (t.rule) {
      case Rule::AAx:
        require(t, a.is_concept(), "A-Ax concludes a concept assertion");
        require(t, j.state.contains(a), "'" + to_string(a) + "' is not in A_U");
        break;
      case Rule::RAx:
        require(t, a.is_role(), "R-Ax concludes a role assertion");
        require(t, j.state.contains(a), "'" + to_string(a) + "' is not in A_U");
        break;
      case Rule::TSub: {
        const auto& sub = premise<SubJ>(t, 0, "subsumption");
        require(t, sub.tbox == j.state.tbox, "subsumption premise uses another TBox");
        auto p = same_state(1);
        require(t, a.is_concept() && p.is_concept() && p.individual == a.individual &&
                       p.term == sub.sub && a.term == sub.super,
                "premises a:C and C sub D do not yield the conclusion");
        break;
      }
      case Rule::AndIntro: {
        auto l = same_state(0), r = same_state(1);
        require(t, a.is_concept() && a.term.is(ConceptKind::And), "conclusion is not a conjunction");
        require(t, l.is_concept() && r.is_concept() && l.individual == a.individual &&
                       r.individual == a.individual && l.term == a.term.lhs() &&
                       r.term == a.term.rhs(),
                "premises do not match the conjuncts");
        break;
      }
      case Rule::AndElim1:
      case Rule::AndElim2: {
        auto p = same_state(0);
        require(t, p.is_concept() && p.term.is(ConceptKind::And), "premise is not a conjunction");
        const auto& part = t.rule == Rule::AndElim1 ? p.term.lhs() : p.term.rhs();
        require(t, a == Assertion::member(p.individual, part, ctx),
                "conclusion is not the projected conjunct");
        break;
      }
      case Rule::ExistsIntro: {
        auto edge = same_state(0), filler = same_state(1);
        require(t, edge.is_role(), "premise 1 is not a role assertion");
        require(t, filler.is_concept() && filler.individual == edge.other,
                "premise 2 does not describe the role successor");
        require(t, a == Assertion::member(edge.individual, Concept::exists(edge.role, filler.term), ctx),
                "conclusion is not the existential restriction");
        break;
      }
      default: break;
    }
  }

  void terminological(const ProofTree& t) {
    const auto& j = conclusion<SubJ>(t, "subsumption");
    switch (t.rule) {
      case Rule::SubRefl: require(t, j.sub == j.super, "sides differ"); break;
      case Rule::SubBot: require(t, j.sub.is(ConceptKind::Bottom), "left side is not bot"); break;
      case Rule::SubTop: require(t, j.super.is(ConceptKind::Top), "right side is not top"); break;
      case Rule::SubAxiom:
        require(t, std::find(j.tbox.begin(), j.tbox.end(), TBoxAxiom{j.sub, j.super}) != j.tbox.end(),
                "'" + to_string(TBoxAxiom{j.sub, j.super}) + "' is not a TBox axiom");
        break;
      case Rule::SubConjProj:
        require(t, j.sub.is(ConceptKind::And) && (j.super == j.sub.lhs() || j.super == j.sub.rhs()),
                "right side is not a conjunct of the left side");
        break;
      case Rule::SubTrans: {
        const auto& l = premise<SubJ>(t, 0, "subsumption");
        const auto& r = premise<SubJ>(t, 1, "subsumption");
        require(t, l.tbox == j.tbox && r.tbox == j.tbox, "premises use another TBox");
        require(t, l.sub == j.sub && l.super == r.sub && r.super == j.super,
                "premises do not chain to the conclusion");
        break;
      }
      default: break;
    }
  }

  void guard_premise(const ProofTree& t, std::size_t i, const GuardJ& j, const GuardExpr& g,
                     bool value) {
    const auto& p = premise<GuardJ>(t, i, "guard");
    require(t, p.provider == j.provider && p.state == j.state,
            "premise " + std::to_string(i + 1) + " uses another provider or state");
    require(t, p.guard == g, "premise " + std::to_string(i + 1) + " is about '" + to_string(p.guard) +
                                 "', expected '" + to_string(g) + "'");
    require(t, p.value == value, "side condition fails: premise " + std::to_string(i + 1) +
                                     " concludes " + truth(p.value) + ", rule needs " + truth(value));
  }

  void guard(const ProofTree& t) {
    const auto& j = conclusion<GuardJ>(t, "guard");
    const auto& g = j.guard;
    auto shape = [&](GuardKind k, bool value) {
      require(t, g.is(k), "guard '" + to_string(g) + "' has the wrong shape");
      require(t, j.value == value, "conclusion value " + truth(j.value) + " does not fit the rule");
    };
    switch (t.rule) {
      case Rule::GuardTrue: shape(GuardKind::True, true); break;
      case Rule::GuardFalse: shape(GuardKind::False, false); break;
      case Rule::GuardAtom: {
        require(t, g.is(GuardKind::Atom), "guard is not an atom");
        atom(t, j);
        break;
      }
      case Rule::GuardAndT:
        shape(GuardKind::And, true);
        guard_premise(t, 0, j, g.lhs(), true);
        guard_premise(t, 1, j, g.rhs(), true);
        break;
      case Rule::GuardAndF1:
        shape(GuardKind::And, false);
        guard_premise(t, 0, j, g.lhs(), false);
        break;
      case Rule::GuardAndF2:
        shape(GuardKind::And, false);
        guard_premise(t, 0, j, g.rhs(), false);
        break;
      case Rule::GuardOrT1:
        shape(GuardKind::Or, true);
        guard_premise(t, 0, j, g.lhs(), true);
        break;
      case Rule::GuardOrT2:
        shape(GuardKind::Or, true);
        guard_premise(t, 0, j, g.rhs(), true);
        break;
      case Rule::GuardOrF:
        shape(GuardKind::Or, false);
        guard_premise(t, 0, j, g.lhs(), false);
        guard_premise(t, 1, j, g.rhs(), false);
        break;
      case Rule::GuardNotT:
        shape(GuardKind::Not, true);
        guard_premise(t, 0, j, g.body(), false);
        break;
      case Rule::GuardNotF:
        shape(GuardKind::Not, false);
        guard_premise(t, 0, j, g.body(), true);
        break;
      default: break;
    }
  }

  void atom(const ProofTree& t, const GuardJ& j) {
    const auto& a = j.guard.atom();
    if (a.is_assertion()) {
      require(t, a.assertion.context == j.state.context,
              "atom '" + to_string(a) + "' is not over " + j.state.context);
    }
    auto it = env_.providers.find(j.provider);
    require(t, it != env_.providers.end() && it->second != nullptr,
            "provider '" + j.provider + "' is not in the environment");
    GuardProvider& p = *it->second;
    if (p.is_pure()) {
      bool v = p.recompute(a, j.state);
      require(t, v == j.value, "provider '" + j.provider + "' values '" + to_string(a) + "' as " +
                                   truth(v) + ", tree claims " + truth(j.value));
      return;
    }
    require(t, t.log_index.has_value(), "no answer-log reference for a non-pure provider");
    std::size_t idx = *t.log_index;
    const auto& log = p.answers();
    require(t, idx < log.size(), "answer-log index " + std::to_string(idx) + " is out of range");
    require(t, log[idx] == AtomAnswer{a, j.value},
            "answer-log entry " + std::to_string(idx) + " does not record '" + to_string(a) +
                "' as " + truth(j.value));
    require(t, used_.insert({j.provider, idx}).second,
            "answer-log entry " + std::to_string(idx) + " is used twice");
  }

  void procedural(const ProofTree& t) {
    const auto& j = conclusion<TransJ>(t, "transition");
    const auto& p = j.program;
    const Name& ctx = j.before.context;
    require(t, j.after.context == ctx, "transition changes the context");
    require(t, j.after.tbox == j.before.tbox, "transition changes the TBox");
    auto kind = [&](ProgramKind k) {
      require(t, p.is(k), "program '" + to_string(p) + "' has the wrong shape");
    };
    auto trans = [&](std::size_t i, const KnowledgeState& before, const Program& prog) -> const TransJ& {
      const auto& c = premise<TransJ>(t, i, "transition");
      require(t, c.before == before, "premise " + std::to_string(i + 1) + " starts from another state");
      require(t, c.program == prog, "premise " + std::to_string(i + 1) + " runs '" +
                                        to_string(c.program) + "', expected '" + to_string(prog) + "'");
      return c;
    };
    auto guarded = [&](bool value) {
      const auto& g = premise<GuardJ>(t, 0, "guard");
      require(t, g.state == j.before, "guard premise is evaluated at another state");
      require(t, g.guard == p.guard(), "guard premise is about another guard");
      require(t, g.value == value, "side condition fails: guard '" + to_string(p.guard()) +
                                       "' concludes " + truth(g.value) + ", rule needs " + truth(value));
    };
    switch (t.rule) {
      case Rule::Skip:
        kind(ProgramKind::Skip);
        require(t, j.after == j.before, "skip changes the state");
        break;
      case Rule::Add:
      case Rule::Del: {
        kind(t.rule == Rule::Add ? ProgramKind::Add : ProgramKind::Del);
        const auto& a = p.assertion();
        require(t, a.context == ctx, "assertion '" + to_string(a) + "' is not over " + ctx);
        ABox expect = j.before.abox;
        if (t.rule == Rule::Add) expect.insert(a);
        else expect.erase(a);
        require(t, j.after.abox == expect, "resulting ABox is not the set update");
        break;
      }
      case Rule::Seq: {
        kind(ProgramKind::Seq);
        const auto& first = trans(0, j.before, p.first());
        trans(1, first.after, p.second());
        require(t, premise<TransJ>(t, 1, "transition").after == j.after,
                "second premise does not end in the conclusion state");
        break;
      }
      case Rule::IfT:
      case Rule::IfF: {
        kind(ProgramKind::If);
        bool taken = t.rule == Rule::IfT;
        guarded(taken);
        const auto& c = trans(1, j.before, taken ? p.then_branch() : p.else_branch());
        require(t, c.after == j.after, "branch does not end in the conclusion state");
        break;
      }
      case Rule::WhileT: {
        kind(ProgramKind::While);
        guarded(true);
        const auto& body = trans(1, j.before, p.body());
        const auto& rest = trans(2, body.after, p);
        require(t, rest.after == j.after, "unfolding does not end in the conclusion state");
        ++charged_;
        break;
      }
      case Rule::WhileF:
        kind(ProgramKind::While);
        guarded(false);
        require(t, j.after == j.before, "While-F changes the state");
        break;
      case Rule::Consult: {
        kind(ProgramKind::Consult);
        const auto& h = premise<AsrtJ>(t, 0, "assertion");
        require(t, h.state == j.before, "hesitation premise is over another state");
        require(t, h.assertion.is_concept() && h.assertion.term == Concept::atom(kHesitationConcept),
                "premise 1 is not a " + kHesitationConcept + " assertion");
        const auto& o = premise<OracleJ>(t, 1, "oracle");
        require(t, o.query == p.query(), "oracle premise answers '" + o.query + "', not '" + p.query() + "'");
        require(t, o.before == j.before && o.after == j.after, "oracle premise has other states");
        const auto& frame = lookup(t, o.frame);
        auto it = frame.hesitation.find(p.query());
        require(t, it != frame.hesitation.end() && it->second == h.assertion.individual,
                "query '" + p.query() + "' is not associated with the hesitation of '" +
                    h.assertion.individual + "'");
        ++charged_;
        break;
      }
      default: break;
    }
  }

  const OracleFrame& lookup(const ProofTree& t, const Name& name) {
    auto it = env_.frames.find(name);
    if (it == env_.frames.end()) fail(t, "frame '" + name + "' is not in the environment");
    return it->second;
  }

  std::optional<Response> response(const ProofTree& t, const OracleFrame& frame, const Name& q) {
    require(t, frame.admissible(q), "query '" + q + "' is not admissible in frame '" + frame.name + "'");
    return answer(frame, q);
  }

  void query(const ProofTree& t) {
    const auto& j = conclusion<AnswerJ>(t, "answer");
    const auto& frame = lookup(t, j.frame);
    auto r = response(t, frame, j.query);
    require(t, r.has_value(), "frame '" + j.frame + "' has no answer for '" + j.query + "'");
    require(t, r->id == j.response, "frame answers '" + j.query + "' with '" + r->id + "', not '" +
                                        j.response + "'");
  }

  void oracle(const ProofTree& t) {
    const auto& j = conclusion<OracleJ>(t, "oracle");
    const auto& frame = lookup(t, j.frame);
    require(t, frame.context == j.before.context, "frame is over another context");
    require(t, j.after.context == j.before.context && j.after.tbox == j.before.tbox,
            "oracle step changes the context or TBox");
    auto r = response(t, frame, j.query);
    if (t.rule == Rule::OracleNoAnswer) {
      require(t, !r.has_value(), "the query has an answer");
      require(t, j.after == j.before, "no-answer step changes the state");
      return;
    }
    require(t, r.has_value(), "the query has no answer");
    const auto& q = premise<AnswerJ>(t, 0, "answer");
    require(t, q.frame == j.frame && q.query == j.query && q.response == r->id,
            "answer premise does not match the step");
    ABox merged = j.before.abox;
    merged.insert(r->payload.begin(), r->payload.end());

    if (t.rule == Rule::OracleHold) {
      require(t, j.after == j.before, "hold changes the state");
      bool validated = validate(frame, *r).validated;
      bool compatible = check_t_compatibility(j.before.tbox, merged, env_.max_depth).compatible;
      require(t, !(validated && compatible), "response is validated and T-compatible; hold does not apply");
      return;
    }

    auto view = stages_of(frame, *r);
    require(t, t.witness.size() == view.stages.size(),
            "expects one witness set per stage (" + std::to_string(view.stages.size()) + ")");
    for (std::size_t i = 0; i < view.stages.size(); ++i) {
      const auto& stage = *view.stages[i];
      const auto& part = view.parts[i];
      std::string where = view.stages.size() > 1 ? " at stage " + std::to_string(i + 1) : "";
      require(t, stage.trust.leq(stage.trust.threshold, part.trust),
              "trust gate" + where + ": tr(r) = " + part.trust + " is not above threshold " +
                  stage.trust.threshold);
      std::vector<Certificate> s;
      for (const auto& id : t.witness[i]) {
        auto it = std::find_if(part.certificates.begin(), part.certificates.end(),
                               [&](const Certificate& c) { return c.id == id; });
        require(t, it != part.certificates.end(), "witness certificate '" + id + "' is not in C(r)" + where);
        s.push_back(*it);
      }
      auto verdict = stage.policy.evaluate(stage.trust, part, s);
      require(t, verdict == Verdict::Accept, "policy gate" + where + ": val(r, S) = " + to_string(verdict));
    }
    auto compat = check_t_compatibility(j.before.tbox, merged, env_.max_depth);
    require(t, compat.compatible, "compatibility gate: importing the payload clashes with T");
    require(t, j.after.abox == merged, "resulting ABox is not A_U plus the payload");
  }

  const CheckEnv& env_;
  std::vector<std::size_t> path_;
  std::set<std::pair<Name, std::size_t>> used_;
  std::size_t charged_ = 0;
};

}  // namespace

CheckVerdict check_derivation(const ProofTree& tree, const CheckEnv& env) {
  return Checker(env).run(tree);
}

ProofTree derive_guard(GuardProvider& provider, const GuardExpr& g, const KnowledgeState& state) {
  auto node = [&](Rule r, bool v, std::vector<ProofTree> children) {
    return ProofTree{GuardJ{provider.name(), state, g, v}, r, std::move(children), {}, std::nullopt};
  };
  switch (g.kind()) {
    case GuardKind::True: return node(Rule::GuardTrue, true, {});
    case GuardKind::False: return node(Rule::GuardFalse, false, {});
    case GuardKind::Atom: {
      std::size_t idx = provider.answers().size();
      bool v = provider.value(g.atom(), state);
      auto t = node(Rule::GuardAtom, v, {});
      if (!provider.is_pure()) t.log_index = idx;
      return t;
    }
    case GuardKind::And: {
      auto l = derive_guard(provider, g.lhs(), state);
      if (!guard_value(l)) return node(Rule::GuardAndF1, false, {std::move(l)});
      auto r = derive_guard(provider, g.rhs(), state);
      if (!guard_value(r)) return node(Rule::GuardAndF2, false, {std::move(r)});
      return node(Rule::GuardAndT, true, {std::move(l), std::move(r)});
    }
    case GuardKind::Or: {
      auto l = derive_guard(provider, g.lhs(), state);
      if (guard_value(l)) return node(Rule::GuardOrT1, true, {std::move(l)});
      auto r = derive_guard(provider, g.rhs(), state);
      if (guard_value(r)) return node(Rule::GuardOrT2, true, {std::move(r)});
      return node(Rule::GuardOrF, false, {std::move(l), std::move(r)});
    }
    case GuardKind::Not: {
      auto b = derive_guard(provider, g.body(), state);
      bool v = guard_value(b);
      return node(v ? Rule::GuardNotF : Rule::GuardNotT, !v, {std::move(b)});
    }
  }
  return node(Rule::GuardTrue, true, {});
}

ProofTree derive_oracle_step(const OracleFrame& frame, const KnowledgeState& state, const Name& q,
                             std::size_t max_depth) {
  if (frame.context != state.context) {
    throw ContextError("frame '" + frame.name + "' is over '" + frame.context + "', state over '" +
                       state.context + "'");
  }
  auto r = answer(frame, q);
  if (!r) return ProofTree{OracleJ{state, frame.name, q, state}, Rule::OracleNoAnswer, {}, {}, std::nullopt};
  ProofTree premise{AnswerJ{frame.name, q, r->id}, Rule::Query, {}, {}, std::nullopt};
  ProofTree hold{OracleJ{state, frame.name, q, state}, Rule::OracleHold, {premise}, {}, std::nullopt};

  auto view = stages_of(frame, *r);
  std::vector<std::vector<Name>> witness;
  for (std::size_t i = 0; i < view.stages.size(); ++i) {
    auto v = validate(*view.stages[i], view.parts[i]);
    if (!v.validated) return hold;
    std::vector<Name> ids;
    for (const auto& c : v.witness) ids.push_back(c.id);
    witness.push_back(std::move(ids));
  }
  KnowledgeState next = state;
  next.abox.insert(r->payload.begin(), r->payload.end());
  if (!check_t_compatibility(state.tbox, next.abox, max_depth).compatible) return hold;
  return ProofTree{OracleJ{state, frame.name, q, std::move(next)}, Rule::OracleAccept, {premise},
                   std::move(witness), std::nullopt};
}

ConsultResult consult(const KnowledgeState& state, const OracleFrame& frame, const Name& individual,
                      const Name& query, std::size_t max_depth) {
  if (!frame.admissible(query)) {
    throw OracleError("query '" + query + "' is not admissible in frame '" + frame.name + "'");
  }
  auto it = frame.hesitation.find(query);
  if (it == frame.hesitation.end() || it->second != individual) {
    throw ConfigError("query '" + query + "' is not associated with the hesitation of '" +
                      individual + "'");
  }
  auto goal = Assertion::member(individual, Concept::atom(kHesitationConcept), state.context);
  auto hesitation = entails(state, goal, max_depth);
  if (!hesitation) {
    throw HesitationError("'" + to_string(goal) + "' is not derivable; consult(" + query +
                          ") does not apply");
  }
  auto step = oracle_transition(frame, state, query, max_depth);
  auto oracle = derive_oracle_step(frame, state, query, max_depth);
  ProofTree tree{TransJ{state, Program::consult(query), step.state}, Rule::Consult,
                 {lift(*hesitation, state), std::move(oracle)}, {}, std::nullopt};
  return ConsultResult{step.state, std::move(tree), std::move(step.report)};
}

const OracleFrame* frame_for_query(const std::map<Name, OracleFrame>& obox, const Name& query) {
  for (const auto& [name, frame] : obox) {
    if (frame.admissible(query)) return &frame;
  }
  return nullptr;
}

namespace {

ConsultResult consult_in(const std::map<Name, OracleFrame>& obox, const KnowledgeState& state,
                         const Name& query, std::size_t max_depth) {
  const auto* frame = frame_for_query(obox, query);
  if (!frame) throw OracleError("no frame admits query '" + query + "'");
  auto it = frame->hesitation.find(query);
  if (it == frame->hesitation.end()) {
    throw ConfigError("query '" + query + "' has no hesitation association in frame '" +
                      frame->name + "'");
  }
  return consult(state, *frame, it->second, query, max_depth);
}

}  // namespace

KnowledgeState ObjectConsultHandler::consult(const KnowledgeState& state, const Name& query) {
  results_.push_back(consult_in(*obox_, state, query, max_depth_));
  return results_.back().state;
}

namespace {

struct OutOfFuelSignal {};

class Builder {
 public:
  Builder(GuardProvider& provider, std::size_t fuel, const std::map<Name, OracleFrame>* obox,
          std::size_t max_depth)
      : provider_(provider), fuel_(fuel), obox_(obox), max_depth_(max_depth) {}

  ProofTree run(const Program& p, const KnowledgeState& s) {
    auto leaf = [&](Rule r, KnowledgeState after) {
      return ProofTree{TransJ{s, p, std::move(after)}, r, {}, {}, std::nullopt};
    };
    switch (p.kind()) {
      case ProgramKind::Skip: return leaf(Rule::Skip, s);
      case ProgramKind::Add: {
        KnowledgeState next = s;
        next.abox.insert(p.assertion());
        return leaf(Rule::Add, std::move(next));
      }
      case ProgramKind::Del: {
        KnowledgeState next = s;
        next.abox.erase(p.assertion());
        return leaf(Rule::Del, std::move(next));
      }
      case ProgramKind::Seq: {
        auto first = run(p.first(), s);
        auto second = run(p.second(), after_of(first));
        KnowledgeState out = after_of(second);
        return ProofTree{TransJ{s, p, std::move(out)}, Rule::Seq, {std::move(first), std::move(second)},
                         {}, std::nullopt};
      }
      case ProgramKind::If: {
        auto g = derive_guard(provider_, p.guard(), s);
        bool taken = guard_value(g);
        auto branch = run(taken ? p.then_branch() : p.else_branch(), s);
        KnowledgeState out = after_of(branch);
        return ProofTree{TransJ{s, p, std::move(out)}, taken ? Rule::IfT : Rule::IfF,
                         {std::move(g), std::move(branch)}, {}, std::nullopt};
      }
      case ProgramKind::While: {
        auto g = derive_guard(provider_, p.guard(), s);
        if (!guard_value(g)) {
          return ProofTree{TransJ{s, p, s}, Rule::WhileF, {std::move(g)}, {}, std::nullopt};
        }
        spend();
        auto body = run(p.body(), s);
        auto rest = run(p, after_of(body));
        KnowledgeState out = after_of(rest);
        return ProofTree{TransJ{s, p, std::move(out)}, Rule::WhileT,
                         {std::move(g), std::move(body), std::move(rest)}, {}, std::nullopt};
      }
      case ProgramKind::Consult: {
        if (!obox_) throw Error("no oracle frames for 'consult " + p.query() + "'");
        spend();
        return consult_in(*obox_, s, p.query(), max_depth_).tree;
      }
    }
    return leaf(Rule::Skip, s);
  }

 private:
  void spend() {
    if (used_ == fuel_) throw OutOfFuelSignal{};
    ++used_;
  }

  GuardProvider& provider_;
  std::size_t fuel_;
  const std::map<Name, OracleFrame>* obox_;
  std::size_t max_depth_;
  std::size_t used_ = 0;
};

bool contexts_agree(const Program& prog, const Name& ctx) {
  std::vector<Assertion> embedded;
  collect_assertions(prog, embedded);
  for (const auto& a : embedded) {
    if (a.context != ctx) return false;
  }
  std::set<GuardAtom> atoms;
  collect_guard_atoms(prog, atoms);
  return std::all_of(atoms.begin(), atoms.end(), [&](const GuardAtom& a) {
    return !a.is_assertion() || a.assertion.context == ctx;
  });
}

}  // namespace

std::optional<ProofTree> derive_transition(const KnowledgeState& state, const Program& prog,
                                           GuardProvider& provider, std::size_t fuel,
                                           const std::map<Name, OracleFrame>* obox,
                                           std::size_t max_depth) {
  if (!contexts_agree(prog, state.context)) return std::nullopt;
  try {
    return Builder(provider, fuel, obox, max_depth).run(prog, state);
  } catch (const OutOfFuelSignal&) {
    return std::nullopt;
  } catch (const Error&) {
    return std::nullopt;
  }
}

namespace {

CheckEnv env_for(const std::map<Name, OracleFrame>& frames, GuardProvider* provider,
                 std::size_t fuel, std::size_t max_depth) {
  CheckEnv env;
  if (provider) env.providers[provider->name()] = provider;
  env.frames = frames;
  env.fuel = fuel;
  env.max_depth = max_depth;
  return env;
}

std::string path_text(const std::vector<std::size_t>& path) {
  std::string out = "root";
  for (auto i : path) out += "." + std::to_string(i);
  return out;
}

void check_transition(const TransitionCase& c, std::size_t index, std::size_t fuel,
                      std::size_t max_depth, HarnessReport& rep) {
  auto report = [&](std::string detail) {
    rep.counterexamples.push_back({"transition", index, std::move(detail)});
  };
  ++rep.transitions;
  c.provider->reset();
  ObjectConsultHandler handler(c.obox, max_depth);
  auto out = eval_program(c.state, c.program, *c.provider, fuel, EvalHooks{&handler, nullptr});
  c.provider->reset();
  auto derived = derive_transition(c.state, c.program, *c.provider, fuel, &c.obox, max_depth);
  if (out.is_final()) ++rep.finals;
  if (out.is_final() != derived.has_value()) {
    report("interpreter outcome is " + describe(out) + " but a derivation " +
           (derived ? "exists" : "does not exist"));
    return;
  }
  if (!derived && !c.claimed) return;

  const ProofTree& tree = c.claimed ? *c.claimed : *derived;
  auto verdict = check_derivation(tree, env_for(c.obox, c.provider.get(), fuel, max_depth));
  if (!verdict.valid) {
    report("invalid derivation at " + path_text(verdict.path) + ": " + verdict.reason);
    return;
  }
  const auto* j = std::get_if<TransJ>(&tree.conclusion);
  if (!j || j->before != c.state || !(j->program == c.program)) {
    report("derivation does not conclude the case's transition");
    return;
  }
  if (!out.is_final() || j->after != out.state()) {
    report("derivation concludes " + state_tag(j->after) + ", interpreter gives " + describe(out));
  }
}

void check_oracle(const OracleCase& c, std::size_t index, std::size_t max_depth, HarnessReport& rep) {
  auto report = [&](std::string detail) {
    rep.counterexamples.push_back({"oracle", index, std::move(detail)});
  };
  ++rep.oracle_steps;
  auto step = oracle_transition(c.frame, c.state, c.query, max_depth);
  ProofTree tree = c.claimed ? *c.claimed : derive_oracle_step(c.frame, c.state, c.query, max_depth);
  auto verdict = check_derivation(tree, env_for({{c.frame.name, c.frame}}, nullptr, kDefaultFuel, max_depth));
  if (!verdict.valid) {
    report("invalid derivation at " + path_text(verdict.path) + ": " + verdict.reason);
    return;
  }
  const auto* j = std::get_if<OracleJ>(&tree.conclusion);
  if (!j || j->before != c.state || j->query != c.query || j->frame != c.frame.name) {
    report("derivation does not conclude the case's oracle step");
    return;
  }
  if (j->after != step.state) {
    report("derivation concludes " + state_tag(j->after) + ", oracle transition gives " +
           state_tag(step.state));
    return;
  }
  if (step.report.accepted &&
      !check_t_compatibility(c.state.tbox, step.state.abox, max_depth).compatible) {
    report("accepted import is not T-compatible");
  }
}

void check_static(const StaticCase& c, std::size_t index, std::size_t max_depth,
                  std::size_t max_domain, HarnessReport& rep) {
  auto report = [&](std::string detail) {
    rep.counterexamples.push_back({"static", index, std::move(detail)});
  };
  ++rep.static_states;
  auto sat = saturate(c.state, max_depth);
  CheckEnv env;
  env.max_depth = max_depth;
  for (const auto& a : sat.derived) {
    if (c.state.contains(a)) continue;
    ++rep.static_assertions;
    auto verdict = check_derivation(lift(sat.tree(sat.justification.at(a)), c.state), env);
    if (!verdict.valid) {
      report("derivation of '" + to_string(a) + "' is invalid at " + path_text(verdict.path) + ": " +
             verdict.reason);
    }
    if (auto model = find_countermodel(c.state.tbox, c.state.abox, a, max_domain)) {
      report("'" + to_string(a) + "' fails in a model of size " + std::to_string(model->domain));
    }
  }
}

}  // namespace

HarnessReport soundness_harness(const Corpus& corpus, std::size_t fuel, std::size_t max_depth,
                                std::size_t max_domain) {
  HarnessReport rep;
  for (std::size_t i = 0; i < corpus.transitions.size(); ++i) {
    check_transition(corpus.transitions[i], i, fuel, max_depth, rep);
  }
  for (std::size_t i = 0; i < corpus.oracle_steps.size(); ++i) {
    check_oracle(corpus.oracle_steps[i], i, max_depth, rep);
  }
  for (std::size_t i = 0; i < corpus.statics.size(); ++i) {
    check_static(corpus.statics[i], i, max_depth, max_domain, rep);
  }
  return rep;
}

}  // namespace tapo
