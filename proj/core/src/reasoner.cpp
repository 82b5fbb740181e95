#include "tapo/reasoner.hpp"

#include <deque>
#include <set>

#include "tapo/error.hpp"

namespace tapo {

std::string to_string(const Fact& f) {
  return std::visit([](const auto& x) { return to_string(x); }, f);
}

std::size_t StaticDerivation::size() const {
  std::size_t n = 1;
  for (const auto& p : premises) n += p.size();
  return n;
}

StaticDerivation Saturation::tree(std::size_t step) const {
  const auto& s = trace.at(step);
  StaticDerivation d{s.rule, s.conclusion, {}};
  d.premises.reserve(s.premises.size());
  for (auto p : s.premises) d.premises.push_back(tree(p));
  return d;
}

namespace {

StaticDerivation sub_leaf(Rule rule, const Concept& c, const Concept& d) {
  return StaticDerivation{rule, TBoxAxiom{c, d}, {}};
}

}  // namespace

std::optional<StaticDerivation> derive_subsumption(const TBox& tbox, const Concept& c,
                                                   const Concept& d) {
  if (c == d) return sub_leaf(Rule::SubRefl, c, d);
  if (c.is(ConceptKind::Bottom)) return sub_leaf(Rule::SubBot, c, d);
  if (d.is(ConceptKind::Top)) return sub_leaf(Rule::SubTop, c, d);

  // Breadth-first search over single-step subsumptions starting at c. Each
  // reached concept remembers its predecessor and the justifying step.
  struct Edge {
    Concept from;
    StaticDerivation step;
  };
  std::map<Concept, std::optional<Edge>> parent;
  parent.emplace(c, std::nullopt);
  std::deque<Concept> frontier{c};

  auto build = [&](const Concept& reached) {
    std::vector<StaticDerivation> chain;
    for (Concept cur = reached; parent.at(cur).has_value();) {
      const auto& e = *parent.at(cur);
      chain.push_back(e.step);
      cur = e.from;
    }
    StaticDerivation proof = chain.back();
    for (auto it = chain.rbegin() + 1; it != chain.rend(); ++it) {
      const auto& left = std::get<TBoxAxiom>(proof.conclusion);
      const auto& right = std::get<TBoxAxiom>(it->conclusion);
      proof = StaticDerivation{Rule::SubTrans, TBoxAxiom{left.lhs, right.rhs}, {proof, *it}};
    }
    return proof;
  };

  while (!frontier.empty()) {
    Concept cur = frontier.front();
    frontier.pop_front();
    std::vector<StaticDerivation> steps;
    for (const auto& ax : tbox) {
      if (ax.lhs == cur) steps.push_back(sub_leaf(Rule::SubAxiom, ax.lhs, ax.rhs));
    }
    if (cur.is(ConceptKind::And)) {
      steps.push_back(sub_leaf(Rule::SubConjProj, cur, cur.lhs()));
      steps.push_back(sub_leaf(Rule::SubConjProj, cur, cur.rhs()));
    }
    if (cur.is(ConceptKind::Bottom)) steps.push_back(sub_leaf(Rule::SubBot, cur, d));
    for (auto& step : steps) {
      Concept next = std::get<TBoxAxiom>(step.conclusion).rhs;
      if (parent.count(next)) continue;
      parent.emplace(next, Edge{cur, std::move(step)});
      if (next == d) return build(next);
      frontier.push_back(next);
    }
  }
  return std::nullopt;
}

namespace {

class Saturator {
 public:
  Saturator(const KnowledgeState& state, std::size_t max_depth)
      : max_depth_(max_depth) {
    sat_.base = state;
    for (const auto& ax : state.tbox) {
      collect_subconcepts(ax.lhs, relevant_);
      collect_subconcepts(ax.rhs, relevant_);
      targets_.insert(ax.rhs);
    }
    for (const auto& a : state.abox) {
      if (a.is_concept()) collect_subconcepts(a.term, relevant_);
    }
    for (const auto& c : relevant_) {
      if (c.is(ConceptKind::And)) conjunctions_.push_back(c);
    }
  }

  Saturation run() {
    for (const auto& a : sat_.base.abox) {
      add(DerivationStep{a.is_role() ? Rule::RAx : Rule::AAx, {}, a});
    }
    std::size_t round = 0;
    while (true) {
      auto fresh = next_round();
      if (fresh.empty()) break;
      if (round == max_depth_) {
        sat_.truncated = true;
        break;
      }
      ++round;
      for (auto& step : fresh) {
        const auto& a = std::get<Assertion>(step.conclusion);
        if (!sat_.derived.count(a)) add(std::move(step));
      }
    }
    sat_.depth_used = round;
    return std::move(sat_);
  }

 private:
  std::size_t add(DerivationStep step) {
    std::size_t idx = sat_.trace.size();
    if (const auto* a = std::get_if<Assertion>(&step.conclusion)) {
      sat_.derived.insert(*a);
      sat_.justification.emplace(*a, idx);
      if (a->is_concept()) {
        concepts_of_[a->individual].insert(a->term);
      } else {
        roles_.push_back(*a);
      }
    }
    sat_.trace.push_back(std::move(step));
    return idx;
  }

  // Flattens a subsumption proof into the trace, reusing earlier steps.
  std::size_t record(const StaticDerivation& d) {
    const auto& ax = std::get<TBoxAxiom>(d.conclusion);
    if (auto it = sub_steps_.find(ax); it != sub_steps_.end()) return it->second;
    std::vector<std::size_t> premises;
    for (const auto& p : d.premises) premises.push_back(record(p));
    std::size_t idx = add(DerivationStep{d.rule, std::move(premises), d.conclusion});
    sub_steps_.emplace(ax, idx);
    return idx;
  }

  const std::optional<StaticDerivation>& subsumes(const Concept& c, const Concept& d) {
    auto key = std::make_pair(c, d);
    auto it = sub_cache_.find(key);
    if (it == sub_cache_.end()) {
      it = sub_cache_.emplace(key, derive_subsumption(sat_.base.tbox, c, d)).first;
    }
    return it->second;
  }

  // All steps applicable to the facts derived so far whose conclusion is new.
  // Conclusions may repeat within a round; the caller keeps the first.
  std::vector<DerivationStep> next_round() {
    std::vector<DerivationStep> out;
    const Name& ctx = sat_.base.context;
    std::set<Assertion> pending;
    auto propose = [&](Rule rule, std::vector<std::size_t> premises, Assertion concl) {
      if (sat_.derived.count(concl) || !pending.insert(concl).second) return;
      out.push_back(DerivationStep{rule, std::move(premises), std::move(concl)});
    };
    auto just = [&](const Assertion& a) { return sat_.justification.at(a); };

    for (const auto& [ind, concepts] : concepts_of_) {
      for (const auto& c : concepts) {
        Assertion premise = Assertion::member(ind, c, ctx);
        if (c.is(ConceptKind::And)) {
          propose(Rule::AndElim1, {just(premise)}, Assertion::member(ind, c.lhs(), ctx));
          propose(Rule::AndElim2, {just(premise)}, Assertion::member(ind, c.rhs(), ctx));
        }
        for (const auto& d : targets_) {
          if (d == c) continue;
          Assertion concl = Assertion::member(ind, d, ctx);
          if (sat_.derived.count(concl) || pending.count(concl)) continue;
          if (const auto& proof = subsumes(c, d)) {
            std::size_t sub = record(*proof);
            propose(Rule::TSub, {sub, just(premise)}, std::move(concl));
          }
        }
      }
      for (const auto& conj : conjunctions_) {
        if (concepts.count(conj.lhs()) && concepts.count(conj.rhs())) {
          propose(Rule::AndIntro,
                  {just(Assertion::member(ind, conj.lhs(), ctx)),
                   just(Assertion::member(ind, conj.rhs(), ctx))},
                  Assertion::member(ind, conj, ctx));
        }
      }
    }
    for (const auto& edge : roles_) {
      auto it = concepts_of_.find(edge.other);
      if (it == concepts_of_.end()) continue;
      for (const auto& c : it->second) {
        if (!relevant_.count(c)) continue;
        propose(Rule::ExistsIntro,
                {just(edge), just(Assertion::member(edge.other, c, ctx))},
                Assertion::member(edge.individual, Concept::exists(edge.role, c), ctx));
      }
    }
    return out;
  }

  std::size_t max_depth_;
  Saturation sat_;
  std::set<Concept> relevant_;
  std::set<Concept> targets_;
  std::vector<Concept> conjunctions_;
  std::map<Name, std::set<Concept>> concepts_of_;
  std::vector<Assertion> roles_;
  std::map<TBoxAxiom, std::size_t> sub_steps_;
  std::map<std::pair<Concept, Concept>, std::optional<StaticDerivation>> sub_cache_;
};

}  // namespace

Saturation saturate(const KnowledgeState& state, std::size_t max_depth) {
  return Saturator(state, max_depth).run();
}

std::optional<StaticDerivation> entails(const KnowledgeState& state, const Assertion& goal,
                                        std::size_t max_depth) {
  if (goal.context != state.context) {
    throw ContextError("goal '" + to_string(goal) + "' is not over context '" + state.context +
                       "'");
  }
  if (state.contains(goal)) {
    return StaticDerivation{goal.is_role() ? Rule::RAx : Rule::AAx, goal, {}};
  }
  auto sat = saturate(state, max_depth);
  auto it = sat.justification.find(goal);
  if (it == sat.justification.end()) return std::nullopt;
  return sat.tree(it->second);
}

std::vector<Assertion> find_clashes(const ABox& saturated) {
  std::set<Assertion> clash;
  for (const auto& a : saturated) {
    if (!a.is_concept()) continue;
    if (a.term.is(ConceptKind::Bottom)) clash.insert(a);
    if (a.term.is(ConceptKind::Not)) {
      auto positive = Assertion::member(a.individual, a.term.body(), a.context);
      if (saturated.count(positive)) {
        clash.insert(positive);
        clash.insert(a);
      }
    }
  }
  return {clash.begin(), clash.end()};
}

Compatibility check_t_compatibility(const TBox& tbox, const ABox& assertions,
                                    std::size_t max_depth) {
  std::map<Name, KnowledgeState> by_context;
  for (const auto& a : assertions) {
    auto& s = by_context[a.context];
    s.context = a.context;
    s.tbox = tbox;
    s.abox.insert(a);
  }
  Compatibility out;
  for (const auto& [ctx, state] : by_context) {
    auto clashes = find_clashes(saturate(state, max_depth).derived);
    out.clash.insert(out.clash.end(), clashes.begin(), clashes.end());
  }
  out.compatible = out.clash.empty();
  return out;
}

}  // namespace tapo
