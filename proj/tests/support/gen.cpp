#include "gen.hpp"

#include <algorithm>

namespace tapo::gen {

Vocab vocab(std::size_t individuals, std::size_t concepts, std::size_t roles, Name context) {
  Vocab v;
  for (std::size_t i = 0; i < individuals; ++i) v.individuals.push_back("i" + std::to_string(i));
  for (std::size_t i = 0; i < concepts; ++i) v.concepts.push_back(std::string(1, static_cast<char>('A' + i)));
  for (std::size_t i = 0; i < roles; ++i) v.roles.push_back("r" + std::to_string(i));
  v.context = std::move(context);
  return v;
}

std::size_t below(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

Concept concept_term(Rng& rng, const Vocab& v, std::size_t depth) {
  if (depth == 0 || coin(rng, 0.4)) {
    if (coin(rng, 0.05)) return coin(rng) ? Concept::top() : Concept::bottom();
    return Concept::atom(pick(rng, v.concepts));
  }
  switch (below(rng, v.roles.empty() ? 3 : 5)) {
    case 0: return Concept::conj(concept_term(rng, v, depth - 1), concept_term(rng, v, depth - 1));
    case 1: return Concept::disj(concept_term(rng, v, depth - 1), concept_term(rng, v, depth - 1));
    case 2: return Concept::negation(concept_term(rng, v, depth - 1));
    case 3: return Concept::exists(pick(rng, v.roles), concept_term(rng, v, depth - 1));
    default: return Concept::forall(pick(rng, v.roles), concept_term(rng, v, depth - 1));
  }
}

Assertion atomic_assertion(Rng& rng, const Vocab& v) {
  if (!v.roles.empty() && coin(rng, 0.25)) {
    return Assertion::related(pick(rng, v.individuals), pick(rng, v.individuals), pick(rng, v.roles), v.context);
  }
  return Assertion::member(pick(rng, v.individuals), Concept::atom(pick(rng, v.concepts)), v.context);
}

Assertion assertion(Rng& rng, const Vocab& v, std::size_t depth) {
  if (!v.roles.empty() && coin(rng, 0.25)) return atomic_assertion(rng, v);
  return Assertion::member(pick(rng, v.individuals), concept_term(rng, v, depth), v.context);
}

TBox tbox(Rng& rng, const Vocab& v, std::size_t axioms, std::size_t depth) {
  TBox out;
  for (std::size_t i = 0; i < axioms; ++i) {
    TBoxAxiom ax{concept_term(rng, v, depth), concept_term(rng, v, depth)};
    if (std::find(out.begin(), out.end(), ax) == out.end()) out.push_back(std::move(ax));
  }
  return out;
}

KnowledgeState state(Rng& rng, const Vocab& v, std::size_t assertions, std::size_t axioms, std::size_t depth) {
  KnowledgeState s;
  s.context = v.context;
  s.tbox = tbox(rng, v, axioms, depth);
  for (std::size_t i = 0; i < assertions; ++i) s.abox.insert(assertion(rng, v, depth));
  return s;
}

std::vector<GuardAtom> atoms(Rng& rng, const Vocab& v, std::size_t n) {
  std::set<GuardAtom> seen;
  std::vector<GuardAtom> out;
  for (std::size_t tries = 0; out.size() < n && tries < 64 * n; ++tries) {
    GuardAtom a = coin(rng, 0.15)
                      ? GuardAtom::subsumption(Concept::atom(pick(rng, v.concepts)), Concept::atom(pick(rng, v.concepts)))
                      : GuardAtom::of(atomic_assertion(rng, v));
    if (seen.insert(a).second) out.push_back(std::move(a));
  }
  return out;
}

GuardExpr guard(Rng& rng, const std::vector<GuardAtom>& atoms, std::size_t depth) {
  if (depth == 0 || coin(rng, 0.3)) {
    if (atoms.empty() || coin(rng, 0.08)) return coin(rng) ? GuardExpr::truth() : GuardExpr::falsity();
    return GuardExpr::atom(pick(rng, atoms));
  }
  switch (below(rng, 3)) {
    case 0: return GuardExpr::conj(guard(rng, atoms, depth - 1), guard(rng, atoms, depth - 1));
    case 1: return GuardExpr::disj(guard(rng, atoms, depth - 1), guard(rng, atoms, depth - 1));
    default: return GuardExpr::negation(guard(rng, atoms, depth - 1));
  }
}

GuardProfile profile(Rng& rng, const std::vector<GuardAtom>& atoms) {
  GuardProfile p;
  for (const auto& a : atoms) p.valuation[a] = coin(rng);
  return p;
}

Program program(Rng& rng, const Vocab& v, const std::vector<GuardAtom>& atoms, std::size_t depth,
                const std::vector<Name>& queries) {
  auto leaf = [&]() -> Program {
    // Assertions drawn from the guard atoms make programs steer their own guards.
    auto target = [&]() {
      std::vector<Assertion> from;
      for (const auto& a : atoms) {
        if (a.is_assertion()) from.push_back(a.assertion);
      }
      return !from.empty() && coin(rng, 0.7) ? pick(rng, from) : atomic_assertion(rng, v);
    };
    std::size_t k = below(rng, queries.empty() ? 5 : 6);
    if (k == 0) return Program::skip();
    if (k <= 2) return Program::add(target());
    if (k <= 4) return Program::del(target());
    return Program::consult(pick(rng, queries));
  };
  if (depth <= 1 || coin(rng, 0.25)) return leaf();
  switch (below(rng, 4)) {
    case 0:
    case 1: return Program::seq(program(rng, v, atoms, depth - 1, queries), program(rng, v, atoms, depth - 1, queries));
    case 2:
      return Program::branch(guard(rng, atoms, 2), program(rng, v, atoms, depth - 1, queries),
                             program(rng, v, atoms, depth - 1, queries));
    default: return Program::loop(guard(rng, atoms, 2), program(rng, v, atoms, depth - 1, queries));
  }
}

OracleFrame frame(Rng& rng, const Vocab& v, const Name& name, std::size_t queries, bool sparse, bool unsound) {
  static const std::vector<Name> kKinds{"provenance", "timestamp", "agreement"};
  OracleFrame f;
  f.name = name;
  f.context = v.context;
  f.trust.levels = {"low", "medium", "high"};
  f.trust.order = {{"low", "medium"}, {"medium", "high"}};
  f.trust.threshold = pick(rng, std::vector<Name>{"low", "medium", "high"});
  std::vector<Name> levels(f.trust.levels.begin(), f.trust.levels.end());

  std::size_t rules = below(rng, 3);
  for (std::size_t i = 0; i < rules; ++i) {
    PolicyRule rule;
    if (coin(rng)) rule.trust_floor = pick(rng, levels);
    for (const auto& k : kKinds) {
      if (coin(rng, 0.35)) rule.required_kinds.insert(k);
    }
    rule.verdict = static_cast<Verdict>(below(rng, 3));
    f.policy.rules.push_back(std::move(rule));
  }
  if (coin(rng, 0.6)) {
    PolicyRule rule;
    rule.verdict = Verdict::Accept;
    rule.required_kinds.insert(pick(rng, kKinds));
    f.policy.rules.push_back(std::move(rule));
  }
  f.policy.fallback = coin(rng, 0.2) ? Verdict::Accept : (coin(rng) ? Verdict::Reject : Verdict::Defer);

  std::size_t cert = 0;
  for (std::size_t i = 0; i < queries; ++i) {
    Name q = name + "_q" + std::to_string(i);
    f.queries[q] = "question " + std::to_string(i);
    f.hesitation[q] = pick(rng, v.individuals);
    if (sparse && coin(rng, 0.15)) continue;
    Response r;
    r.id = name + "_r" + std::to_string(i);
    r.trust = pick(rng, levels);
    std::size_t n = 1 + below(rng, 3);
    for (std::size_t j = 0; j < n; ++j) {
      if (unsound && coin(rng, 0.3)) {
        r.payload.insert(Assertion::member(pick(rng, v.individuals),
                                           Concept::negation(Concept::atom(pick(rng, v.concepts))), v.context));
      } else {
        r.payload.insert(atomic_assertion(rng, v));
      }
    }
    std::size_t c = below(rng, 4);
    for (std::size_t j = 0; j < c; ++j) {
      r.certificates.push_back({"c" + std::to_string(cert++), pick(rng, kKinds), {}});
    }
    f.answers[q] = std::move(r);
  }
  f.validate();
  return f;
}

}  // namespace tapo::gen
