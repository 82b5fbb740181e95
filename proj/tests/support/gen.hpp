#pragma once

// Seeded generators for property tests and the acceptance binary.

#include <cstdint>
#include <random>
#include <vector>

#include "tapo/guard.hpp"
#include "tapo/obox.hpp"
#include "tapo/presheaf.hpp"
#include "tapo/program.hpp"
#include "tapo/syntax.hpp"

namespace tapo::gen {

using Rng = std::mt19937_64;

struct Vocab {
  std::vector<Name> individuals;
  std::vector<Name> concepts;
  std::vector<Name> roles;
  Name context = "U";
};

Vocab vocab(std::size_t individuals, std::size_t concepts, std::size_t roles, Name context = "U");

std::size_t below(Rng& rng, std::size_t n);  // uniform in [0, n)
bool coin(Rng& rng, double p = 0.5);

template <class T>
const T& pick(Rng& rng, const std::vector<T>& v) {
  return v[below(rng, v.size())];
}

Concept concept_term(Rng& rng, const Vocab& v, std::size_t depth);
Assertion atomic_assertion(Rng& rng, const Vocab& v);  // a:A@U or (a,b):r@U
Assertion assertion(Rng& rng, const Vocab& v, std::size_t depth);
TBox tbox(Rng& rng, const Vocab& v, std::size_t axioms, std::size_t depth);
KnowledgeState state(Rng& rng, const Vocab& v, std::size_t assertions, std::size_t axioms,
                     std::size_t depth = 1);

std::vector<GuardAtom> atoms(Rng& rng, const Vocab& v, std::size_t n);
GuardExpr guard(Rng& rng, const std::vector<GuardAtom>& atoms, std::size_t depth);
GuardProfile profile(Rng& rng, const std::vector<GuardAtom>& atoms);

// Programs over add/del of atomic assertions and guards over the given
// atoms; queries, when non-empty, allow consult nodes.
Program program(Rng& rng, const Vocab& v, const std::vector<GuardAtom>& atoms, std::size_t depth,
                const std::vector<Name>& queries = {});

// Plain frame over the vocabulary. Every query has an answer unless
// sparse; payloads are atomic assertions, some of them clashing with the
// TBox when unsound is set (via a:not A).
OracleFrame frame(Rng& rng, const Vocab& v, const Name& name, std::size_t queries, bool sparse = true,
                  bool unsound = false);

}  // namespace tapo::gen
