#pragma once

// Finite-model oracle for the static layer. Interpretations range over
// domains {0..n-1} with n <= max_domain; individuals may share elements
// (no unique-name assumption). The search grounds ALC semantics into
// propositional clauses over the occurring symbols and runs a small DPLL,
// then re-checks any model it finds with a direct evaluator.

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <utility>

#include "tapo/syntax.hpp"

namespace tapo {

struct Interpretation {
  std::size_t domain = 0;
  std::map<Name, std::size_t> individuals;
  std::map<Name, std::set<std::size_t>> atoms;
  std::map<Name, std::set<std::pair<std::size_t, std::size_t>>> roles;

  // Direct recursive evaluation. Unknown atoms and roles are empty.
  bool member(const Concept& c, std::size_t x) const;
  bool holds(const Assertion& a) const;
  bool satisfies(const TBox& tbox) const;
  bool satisfies(const ABox& abox) const;
};

// A model of tbox and base in which goal fails, if one exists.
std::optional<Interpretation> find_countermodel(const TBox& tbox, const ABox& base,
                                                const Assertion& goal, std::size_t max_domain = 3);

// An interpretation of tbox with an element in c but not in d, if one exists.
std::optional<Interpretation> find_subsumption_countermodel(const TBox& tbox, const Concept& c,
                                                            const Concept& d,
                                                            std::size_t max_domain = 3);

inline bool holds_in_all_models(const TBox& tbox, const ABox& base, const Assertion& goal,
                                std::size_t max_domain = 3) {
  return !find_countermodel(tbox, base, goal, max_domain).has_value();
}

}  // namespace tapo
