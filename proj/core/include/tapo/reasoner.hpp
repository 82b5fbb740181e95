#pragma once

// Static TBox/ABox judgments by forward-chaining saturation.
//
// The assertion rules are T-Sub, And-I, And-E1/E2, Exists-I, A-Ax and R-Ax.
// The subsumption calculus behind T-Sub is reflexivity, transitivity,
// declared axioms, conjunction projection, bot-sub-C and C-sub-top. It is
// deliberately incomplete for ALC (no tableau).
//
// To keep the closure finite, And-I and Exists-I only build concepts over
// the "relevant" subconcepts occurring in the TBox or ABox: And-I produces a
// conjunction only if it occurs there, Exists-I produces exists r.C only if
// C occurs there. T-Sub targets are the right-hand sides of TBox axioms.

#include <cstddef>
#include <map>
#include <optional>
#include <variant>
#include <vector>

#include "tapo/rules.hpp"
#include "tapo/syntax.hpp"

namespace tapo {

inline constexpr std::size_t kDefaultMaxDepth = 32;

using Fact = std::variant<Assertion, TBoxAxiom>;

std::string to_string(const Fact& f);

// A static derivation as an explicit tree.
struct StaticDerivation {
  Rule rule = Rule::AAx;
  Fact conclusion;
  std::vector<StaticDerivation> premises;

  std::size_t size() const;
};

// One entry of a saturation trace. Premises are indices of earlier steps.
struct DerivationStep {
  Rule rule = Rule::AAx;
  std::vector<std::size_t> premises;
  Fact conclusion;
};

struct Saturation {
  KnowledgeState base;
  ABox derived;
  std::vector<DerivationStep> trace;
  std::size_t depth_used = 0;
  bool truncated = false;  // max_depth was reached before the fixpoint

  // Index of the step that first concluded each derived assertion.
  std::map<Assertion, std::size_t> justification;

  bool contains(const Assertion& a) const { return derived.count(a) > 0; }

  // Tree rooted at the given trace step.
  StaticDerivation tree(std::size_t step) const;
};

std::optional<StaticDerivation> derive_subsumption(const TBox& tbox, const Concept& c,
                                                   const Concept& d);

Saturation saturate(const KnowledgeState& state, std::size_t max_depth = kDefaultMaxDepth);

// Throws ContextError when the goal is tagged with another context.
std::optional<StaticDerivation> entails(const KnowledgeState& state, const Assertion& goal,
                                        std::size_t max_depth = kDefaultMaxDepth);

struct Compatibility {
  bool compatible = true;
  std::vector<Assertion> clash;  // saturated assertions taking part in a clash
};

// Clash: some a:bot@U, or both a:C@U and a:not C@U, in the saturation.
Compatibility check_t_compatibility(const TBox& tbox, const ABox& assertions,
                                    std::size_t max_depth = kDefaultMaxDepth);

// Clash search over an already saturated assertion set.
std::vector<Assertion> find_clashes(const ABox& saturated);

}  // namespace tapo
