#pragma once

// Context-indexed families of TAPO objects with declared restriction maps,
// functoriality and restriction-compatibility checks, and gluing over finite
// posets.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "tapo/kb.hpp"
#include "tapo/reasoner.hpp"

namespace tapo {

using Edge = std::pair<Name, Name>;  // (source U, target V) with V <= U

struct StateFamily {
  ContextPoset poset;
  std::map<Name, TapoObject> states;
  std::map<Edge, Restriction> restrictions;
  // Declared names; probe domains cover them even when no state uses them.
  std::set<Name> individuals;
  std::set<Name> concepts;
  std::set<Name> roles;

  static StateFamily from(const KnowledgeBase& kb);

  // Missing restrictions for declared edges, restrictions against the order.
  // Throws ConfigError.
  void validate() const;

  // Every path of declared restriction edges from u to v (u itself for u == v).
  std::vector<std::vector<Name>> paths(const Name& u, const Name& v) const;
};

// Restriction of a single oracle frame; frames without a declared map keep
// their names.
OracleFrame restrict_frame(const Restriction& r, const OracleFrame& frame);

// Throws ContextError when x is not over r.source and RestrictionFailure
// (prefixed with the program name) when a program cannot be restricted.
TapoObject restrict_state(const Restriction& r, const TapoObject& x);

KnowledgeState restrict_knowledge(const Restriction& r, const KnowledgeState& s);

// Assertion map of a path of restrictions.
std::optional<Assertion> restrict_along(const StateFamily& fam, const std::vector<Name>& path,
                                        const Assertion& a);

struct FunctorialityViolation {
  enum class Kind : std::uint8_t { MissingRestriction, NotRefinement, Identity, Composition, NotInjective };
  Kind kind;
  Name source;
  Name target;
  std::string detail;
};

std::string to_string(FunctorialityViolation::Kind k);

struct FunctorialityReport {
  std::vector<FunctorialityViolation> violations;
  std::size_t checked_pairs = 0;
  bool ok() const { return violations.empty(); }
};

// Finite domain over which maps out of u are compared: the object's ABox,
// program and payload assertions, restriction override keys, and atomic
// probes for every individual, concept name and role of the family.
ABox probe_domain(const StateFamily& fam, const Name& u);

FunctorialityReport check_functoriality(const StateFamily& fam);

enum class CompatStatus : std::uint8_t { Agree, Disagree, Vacuous, RestrictionFailed };

std::string to_string(CompatStatus s);

struct CompatEntry {
  Name source;
  Name target;
  Name item;  // query for oracle checks
  CompatStatus status = CompatStatus::Agree;
  std::string gate;  // where the two paths diverge (oracle checks)
  std::string detail;
};

struct CompatReport {
  std::vector<CompatEntry> entries;
  bool ok() const;  // no Disagree and no RestrictionFailed entries
};

using ProviderFactory = std::function<std::shared_ptr<GuardProvider>(const Name& context)>;

CompatReport check_procedure_compat(const StateFamily& fam, const Name& program,
                                    const ProviderFactory& providers,
                                    std::size_t fuel = kDefaultFuel);

// Throws ConfigError when an edge carries no frame map and the target has no
// frame of the same name.
CompatReport check_oracle_compat(const StateFamily& fam, const Name& frame,
                                 std::size_t max_depth = kDefaultMaxDepth);

struct Glued {
  TapoObject object;
  std::vector<Edge> vacuous_pairs;  // cover pairs without a meet
};

struct Conflict {
  Name left;
  Name right;
  std::optional<Assertion> left_assertion;
  std::optional<Assertion> right_assertion;
  std::string reason;
};

struct NotUnique {
  ABox first;
  ABox second;
  std::string reason;
};

struct GlueResult {
  std::variant<Glued, Conflict, NotUnique> result;

  bool glued() const { return std::holds_alternative<Glued>(result); }
  bool conflict() const { return std::holds_alternative<Conflict>(result); }
  bool not_unique() const { return std::holds_alternative<NotUnique>(result); }
};

// Throws ContextError for cover members not refining u or unreachable by
// declared restrictions.
GlueResult glue(const StateFamily& fam, const Name& u, const std::set<Name>& cover);

// Subsets of u's down-set of the given size whose restrictions jointly keep
// every assertion of the object at u.
std::vector<std::set<Name>> covers(const StateFamily& fam, const Name& u, std::size_t size);

// Family obtained by restricting the object at u to every context below it.
StateFamily restrict_family(const StateFamily& fam, const Name& u);

}  // namespace tapo
