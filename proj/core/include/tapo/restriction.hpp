#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "tapo/error.hpp"
#include "tapo/guard.hpp"
#include "tapo/syntax.hpp"

namespace tapo {

// Transport of one oracle frame along a restriction edge. Unlisted queries,
// levels, responses and certificates keep their names.
struct FrameMap {
  Name target_frame;
  std::map<Name, Name> queries;
  std::map<Name, Name> levels;
  std::map<Name, Name> responses;
  std::map<Name, Name> certificates;

  Name query(const Name& q) const;
  Name level(const Name& l) const;
  Name response(const Name& r) const;
  Name certificate(const Name& c) const;

  friend bool operator==(const FrameMap&, const FrameMap&) = default;
};

// Restriction rho_UV along a declared refinement V <= U.
//
// The assertion map relabels @U to @V on assertions whose individuals,
// concept names and roles are visible at V (an absent visibility set means
// everything is visible). Explicit overrides take precedence: a mapped
// assertion, or nullopt to drop it.
struct Restriction {
  Name source;
  Name target;
  std::optional<std::set<Name>> individuals;
  std::optional<std::set<Name>> concepts;
  std::optional<std::set<Name>> roles;
  std::map<Assertion, std::optional<Assertion>> overrides;
  std::map<Name, FrameMap> frames;

  static Restriction identity(const Name& context);

  // Throws ContextError for assertions not tagged with the source context.
  std::optional<Assertion> apply(const Assertion& a) const;

  // Subsumption atoms are context-free; they survive if their symbols are
  // visible.
  std::optional<GuardAtom> apply(const GuardAtom& a) const;

  bool visible(const Concept& c) const;

  // Injectivity of the assertion map on a finite domain; returns a colliding
  // pair if there is one.
  std::optional<std::pair<Assertion, Assertion>> collision(const ABox& domain) const;

  friend bool operator==(const Restriction&, const Restriction&) = default;
};

// Raised when restricting a program would drop an embedded assertion or
// guard atom, which would leave the restricted program ill-formed.
class RestrictionFailure : public Error {
 public:
  RestrictionFailure(const std::string& node, const std::string& what, const std::string& program = "")
      : Error(format(node, what, program)), node_(node), what_(what), program_(program) {}

  const std::string& node() const { return node_; }
  const std::string& dropped() const { return what_; }
  const std::string& program() const { return program_; }

  // Same failure attributed to a named program.
  RestrictionFailure in_program(const std::string& name) const { return {node_, what_, name}; }

 private:
  static std::string format(const std::string& node, const std::string& what, const std::string& program) {
    std::string msg = "restriction drops " + what + " in '" + node + "'";
    return program.empty() ? msg : "program '" + program + "': " + msg;
  }

  std::string node_;
  std::string what_;
  std::string program_;
};

}  // namespace tapo
