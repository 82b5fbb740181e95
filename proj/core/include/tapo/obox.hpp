#pragma once

// Strengthened oracle frames: admissible queries, responses with trust and
// certificates, rule-list validation policies, validated import with an
// explicit TBox-compatibility gate, soundness audits and frame composition.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tapo/reasoner.hpp"
#include "tapo/syntax.hpp"

namespace tapo {

// Preordered trust levels with a threshold.
struct TrustLattice {
  std::set<Name> levels;
  std::set<std::pair<Name, Name>> order;  // (lower, higher)
  Name threshold;

  // lower <= higher in the reflexive-transitive closure.
  bool leq(const Name& lower, const Name& higher) const;

  // Greatest lower bound in the closure, if one exists (ties between
  // equivalent levels resolve to the smallest name).
  std::optional<Name> meet(const Name& a, const Name& b) const;

  // Throws ConfigError if the threshold is undeclared or an edge names an
  // unknown level.
  void validate() const;

  friend bool operator==(const TrustLattice&, const TrustLattice&) = default;
};

struct Certificate {
  Name id;
  Name kind;  // provenance, timestamp, source-agreement, ...
  std::map<Name, std::string> attributes;

  friend bool operator==(const Certificate&, const Certificate&) = default;
};

struct Response {
  Name id;
  ABox payload;
  Name trust;
  std::vector<Certificate> certificates;
  // Stage responses of a composite frame, in stage order.
  std::vector<Response> parts;

  friend bool operator==(const Response&, const Response&) = default;
};

enum class Verdict : std::uint8_t { Accept, Reject, Defer };

std::string to_string(Verdict v);

struct PolicyRule {
  std::optional<Name> trust_floor;  // response trust must be at least this
  std::set<Name> required_kinds;    // certificate kinds the set S must contain
  Verdict verdict = Verdict::Accept;

  friend bool operator==(const PolicyRule&, const PolicyRule&) = default;
};

// First matching rule wins; the default applies when nothing matches.
struct ValidationPolicy {
  std::vector<PolicyRule> rules;
  Verdict fallback = Verdict::Reject;

  // val(r, S) for a certificate set S.
  Verdict evaluate(const TrustLattice& trust, const Response& r,
                   const std::vector<Certificate>& certs) const;

  friend bool operator==(const ValidationPolicy&, const ValidationPolicy&) = default;
};

struct OracleFrame {
  Name name;
  Name context;
  std::map<Name, std::string> queries;  // admissible queries with display text
  std::map<Name, Response> answers;     // partial answer map
  TrustLattice trust;
  ValidationPolicy policy;
  // Individual whose hesitation each query resolves (consult association).
  std::map<Name, Name> hesitation;
  // Composite frames: the stages and, per composite query, its stage queries.
  std::vector<OracleFrame> stages;
  std::map<Name, std::vector<Name>> stage_queries;

  bool admissible(const Name& q) const { return queries.count(q) > 0; }
  bool composite() const { return !stages.empty(); }

  // Checks the frame's internal invariants; throws ConfigError.
  void validate() const;

  friend bool operator==(const OracleFrame&, const OracleFrame&) = default;
};

// Throws OracleError for inadmissible queries.
std::optional<Response> answer(const OracleFrame& frame, const Name& q);

enum class HoldReason : std::uint8_t {
  NoAnswer,
  BelowThreshold,
  Rejected,
  Deferred,
  TIncompatible,
};

std::string to_string(HoldReason r);

struct Validation {
  bool validated = false;
  std::vector<Certificate> witness;  // S with val(r, S) = accept
  std::optional<HoldReason> reason;  // set when held
};

Validation validate(const OracleFrame& frame, const Response& r);

// Gate-by-gate record of one oracle transition.
struct OracleReport {
  Name frame;
  Name query;
  std::optional<Name> response;
  bool accepted = false;
  std::optional<HoldReason> cause;
  std::optional<bool> trust_gate;  // trust >= threshold
  Name trust;
  Name threshold;
  std::optional<Verdict> policy_gate;  // best verdict over subsets
  std::vector<Name> witness;          // certificate ids of S
  std::optional<bool> compat_gate;
  std::vector<Assertion> clash;
  std::vector<Assertion> imported;
  std::size_t stage = 0;  // failing stage of a composite frame
};

struct OracleStep {
  KnowledgeState state;
  OracleReport report;
};

// Throws OracleError for inadmissible queries and ContextError when the frame
// and state disagree on the context.
OracleStep oracle_transition(const OracleFrame& frame, const KnowledgeState& state, const Name& q,
                             std::size_t max_depth = kDefaultMaxDepth);

struct SoundnessViolation {
  Name query;
  Name response;
  std::vector<Assertion> clash;
};

struct AuditReport {
  std::vector<SoundnessViolation> violations;
  bool sound() const { return violations.empty(); }
};

AuditReport audit_frame_soundness(const OracleFrame& frame, const TBox& tbox,
                                  std::size_t max_depth = kDefaultMaxDepth);

// Throws OracleError on context mismatch or query identifier collisions.
OracleFrame compose_frames(const OracleFrame& first, const OracleFrame& second);

}  // namespace tapo
