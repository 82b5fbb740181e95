#pragma once

// Explicit proof trees over the judgment kinds, a checker for the rule
// schemata, constructive derivations for transitions and oracle steps, the
// Consult rule, and the soundness harness that pairs derivations with the
// interpreter and the finite-model oracle.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tapo/guard.hpp"
#include "tapo/kb.hpp"
#include "tapo/obox.hpp"
#include "tapo/program.hpp"
#include "tapo/reasoner.hpp"

namespace tapo {

inline const Name kHesitationConcept = "ReviewConsultationNeeded";

// T |- C sub D
struct SubJ {
  TBox tbox;
  Concept sub;
  Concept super;
  friend bool operator==(const SubJ&, const SubJ&) = default;
};

// Sigma_U |- alpha
struct AsrtJ {
  KnowledgeState state;
  Assertion assertion;
  friend bool operator==(const AsrtJ&, const AsrtJ&) = default;
};

// guard judgment: gamma evaluates to value under the named provider at state
struct GuardJ {
  Name provider;
  KnowledgeState state;
  GuardExpr guard;
  bool value = false;
  friend bool operator==(const GuardJ&, const GuardJ&) = default;
};

// P : Sigma ~> Sigma'
struct TransJ {
  KnowledgeState before;
  Program program;
  KnowledgeState after;
  friend bool operator==(const TransJ&, const TransJ&) = default;
};

// q =>V Sigma'
struct OracleJ {
  KnowledgeState before;
  Name frame;
  Name query;
  KnowledgeState after;
  friend bool operator==(const OracleJ&, const OracleJ&) = default;
};

// ans(q) = r, the premise of the Query rule
struct AnswerJ {
  Name frame;
  Name query;
  Name response;
  friend bool operator==(const AnswerJ&, const AnswerJ&) = default;
};

using Judgment = std::variant<SubJ, AsrtJ, GuardJ, TransJ, OracleJ, AnswerJ>;

std::string to_string(const Judgment& j);

struct ProofTree {
  Judgment conclusion;
  Rule rule = Rule::Skip;
  std::vector<ProofTree> children;
  std::vector<std::vector<Name>> witness;  // Oracle-Accept: certificate ids of S, one set per stage
  std::optional<std::size_t> log_index;    // G-Atom: position in the provider's answer log

  std::size_t size() const;
  friend bool operator==(const ProofTree&, const ProofTree&) = default;
};

// Static derivations lifted to proof trees over the given state.
ProofTree lift(const StaticDerivation& d, const KnowledgeState& state);

struct CheckEnv {
  std::map<Name, GuardProvider*> providers;
  std::map<Name, OracleFrame> frames;
  std::size_t fuel = kDefaultFuel;
  std::size_t max_depth = kDefaultMaxDepth;
};

struct CheckVerdict {
  bool valid = true;
  std::vector<std::size_t> path;  // child indices from the root to the bad node
  std::string reason;
};

CheckVerdict check_derivation(const ProofTree& tree, const CheckEnv& env);

// Guard evaluation that records the derivation; atoms are resolved through
// the provider in the same order as eval_guard.
ProofTree derive_guard(GuardProvider& provider, const GuardExpr& guard, const KnowledgeState& state);

ProofTree derive_oracle_step(const OracleFrame& frame, const KnowledgeState& state, const Name& q,
                             std::size_t max_depth = kDefaultMaxDepth);

struct ConsultResult {
  KnowledgeState state;
  ProofTree tree;
  OracleReport report;
};

// Throws OracleError for inadmissible queries, ConfigError when the query is
// not associated with the individual, and HesitationError when
// individual:ReviewConsultationNeeded@U is not derivable.
ConsultResult consult(const KnowledgeState& state, const OracleFrame& frame, const Name& individual,
                      const Name& query, std::size_t max_depth = kDefaultMaxDepth);

// Frame among the object's OBox that admits the query, or nullptr.
const OracleFrame* frame_for_query(const std::map<Name, OracleFrame>& obox, const Name& query);

// Resolves consult(q) against an object's OBox through the hesitation table.
class ObjectConsultHandler : public ConsultHandler {
 public:
  explicit ObjectConsultHandler(const std::map<Name, OracleFrame>& obox,
                                std::size_t max_depth = kDefaultMaxDepth)
      : obox_(&obox), max_depth_(max_depth) {}

  KnowledgeState consult(const KnowledgeState& state, const Name& query) override;

  // Every consultation performed so far.
  const std::vector<ConsultResult>& results() const { return results_; }

 private:
  const std::map<Name, OracleFrame>* obox_;
  std::size_t max_depth_;
  std::vector<ConsultResult> results_;
};

// Constructive big-step derivation, independent of eval_program. Returns a
// tree exactly when the run ends in a final state within fuel.
std::optional<ProofTree> derive_transition(const KnowledgeState& state, const Program& prog,
                                           GuardProvider& provider, std::size_t fuel = kDefaultFuel,
                                           const std::map<Name, OracleFrame>* obox = nullptr,
                                           std::size_t max_depth = kDefaultMaxDepth);

struct TransitionCase {
  KnowledgeState state;
  Program program;
  std::shared_ptr<GuardProvider> provider;
  std::map<Name, OracleFrame> obox;
  std::optional<ProofTree> claimed;  // checked instead of the derived tree when set
};

struct OracleCase {
  OracleFrame frame;
  KnowledgeState state;
  Name query;
  std::optional<ProofTree> claimed;
};

struct StaticCase {
  KnowledgeState state;
};

struct Corpus {
  std::vector<TransitionCase> transitions;
  std::vector<OracleCase> oracle_steps;
  std::vector<StaticCase> statics;
};

struct Counterexample {
  std::string kind;  // transition, oracle, static
  std::size_t index = 0;
  std::string detail;
};

struct HarnessReport {
  std::size_t transitions = 0;
  std::size_t finals = 0;
  std::size_t oracle_steps = 0;
  std::size_t static_states = 0;
  std::size_t static_assertions = 0;
  std::vector<Counterexample> counterexamples;

  bool ok() const { return counterexamples.empty(); }
};

HarnessReport soundness_harness(const Corpus& corpus, std::size_t fuel = kDefaultFuel,
                                std::size_t max_depth = kDefaultMaxDepth,
                                std::size_t max_domain = 3);

}  // namespace tapo
