#pragma once

// Scenario files: a YAML document with an embedded KB-DSL block, provider
// specs, an ordered step list and expectations. The runner threads one state
// through the steps and records a digest-chained trace.

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tapo/derivation.hpp"
#include "tapo/json.hpp"
#include "tapo/kb.hpp"

namespace tapo {

struct ProviderSpec {
  ProviderKind kind = ProviderKind::StateDerived;
  StateDerivedProvider::Mode mode = StateDerivedProvider::Mode::Literal;
  GuardProfile profile;                           // static
  std::map<GuardAtom, std::vector<bool>> script;  // scripted
};

// A human-supplied oracle response: trust level and presented certificates
// for the frame's configured response, or no answer at all.
struct OracleAnswer {
  bool none = false;
  Name trust;
  std::vector<Name> certificates;

  // Accepts "none", a JSON object {"trust", "certificates"} or the short
  // form "<level> [cert-id ...]". Throws ConfigError.
  static OracleAnswer parse(const std::string& text);
  Json to_json() const;
};

struct Step {
  enum class Kind : std::uint8_t { Run, Consult, Check, Glue };

  Kind kind = Kind::Run;
  Name program;              // run
  Name provider = "default"; // run
  Name individual;           // consult
  Name query;                // consult
  Assertion goal;            // check
  std::set<Name> cover;      // glue
  Name glue_context;         // glue

  std::optional<std::string> expect_outcome;  // run: final, out-of-fuel, failed
  std::optional<std::size_t> expect_unfolds;  // run: While-T count
  bool expect_derivable = true;               // check
  std::optional<std::string> expect_glue;     // glue: glued, conflict, not-unique
  std::optional<bool> expect_accepted;        // consult
};

std::string to_string(Step::Kind k);

struct Scenario {
  Name name;
  std::string kb_text;
  KnowledgeBase kb;
  Name context;
  std::optional<std::size_t> fuel;
  std::size_t max_depth = kDefaultMaxDepth;
  std::map<Name, ProviderSpec> providers;
  bool interactive_oracle = false;
  std::vector<OracleAnswer> oracle_answers;  // replayed answers for interactive frames
  std::vector<Step> steps;
  std::vector<Assertion> expect_contains;
  std::vector<Assertion> expect_absent;

  bool needs_channel() const;
};

// Throws SyntaxError, ConfigError, UnknownNameError or ContextError.
Scenario parse_scenario(const std::string& yaml, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);

struct TraceEvent {
  std::size_t step = 0;
  std::string kind;  // pbox-rule, guard, oracle-gate, consult, static-derivation, glue
  Json payload;
  std::string before;
  std::string after;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

struct Trace {
  std::vector<TraceEvent> events;

  // Each event's before digest equals the previous event's after digest.
  bool chained() const;
  Json to_json() const;
};

struct RunOptions {
  std::optional<std::size_t> fuel;   // command-line override
  QuestionChannel* channel = nullptr;
  bool derivations = false;          // collect and check proof trees
};

struct StepDerivation {
  std::size_t step = 0;
  std::string kind;
  ProofTree tree;
  CheckVerdict verdict;
};

struct RunResult {
  enum class Status : std::uint8_t { Completed, Aborted };

  Status status = Status::Completed;
  KnowledgeState state;
  Trace trace;
  std::vector<std::string> failures;  // step errors and unmet expectations
  std::optional<std::string> open_question;  // question left unanswered on abort
  std::vector<std::string> answers;          // every answer the channel supplied
  std::vector<StepDerivation> derivations;
  std::vector<Json> steps;  // per-step summary
  std::size_t fuel = 0;

  bool ok() const { return status == Status::Completed && failures.empty(); }
  int exit_code() const { return ok() ? 0 : (status == Status::Aborted ? 2 : 1); }
  Json to_json() const;
};

// Fuel: options.fuel, else the scenario's, else TAPO_FUEL, else the default.
std::size_t resolve_fuel(const Scenario& sc, const RunOptions& options);

// Throws ConfigError when the scenario needs a question channel and none is
// given.
RunResult run_scenario(const Scenario& sc, const RunOptions& options = {});

// Rewrites interactive providers as per-step Static profiles and interactive
// oracle answers as a replay list, using the answers recorded in a trace.
Scenario replay_scenario(const Scenario& sc, const Trace& trace);

// Channel that hands out a fixed list of answers, then closes.
class ReplayChannel : public QuestionChannel {
 public:
  explicit ReplayChannel(std::vector<std::string> answers) : answers_(std::move(answers)) {}

  std::optional<std::string> ask(const std::string& question_json) override;

  const std::optional<std::string>& unanswered() const { return unanswered_; }

 private:
  std::vector<std::string> answers_;
  std::size_t next_ = 0;
  std::optional<std::string> unanswered_;
};

}  // namespace tapo
