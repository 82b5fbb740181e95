#pragma once

// Guard expressions, guard profiles and the guard judgment. Guards are a
// metalevel layer: their atoms are valued by a provider, not by DL
// entailment, so branching never depends on non-derivability.

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tapo/syntax.hpp"

namespace tapo {

// Basic guard atom: an assertion or a subsumption (C sub D).
struct GuardAtom {
  enum class Kind : std::uint8_t { Assertion, Subsumption };

  Kind kind = Kind::Assertion;
  Assertion assertion;
  Concept sub;
  Concept super;

  static GuardAtom of(Assertion a);
  static GuardAtom subsumption(Concept c, Concept d);

  bool is_assertion() const { return kind == Kind::Assertion; }

  friend bool operator==(const GuardAtom&, const GuardAtom&) = default;
  friend std::strong_ordering operator<=>(const GuardAtom& a, const GuardAtom& b);
};

std::string to_string(const GuardAtom& atom);

enum class GuardKind : std::uint8_t { True, False, Atom, And, Or, Not };

class GuardExpr {
 public:
  GuardExpr();  // True

  static GuardExpr truth();
  static GuardExpr falsity();
  static GuardExpr atom(GuardAtom a);
  static GuardExpr atom(Assertion a) { return atom(GuardAtom::of(std::move(a))); }
  static GuardExpr conj(GuardExpr lhs, GuardExpr rhs);
  static GuardExpr disj(GuardExpr lhs, GuardExpr rhs);
  static GuardExpr negation(GuardExpr body);

  GuardKind kind() const { return kind_; }
  bool is(GuardKind k) const { return kind_ == k; }
  const GuardAtom& atom() const { return *atom_; }
  const GuardExpr& lhs() const { return args_.at(0); }
  const GuardExpr& rhs() const { return args_.at(1); }
  const GuardExpr& body() const { return args_.at(0); }

  std::size_t depth() const;

  friend bool operator==(const GuardExpr& a, const GuardExpr& b);
  friend std::strong_ordering operator<=>(const GuardExpr& a, const GuardExpr& b);

 private:
  GuardKind kind_ = GuardKind::True;
  std::shared_ptr<const GuardAtom> atom_;
  std::vector<GuardExpr> args_;
};

std::string to_string(const GuardExpr& g);

void collect_atoms(const GuardExpr& g, std::set<GuardAtom>& out);

// Total assignment of truth values to a declared atom set.
struct GuardProfile {
  std::map<GuardAtom, bool> valuation;

  bool defines(const GuardAtom& a) const { return valuation.count(a) > 0; }

  friend bool operator==(const GuardProfile&, const GuardProfile&) = default;
};

enum class ProviderKind : std::uint8_t { Static, StateDerived, Interactive, Scripted };

std::string to_string(ProviderKind k);

// One value handed out by a provider, in request order.
struct AtomAnswer {
  GuardAtom atom;
  bool value = false;

  friend bool operator==(const AtomAnswer&, const AtomAnswer&) = default;
};

// Realizes the guard profile of a configuration. Providers are consulted with
// the configuration's current state so that StateDerived valuations track
// the evolving ABox across loop unfoldings.
class GuardProvider {
 public:
  virtual ~GuardProvider() = default;

  virtual ProviderKind kind() const = 0;
  const std::string& name() const { return name_; }
  void set_name(std::string n) { name_ = std::move(n); }

  // Static and StateDerived providers are pure; the checker may re-query them.
  bool is_pure() const {
    return kind() == ProviderKind::Static || kind() == ProviderKind::StateDerived;
  }

  bool value(const GuardAtom& atom, const KnowledgeState& state);

  // Re-derives an atom without logging it. Only pure providers support this;
  // others throw GuardError.
  bool recompute(const GuardAtom& atom, const KnowledgeState& state);

  // Every value handed out so far, in request order.
  const std::vector<AtomAnswer>& answers() const { return log_; }

  // Starts a new run: clears the answer log and any per-run caches.
  virtual void reset();

 protected:
  virtual bool compute(const GuardAtom& atom, const KnowledgeState& state) = 0;

 private:
  std::string name_ = "default";
  std::vector<AtomAnswer> log_;
};

class StaticProvider : public GuardProvider {
 public:
  explicit StaticProvider(GuardProfile profile) : profile_(std::move(profile)) {}

  ProviderKind kind() const override { return ProviderKind::Static; }
  const GuardProfile& profile() const { return profile_; }

 protected:
  bool compute(const GuardAtom& atom, const KnowledgeState& state) override;

 private:
  GuardProfile profile_;
};

// Values atoms against the current state: assertion atoms by literal ABox
// membership, subsumption atoms by derive_subsumption. The entailment mode
// values assertion atoms by entails() instead; it is an extension and is off
// by default.
class StateDerivedProvider : public GuardProvider {
 public:
  enum class Mode : std::uint8_t { Literal, Entailment };

  explicit StateDerivedProvider(std::size_t max_depth = 32, Mode mode = Mode::Literal)
      : max_depth_(max_depth), mode_(mode) {}

  ProviderKind kind() const override { return ProviderKind::StateDerived; }
  Mode mode() const { return mode_; }
  std::size_t max_depth() const { return max_depth_; }

 protected:
  bool compute(const GuardAtom& atom, const KnowledgeState& state) override;

 private:
  std::size_t max_depth_;
  Mode mode_;
};

// Question channel to an external answerer. ask() returns the raw answer
// text, or nullopt once the channel is closed.
class QuestionChannel {
 public:
  virtual ~QuestionChannel() = default;
  virtual std::optional<std::string> ask(const std::string& question_json) = 0;
};

// Asks the channel once per atom per run and caches the answer, so a single
// run sees one consistent profile.
class InteractiveProvider : public GuardProvider {
 public:
  explicit InteractiveProvider(QuestionChannel& channel) : channel_(&channel) {}

  ProviderKind kind() const override { return ProviderKind::Interactive; }
  void reset() override;

 protected:
  bool compute(const GuardAtom& atom, const KnowledgeState& state) override;

 private:
  QuestionChannel* channel_;
  std::map<GuardAtom, bool> cache_;
};

// Replays a fixed value sequence per atom; the last value repeats. Used to
// model profiles that change between loop iterations (e.g. a user deciding
// a result set is stable after a number of revisions).
class ScriptedProvider : public GuardProvider {
 public:
  explicit ScriptedProvider(std::map<GuardAtom, std::vector<bool>> script)
      : script_(std::move(script)) {}

  ProviderKind kind() const override { return ProviderKind::Scripted; }
  void reset() override;

 protected:
  bool compute(const GuardAtom& atom, const KnowledgeState& state) override;

 private:
  std::map<GuardAtom, std::vector<bool>> script_;
  std::map<GuardAtom, std::size_t> calls_;
};

// Classical evaluation of a guard; atoms are resolved through the provider
// (left operands first, with short-circuiting).
bool eval_guard(GuardProvider& provider, const GuardExpr& guard, const KnowledgeState& state);

// Evaluation against a Static profile alone. Throws GuardError for atoms
// outside the profile's domain.
bool eval_guard(const GuardProfile& profile, const GuardExpr& guard);

GuardProfile derive_profile(const KnowledgeState& state, const std::set<GuardAtom>& atoms,
                            std::size_t max_depth = 32);

struct TruthTable {
  std::vector<GuardAtom> atoms;  // sorted; bit i of a row index is atoms[i]
  std::vector<bool> rows;        // rows[mask] = value under that valuation

  GuardProfile profile(std::size_t row) const;
};

inline constexpr std::size_t kMaxTruthTableAtoms = 16;

TruthTable truth_table(const GuardExpr& guard);

}  // namespace tapo
