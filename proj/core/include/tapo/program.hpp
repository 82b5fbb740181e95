#pragma once

// The minimal imperative language over localized knowledge states and its
// fuel-bounded big-step interpreter.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tapo/guard.hpp"
#include "tapo/restriction.hpp"
#include "tapo/rules.hpp"
#include "tapo/syntax.hpp"

namespace tapo {

inline constexpr std::size_t kDefaultFuel = 1000;

enum class ProgramKind : std::uint8_t { Skip, Add, Del, Seq, If, While, Consult };

class Program {
 public:
  Program();  // skip

  static Program skip();
  static Program add(Assertion a);
  static Program del(Assertion a);
  static Program seq(Program first, Program second);
  static Program branch(GuardExpr guard, Program then_branch, Program else_branch);
  static Program loop(GuardExpr guard, Program body);
  static Program consult(Name query);

  ProgramKind kind() const { return kind_; }
  bool is(ProgramKind k) const { return kind_ == k; }

  const Assertion& assertion() const { return *assertion_; }
  const GuardExpr& guard() const { return guard_; }
  const Name& query() const { return query_; }
  const Program& first() const { return args_.at(0); }    // Seq
  const Program& second() const { return args_.at(1); }   // Seq
  const Program& then_branch() const { return args_.at(0); }
  const Program& else_branch() const { return args_.at(1); }
  const Program& body() const { return args_.at(0); }     // While

  std::size_t depth() const;
  std::size_t size() const;

  friend bool operator==(const Program& a, const Program& b);

 private:
  ProgramKind kind_ = ProgramKind::Skip;
  std::shared_ptr<const Assertion> assertion_;
  GuardExpr guard_;
  Name query_;
  std::vector<Program> args_;
};

// Canonical single-line DSL text. Sequences nest to the right; a left-nested
// sequence prints its first component in braces.
std::string to_string(const Program& p);

void collect_assertions(const Program& p, std::vector<Assertion>& out);
void collect_guard_atoms(const Program& p, std::set<GuardAtom>& out);

struct Final {
  KnowledgeState state;
};

struct OutOfFuel {
  KnowledgeState state;  // state at interruption
  std::size_t steps = 0;  // fuel units consumed
};

struct Failed {
  std::string error;
};

struct Outcome {
  std::variant<Final, OutOfFuel, Failed> result;

  bool is_final() const { return std::holds_alternative<Final>(result); }
  bool out_of_fuel() const { return std::holds_alternative<OutOfFuel>(result); }
  bool failed() const { return std::holds_alternative<Failed>(result); }

  const KnowledgeState& state() const;  // Final or OutOfFuel state
  const std::string& error() const;
};

std::string describe(const Outcome& o);

// Resolves consult(q) nodes. Implementations throw tapo::Error when the
// consultation's premise fails.
class ConsultHandler {
 public:
  virtual ~ConsultHandler() = default;
  virtual KnowledgeState consult(const KnowledgeState& state, const Name& query) = 0;
};

// Receives rule applications in evaluation order. Branch and loop decisions
// (If-T/F, While-T/F) are reported when taken, with before == after; Skip,
// Add, Del and Consult report the state change they make. Seq is structural
// and is not reported.
class ExecutionObserver {
 public:
  virtual ~ExecutionObserver() = default;
  virtual void on_guard(const GuardExpr& guard, bool value, const KnowledgeState& state) {
    (void)guard, (void)value, (void)state;
  }
  virtual void on_rule(Rule rule, const Program& p, const KnowledgeState& before,
                       const KnowledgeState& after) {
    (void)rule, (void)p, (void)before, (void)after;
  }
};

struct EvalHooks {
  ConsultHandler* consult = nullptr;
  ExecutionObserver* observer = nullptr;
};

// Each While-T unfolding and each consult consumes one unit of fuel.
Outcome eval_program(const KnowledgeState& state, const Program& prog, GuardProvider& provider,
                     std::size_t fuel = kDefaultFuel, EvalHooks hooks = {});

// Partial state transformer induced by eval_program: defined exactly where
// the outcome is Final. The provider is reset before every application.
class Denotation {
 public:
  Denotation(Program prog, std::shared_ptr<GuardProvider> provider, std::size_t fuel,
             ConsultHandler* consult = nullptr)
      : prog_(std::move(prog)), provider_(std::move(provider)), fuel_(fuel), consult_(consult) {}

  std::optional<KnowledgeState> operator()(const KnowledgeState& s) const;

  const Program& program() const { return prog_; }

 private:
  Program prog_;
  std::shared_ptr<GuardProvider> provider_;
  std::size_t fuel_;
  ConsultHandler* consult_;
};

Denotation denotation(Program prog, std::shared_ptr<GuardProvider> provider,
                      std::size_t fuel = kDefaultFuel);

// Relabels every embedded assertion and guard atom; throws RestrictionFailure
// naming the offending node when something would be dropped.
Program restrict_program(const Program& prog, const Restriction& restriction);

}  // namespace tapo
