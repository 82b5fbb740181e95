#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace tapo {

// Rule tags for every inference step the engine records. Static assertion
// rules, the subsumption calculus, guard clauses, PBox transitions and OBox
// import rules share one tag space so traces and proof trees use one
// vocabulary.
enum class Rule : std::uint8_t {
  // assertional
  TSub,
  AndIntro,
  AndElim1,
  AndElim2,
  ExistsIntro,
  AAx,
  RAx,
  // terminological
  SubRefl,
  SubTrans,
  SubAxiom,
  SubConjProj,
  SubBot,
  SubTop,
  // guard judgment
  GuardTrue,
  GuardFalse,
  GuardAtom,
  GuardAndT,
  GuardAndF1,
  GuardAndF2,
  GuardOrT1,
  GuardOrT2,
  GuardOrF,
  GuardNotT,
  GuardNotF,
  // procedural
  Skip,
  Add,
  Del,
  Seq,
  IfT,
  IfF,
  WhileT,
  WhileF,
  Consult,
  // oracle
  Query,
  OracleAccept,
  OracleHold,
  OracleNoAnswer,
};

inline constexpr int kRuleCount = static_cast<int>(Rule::OracleNoAnswer) + 1;

std::string_view to_string(Rule r);
std::optional<Rule> rule_from_string(std::string_view s);

// Number of premises a rule instance must carry.
std::size_t rule_arity(Rule r);

}  // namespace tapo
