#include "tapo/rules.hpp"

#include <array>

namespace tapo {

namespace {

constexpr std::array<std::string_view, kRuleCount> kNames = {
    "T-Sub",     "And-I",      "And-E1",       "And-E2",      "Exists-I",   "A-Ax",
    "R-Ax",      "Sub-Refl",   "Sub-Trans",    "Sub-Axiom",   "Sub-ConjProj", "Sub-Bot",
    "Sub-Top",   "G-True",     "G-False",      "G-Atom",      "G-And-T",    "G-And-F1",
    "G-And-F2",  "G-Or-T1",    "G-Or-T2",      "G-Or-F",      "G-Not-T",    "G-Not-F",
    "Skip",      "Add",        "Del",          "Seq",         "If-T",       "If-F",
    "While-T",   "While-F",    "Consult",      "Query",       "Oracle-Accept",
    "Oracle-Hold", "Oracle-NoAnswer",
};

}  // namespace

std::string_view to_string(Rule r) { return kNames[static_cast<std::size_t>(r)]; }

std::optional<Rule> rule_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == s) return static_cast<Rule>(i);
  }
  return std::nullopt;
}

std::size_t rule_arity(Rule r) {
  switch (r) {
    case Rule::TSub:
    case Rule::AndIntro:
    case Rule::ExistsIntro:
    case Rule::SubTrans:
    case Rule::GuardAndT:
    case Rule::GuardOrF:
    case Rule::Seq:
    case Rule::IfT:
    case Rule::IfF:
    case Rule::Consult:
      return 2;
    case Rule::WhileT:
      return 3;
    case Rule::AndElim1:
    case Rule::AndElim2:
    case Rule::GuardAndF1:
    case Rule::GuardAndF2:
    case Rule::GuardOrT1:
    case Rule::GuardOrT2:
    case Rule::GuardNotT:
    case Rule::GuardNotF:
    case Rule::WhileF:
    case Rule::OracleAccept:
    case Rule::OracleHold:
      return 1;
    default:
      return 0;
  }
}

}  // namespace tapo
