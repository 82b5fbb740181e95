#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "gen.hpp"
#include "oracles.hpp"
#include "tapo/error.hpp"
#include "tapo/parse.hpp"

using namespace tapo;

namespace {

std::string read(const std::string& name) {
  std::ifstream in(std::string(TAPO_FIXTURES) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kReviews = R"(
  signature { concepts Mild Hot Adjustable individuals c2 c3 v contexts U }
  tbox { Hot sub not Mild }
  obox U {
    frame f {
      levels low medium high
      order low < medium < high
      threshold medium
      query q1 "mild?"
      query q2 "adjustable?"
      query q3 "unanswered"
      response r1 for q1 trust high { import c2 : Mild @ U cert p1 provenance source="site" }
      response r2 for q2 trust low { import c3 : Adjustable @ U cert p2 provenance }
      policy { accept if trust >= medium and certs { provenance } default reject }
      hesitation q1 v
    }
  }
)";

}  // namespace

TEST(Trust, OrderAndMeet) {
  TrustLattice t{{"low", "medium", "high"}, {{"low", "medium"}, {"medium", "high"}}, "medium"};
  EXPECT_TRUE(t.leq("low", "high"));
  EXPECT_FALSE(t.leq("high", "low"));
  EXPECT_EQ(t.meet("medium", "high"), "medium");
  t.threshold = "extreme";
  EXPECT_THROW(t.validate(), ConfigError);
}

TEST(Policy, FirstMatchingRuleWins) {
  TrustLattice t{{"low", "high"}, {{"low", "high"}}, "low"};
  ValidationPolicy pol;
  pol.rules.push_back({std::nullopt, {"timestamp"}, Verdict::Defer});
  pol.rules.push_back({Name("high"), {"provenance"}, Verdict::Accept});
  pol.fallback = Verdict::Reject;
  Response r{"r", {}, "high", {{"c1", "provenance", {}}, {"c2", "timestamp", {}}}, {}};
  EXPECT_EQ(pol.evaluate(t, r, r.certificates), Verdict::Defer);
  EXPECT_EQ(pol.evaluate(t, r, {r.certificates[0]}), Verdict::Accept);
  EXPECT_EQ(pol.evaluate(t, r, {}), Verdict::Reject);
  // Some subset is accepted, so the response validates with that witness.
  OracleFrame f;
  f.trust = t;
  f.policy = pol;
  auto v = validate(f, r);
  EXPECT_TRUE(v.validated);
  ASSERT_EQ(v.witness.size(), 1u);
  EXPECT_EQ(v.witness[0].id, "c1");
}

TEST(Oracle, AcceptHoldNoAnswer) {
  auto kb = parse_kb(kReviews);
  const auto& x = kb.object("U");
  const auto& f = x.obox.at("f");
  auto a = oracle_transition(f, x.state, "q1");
  EXPECT_TRUE(a.report.accepted);
  EXPECT_EQ(a.report.witness, std::vector<Name>{"p1"});
  EXPECT_EQ(a.state.abox.size(), 1u);
  auto h = oracle_transition(f, x.state, "q2");
  EXPECT_FALSE(h.report.accepted);
  EXPECT_EQ(h.report.cause, HoldReason::BelowThreshold);
  EXPECT_EQ(h.state, x.state);
  auto n = oracle_transition(f, x.state, "q3");
  EXPECT_EQ(n.report.cause, HoldReason::NoAnswer);
  EXPECT_THROW(oracle_transition(f, x.state, "q9"), OracleError);
  KnowledgeState other{{}, {}, "V"};
  EXPECT_THROW(oracle_transition(f, other, "q1"), ContextError);
}

TEST(Oracle, IncompatibleImportIsHeld) {
  auto kb = parse_kb(kReviews);
  auto x = kb.object("U");
  x.state.abox.insert(Assertion::member("c2", Concept::atom("Hot"), "U"));
  auto h = oracle_transition(x.obox.at("f"), x.state, "q1");
  EXPECT_FALSE(h.report.accepted);
  EXPECT_EQ(h.report.cause, HoldReason::TIncompatible);
  EXPECT_EQ(h.report.compat_gate, false);
  EXPECT_FALSE(h.report.clash.empty());
  EXPECT_EQ(h.state, x.state);
}

TEST(Oracle, CompositeIsAllOrNothing) {
  auto kb = parse_kb(R"(
    signature { concepts A B individuals x contexts U }
    obox U {
      frame f1 { levels lo hi order lo < hi threshold hi query a "a"
                 response ra for a trust hi { import x : A @ U cert k1 provenance }
                 policy { accept if certs { provenance } default reject } }
      frame f2 { levels lo hi order lo < hi threshold hi query b "b"
                 response rb for b trust lo { import x : B @ U }
                 policy { accept default reject } }
      frame f3 { levels lo hi order lo < hi threshold lo query c "c"
                 response rc for c trust lo { import x : B @ U }
                 policy { accept if certs { provenance } default reject } }
      compose g = f1 + f2
      compose h = f1 + f3
    }
  )");
  const auto& x = kb.object("U");
  auto g = oracle_transition(x.obox.at("g"), x.state, "a+b");
  EXPECT_FALSE(g.report.accepted);
  EXPECT_EQ(g.report.stage, 1u);
  EXPECT_EQ(g.state, x.state);  // stage one passed but nothing was imported
  // Stage two sees the provenance certificate carried from stage one.
  auto h = oracle_transition(x.obox.at("h"), x.state, "a+c");
  EXPECT_TRUE(h.report.accepted);
  EXPECT_EQ(h.state.abox.size(), 2u);
}

TEST(Audit, FlagsExactlyThePlantedResponses) {
  auto kb = parse_kb(read("obox-mutants.tapo"));
  const auto& x = kb.object("U");
  auto rep = audit_frame_soundness(x.obox.at("menu"), x.state.tbox);
  std::set<Name> flagged;
  for (const auto& v : rep.violations) flagged.insert(v.response);
  EXPECT_EQ(flagged, (std::set<Name>{"r_bad1", "r_bad2"}));
}

// Hold leaves the state alone, accept adds exactly the payload, and the
// outcome agrees with the brute-force reference.
TEST(OracleProperty, GateLaws) {
  gen::Rng rng(17);
  auto v = gen::vocab(3, 3, 1);
  int accepted = 0, held = 0;
  for (int i = 0; i < 300; ++i) {
    auto s = gen::state(rng, v, 3, 2, 1);
    auto f = gen::frame(rng, v, "f", 3, true, gen::coin(rng, 0.3));
    for (const auto& [q, text] : f.queries) {
      auto step = oracle_transition(f, s, q);
      auto ref = oracle::import(f, s, q);
      ASSERT_EQ(step.report.accepted, ref.has_value());
      if (step.report.accepted) {
        ++accepted;
        ABox expect = s.abox;
        expect.insert(f.answers.at(q).payload.begin(), f.answers.at(q).payload.end());
        EXPECT_EQ(step.state.abox, expect);
        EXPECT_EQ(step.state.abox, *ref);
        EXPECT_EQ(step.state.tbox, s.tbox);
      } else {
        ++held;
        EXPECT_EQ(step.state, s);
      }
    }
  }
  EXPECT_GT(accepted, 50);
  EXPECT_GT(held, 50);
}

TEST(OracleProperty, MonotoneThreshold) {
  gen::Rng rng(29);
  auto v = gen::vocab(3, 3, 0);
  for (int i = 0; i < 300; ++i) {
    auto s = gen::state(rng, v, 2, 1, 1);
    auto f = gen::frame(rng, v, "f", 2);
    auto lower = f;
    lower.trust.threshold = "low";
    auto higher = f;
    higher.trust.threshold = "high";
    for (const auto& [q, text] : f.queries) {
      bool hi = oracle_transition(higher, s, q).report.accepted;
      bool mid = oracle_transition(f, s, q).report.accepted;
      bool lo = oracle_transition(lower, s, q).report.accepted;
      EXPECT_TRUE(!hi || mid);
      EXPECT_TRUE(!mid || lo);
    }
  }
}

TEST(AuditProperty, RandomMutants) {
  gen::Rng rng(41);
  auto v = gen::vocab(3, 3, 0);
  for (int i = 0; i < 200; ++i) {
    TBox tbox = gen::tbox(rng, v, 2, 1);
    auto f = gen::frame(rng, v, "f", 4, true, true);
    std::set<Name> expected;
    for (const auto& [q, r] : f.answers) {
      if (oracle::validated(f, r) && !check_t_compatibility(tbox, r.payload).compatible) expected.insert(q);
    }
    std::set<Name> flagged;
    for (const auto& x : audit_frame_soundness(f, tbox).violations) flagged.insert(x.query);
    EXPECT_EQ(flagged, expected);
  }
}
