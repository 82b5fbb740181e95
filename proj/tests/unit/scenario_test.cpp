#include <gtest/gtest.h>

#include <cstdlib>

#include "tapo/error.hpp"
#include "tapo/parse.hpp"
#include "tapo/scenario.hpp"

using namespace tapo;

namespace {

std::filesystem::path fx(const std::string& name) { return std::filesystem::path(TAPO_FIXTURES) / name; }

bool has(const KnowledgeState& s, const std::string& text) {
  return std::any_of(s.abox.begin(), s.abox.end(), [&](const Assertion& a) { return to_string(a) == text; });
}

const std::vector<std::string> kBatch{"curry-u.yaml", "curry-v.yaml", "curry-v-lowtrust.yaml", "search-refine.yaml",
                                      "search-unstable.yaml", "search-stable.yaml", "browsing.yaml"};

const std::vector<std::string> kCurryV{"t", "t", "high p1", "high p2", "t", "t"};

}  // namespace

TEST(Scenario, FixturesConform) {
  for (const auto& f : kBatch) {
    auto r = run_scenario(load_scenario(fx(f)), {.derivations = true});
    EXPECT_TRUE(r.ok()) << f << ": " << (r.failures.empty() ? "" : r.failures[0]);
    EXPECT_TRUE(r.trace.chained()) << f;
    for (const auto& d : r.derivations) EXPECT_TRUE(d.verdict.valid) << f << " step " << d.step << ": " << d.verdict.reason;
  }
}

TEST(Scenario, CurryOutcomes) {
  auto u = run_scenario(load_scenario(fx("curry-u.yaml")));
  EXPECT_TRUE(has(u.state, "u : Orders(c1) @ U"));
  auto v = run_scenario(load_scenario(fx("curry-v.yaml")));
  EXPECT_TRUE(has(v.state, "v : Orders(c3) @ U"));
  EXPECT_TRUE(has(v.state, "v : ReducedSpiceRequest(c3) @ U"));
  auto low = run_scenario(load_scenario(fx("curry-v-lowtrust.yaml")));
  EXPECT_TRUE(has(low.state, "v : Orders(c2) @ U"));
  EXPECT_FALSE(has(low.state, "v : Orders(c3) @ U"));
}

TEST(Scenario, SearchUnfoldCounts) {
  auto stable = run_scenario(load_scenario(fx("search-stable.yaml")));
  ASSERT_TRUE(stable.ok());
  std::size_t unfolds = 0;
  for (const auto& e : stable.trace.events) {
    if (e.kind == "pbox-rule" && e.payload.value("rule", "") == "While-T") ++unfolds;
  }
  EXPECT_EQ(unfolds, 3u);
  auto unstable = run_scenario(load_scenario(fx("search-unstable.yaml")));
  EXPECT_TRUE(unstable.ok());
  EXPECT_EQ(unstable.steps.back().value("outcome", ""), "out-of-fuel");
}

TEST(Scenario, FuelPrecedence) {
  auto sc = load_scenario(fx("search-unstable.yaml"));
  EXPECT_EQ(resolve_fuel(sc, {}), 50u);
  EXPECT_EQ(resolve_fuel(sc, {.fuel = 7}), 7u);
  sc.fuel.reset();
  ::setenv("TAPO_FUEL", "11", 1);
  EXPECT_EQ(resolve_fuel(sc, {}), 11u);
  ::setenv("TAPO_FUEL", "lots", 1);
  EXPECT_THROW(resolve_fuel(sc, {}), ConfigError);
  ::unsetenv("TAPO_FUEL");
  EXPECT_EQ(resolve_fuel(sc, {}), kDefaultFuel);
  // The unfold count under a smaller budget breaks the scenario expectation.
  EXPECT_FALSE(run_scenario(load_scenario(fx("search-unstable.yaml")), {.fuel = 7}).ok());
}

TEST(Scenario, InteractiveNeedsAChannel) {
  auto sc = load_scenario(fx("curry-u-interactive.yaml"));
  EXPECT_TRUE(sc.needs_channel());
  EXPECT_THROW(run_scenario(sc), ConfigError);
  ReplayChannel none({});
  auto r = run_scenario(sc, {.channel = &none});
  EXPECT_EQ(r.status, RunResult::Status::Aborted);
  EXPECT_EQ(r.exit_code(), 2);
  EXPECT_TRUE(r.open_question.has_value());
}

TEST(Scenario, ReplayReproducesTheInteractiveRun) {
  auto sc = load_scenario(fx("curry-v-interactive.yaml"));
  ReplayChannel ch(kCurryV);
  auto live = run_scenario(sc, {.channel = &ch});
  ASSERT_TRUE(live.ok()) << (live.failures.empty() ? "" : live.failures[0]);
  EXPECT_TRUE(has(live.state, "v : Orders(c3) @ U"));

  auto replay = replay_scenario(sc, live.trace);
  EXPECT_FALSE(replay.needs_channel());
  auto batch = run_scenario(replay);
  ASSERT_TRUE(batch.ok());
  EXPECT_EQ(batch.state, live.state);
  ASSERT_EQ(batch.trace.events.size(), live.trace.events.size());
  for (std::size_t i = 0; i < live.trace.events.size(); ++i) {
    EXPECT_EQ(batch.trace.events[i].kind, live.trace.events[i].kind) << i;
    EXPECT_EQ(batch.trace.events[i].after, live.trace.events[i].after) << i;
  }
}

TEST(Scenario, InvalidAnswersAreAskedAgain) {
  auto sc = load_scenario(fx("curry-u-interactive.yaml"));
  ReplayChannel ch({"maybe", "f"});
  auto r = run_scenario(sc, {.channel = &ch});
  EXPECT_TRUE(r.ok());
  EXPECT_TRUE(has(r.state, "c3 : PreferredCandidate @ U"));
}

TEST(Scenario, ParseErrors) {
  EXPECT_THROW(parse_scenario("name: [unclosed"), SyntaxError);
  EXPECT_THROW(parse_scenario("name: x\ncontext: U\nsteps: []\n"), ConfigError);
  const std::string kb = "kb: |\n  signature { concepts A individuals a contexts U }\n  pbox U { program p { add a : A @ U } }\n";
  EXPECT_NO_THROW(parse_scenario("name: ok\ncontext: U\n" + kb + "steps:\n  - run: p\n"));
  EXPECT_THROW(parse_scenario("name: x\ncontext: W\n" + kb + "steps:\n  - run: p\n"), ContextError);
  EXPECT_THROW(parse_scenario("name: x\ncontext: U\n" + kb + "steps:\n  - run: nope\n"), UnknownNameError);
  EXPECT_THROW(parse_scenario("name: x\ncontext: U\n" + kb + "steps:\n  - run: p\n    provider: ghost\n"),
               UnknownNameError);
  EXPECT_THROW(parse_scenario("name: x\ncontext: U\n" + kb + "steps:\n  - fly: p\n"), ConfigError);
}

TEST(Scenario, ExpectationsAreReported) {
  const std::string text =
      "name: e\ncontext: U\nkb: |\n  signature { concepts A B individuals a contexts U }\n"
      "  pbox U { program p { add a : A @ U } }\n"
      "steps:\n  - run: p\nexpect:\n  contains: [\"a : B @ U\"]\n  absent: [\"a : A @ U\"]\n";
  auto r = run_scenario(parse_scenario(text));
  EXPECT_FALSE(r.ok());
  EXPECT_EQ(r.failures.size(), 2u);
  EXPECT_EQ(r.exit_code(), 1);
}

TEST(Scenario, OracleAnswerForms) {
  EXPECT_TRUE(OracleAnswer::parse("none").none);
  auto a = OracleAnswer::parse("high p1 t1");
  EXPECT_EQ(a.trust, "high");
  EXPECT_EQ(a.certificates, (std::vector<Name>{"p1", "t1"}));
  auto b = OracleAnswer::parse(R"({"trust": "low", "certificates": ["p2"]})");
  EXPECT_EQ(b.trust, "low");
  EXPECT_EQ(OracleAnswer::parse(b.to_json().dump()).certificates, b.certificates);
  EXPECT_THROW(OracleAnswer::parse(""), ConfigError);
}
