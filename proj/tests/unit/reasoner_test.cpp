#include <gtest/gtest.h>

#include "gen.hpp"
#include "oracles.hpp"
#include "tapo/error.hpp"
#include "tapo/finite_models.hpp"
#include "tapo/parse.hpp"
#include "tapo/reasoner.hpp"

using namespace tapo;

namespace {

KnowledgeState kb_state(const std::string& text, const Name& ctx = "U") {
  return parse_kb(text).object(ctx).state;
}

const char* kChain = R"(
  signature { concepts A B C D E roles r individuals x y contexts U }
  tbox { A sub B  B sub C  C and D sub E }
  abox { x : A @ U  x : D @ U  (x, y) : r @ U  y : A @ U }
)";

}  // namespace

TEST(Reasoner, SubsumptionChain) {
  auto s = kb_state(kChain);
  auto a = Concept::atom("A"), c = Concept::atom("C");
  auto d = derive_subsumption(s.tbox, a, c);
  ASSERT_TRUE(d);
  EXPECT_EQ(d->rule, Rule::SubTrans);
  EXPECT_FALSE(derive_subsumption(s.tbox, c, a));
  EXPECT_TRUE(derive_subsumption(s.tbox, Concept::bottom(), a));
  EXPECT_TRUE(derive_subsumption(s.tbox, a, Concept::top()));
}

TEST(Reasoner, SaturationRules) {
  auto s = kb_state(kChain);
  auto sat = saturate(s);
  auto sig = parse_kb(kChain).signature;
  EXPECT_TRUE(sat.contains(parse_assertion("x : C @ U", sig)));
  EXPECT_TRUE(sat.contains(parse_assertion("x : C and D @ U", sig)));  // And-I on a relevant conjunction
  EXPECT_TRUE(sat.contains(parse_assertion("x : E @ U", sig)));
  EXPECT_FALSE(sat.contains(parse_assertion("x : A and D @ U", sig)));  // not relevant
  EXPECT_FALSE(sat.truncated);
  for (std::size_t i = 0; i < sat.trace.size(); ++i) {
    for (auto p : sat.trace[i].premises) EXPECT_LT(p, i);
  }
}

TEST(Reasoner, ExistsIntroIsRelevanceLimited) {
  auto s = kb_state(R"(
    signature { concepts A B roles r individuals x y contexts U }
    tbox { exists r . A sub B }
    abox { (x, y) : r @ U  y : A @ U }
  )");
  auto sat = saturate(s);
  EXPECT_TRUE(sat.contains(Assertion::member("x", Concept::exists("r", Concept::atom("A")), "U")));
  EXPECT_TRUE(sat.contains(Assertion::member("x", Concept::atom("B"), "U")));
}

TEST(Reasoner, EntailsRejectsForeignContext) {
  auto s = kb_state(kChain);
  EXPECT_THROW(entails(s, Assertion::member("x", Concept::atom("A"), "V"), 8), ContextError);
}

TEST(Reasoner, DerivationTreesAreWellFounded) {
  auto s = kb_state(kChain);
  auto d = entails(s, Assertion::member("x", Concept::atom("E"), "U"));
  ASSERT_TRUE(d);
  EXPECT_EQ(d->rule, Rule::TSub);
  EXPECT_GT(d->size(), 3u);
}

TEST(Reasoner, Clashes) {
  auto s = kb_state(R"(
    signature { concepts A B individuals x contexts U }
    tbox { A sub not B }
    abox { x : A @ U  x : B @ U }
  )");
  auto c = check_t_compatibility(s.tbox, s.abox);
  EXPECT_FALSE(c.compatible);
  EXPECT_FALSE(c.clash.empty());
  EXPECT_TRUE(check_t_compatibility(s.tbox, {Assertion::member("x", Concept::atom("A"), "U")}).compatible);
}

TEST(Reasoner, DepthLimitTruncates) {
  auto s = kb_state(kChain);
  auto sat = saturate(s, 1);
  EXPECT_TRUE(sat.truncated);
}

// The finite-model search agrees with plain enumeration on tiny signatures.
TEST(FiniteModels, AgreesWithEnumeration) {
  gen::Rng rng(11);
  auto v = gen::vocab(2, 2, 1);
  int checked = 0;
  for (int i = 0; i < 120; ++i) {
    auto s = gen::state(rng, v, 2, 1, 2);
    auto goal = gen::assertion(rng, v, 2);
    bool fast = holds_in_all_models(s.tbox, s.abox, goal, 2);
    bool slow = oracle::entails_by_enumeration(s.tbox, s.abox, goal, 2);
    EXPECT_EQ(fast, slow) << to_string(s) << "goal " << to_string(goal);
    ++checked;
  }
  EXPECT_EQ(checked, 120);
}

TEST(FiniteModels, CountermodelsAreModels) {
  gen::Rng rng(5);
  auto v = gen::vocab(3, 3, 1);
  for (int i = 0; i < 60; ++i) {
    auto s = gen::state(rng, v, 3, 2, 2);
    auto goal = gen::assertion(rng, v, 1);
    if (auto m = find_countermodel(s.tbox, s.abox, goal, 3)) {
      EXPECT_TRUE(m->satisfies(s.tbox));
      EXPECT_TRUE(m->satisfies(s.abox));
      EXPECT_FALSE(m->holds(goal));
    }
  }
}

// Everything saturation derives holds in every small model of the base.
TEST(ReasonerProperty, SaturationIsSound) {
  gen::Rng rng(3);
  auto v = gen::vocab(3, 3, 1);
  for (int i = 0; i < 80; ++i) {
    auto s = gen::state(rng, v, 4, 2, 2);
    auto sat = saturate(s, 6);
    for (const auto& a : sat.derived) {
      if (s.abox.count(a)) continue;
      EXPECT_TRUE(holds_in_all_models(s.tbox, s.abox, a, 3)) << to_string(s) << " derived " << to_string(a);
    }
  }
}
