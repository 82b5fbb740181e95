#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "tapo/error.hpp"
#include "tapo/parse.hpp"
#include "tapo/presheaf.hpp"

using namespace tapo;

namespace {

KnowledgeBase load(const std::string& name) {
  std::ifstream in(std::string(TAPO_FIXTURES) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_kb(ss.str());
}

const std::vector<std::string> kFamilies{"family-chain.tapo", "family-diamond.tapo", "family-conflict.tapo"};

}  // namespace

TEST(Presheaf, FixtureFamiliesAreFunctorial) {
  for (const auto& f : kFamilies) {
    auto fam = StateFamily::from(load(f));
    EXPECT_NO_THROW(fam.validate()) << f;
    auto rep = check_functoriality(fam);
    EXPECT_TRUE(rep.ok()) << f << ": " << (rep.violations.empty() ? "" : rep.violations[0].detail);
    EXPECT_GT(rep.checked_pairs, 0u) << f;
  }
}

TEST(Presheaf, PathDependentRestrictionsBreakComposition) {
  auto kb = parse_kb(R"(
    signature { concepts A individuals a b contexts U V1 V2 W }
    context { V1 <= U  V2 <= U  W <= V1  W <= V2 }
    restriction U -> V1 { individuals a b }
    restriction U -> V2 { individuals a b }
    restriction V1 -> W { individuals a }
    restriction V2 -> W { individuals b }
  )");
  auto rep = check_functoriality(StateFamily::from(kb));
  ASSERT_FALSE(rep.ok());
  bool composition = false;
  for (const auto& v : rep.violations) {
    composition = composition || v.kind == FunctorialityViolation::Kind::Composition;
  }
  EXPECT_TRUE(composition);
}

TEST(Presheaf, RestrictionDropsInvisibleAssertions) {
  auto kb = load("family-chain.tapo");
  const auto* r = kb.restriction("Floor", "Shelf");
  ASSERT_NE(r, nullptr);
  EXPECT_EQ(r->apply(Assertion::member("a", Concept::atom("Item"), "Floor")), std::nullopt);
  EXPECT_EQ(r->apply(Assertion::member("b", Concept::atom("Item"), "Floor")),
            Assertion::member("b", Concept::atom("Item"), "Shelf"));
  EXPECT_EQ(r->apply(Assertion::related("a", "b", "nextTo", "Floor")), std::nullopt);
  EXPECT_THROW(r->apply(Assertion::member("b", Concept::atom("Item"), "Shop")), ContextError);
}

// Restricting a single state down the poset and gluing it back over any
// two-element cover returns the state.
TEST(Presheaf, GlueAfterRestrictIsIdentity) {
  std::size_t glued = 0;
  for (const auto& f : {"family-chain.tapo", "family-diamond.tapo"}) {
    auto fam = StateFamily::from(load(f));
    for (const auto& u : fam.poset.elements()) {
      auto split = restrict_family(fam, u);
      for (const auto& cover : covers(split, u, 2)) {
        auto g = glue(split, u, cover);
        ASSERT_TRUE(g.glued()) << f << " at " << u;
        EXPECT_EQ(std::get<Glued>(g.result).object.state.abox, fam.states.at(u).state.abox) << f << " at " << u;
        ++glued;
      }
    }
  }
  EXPECT_GT(glued, 3u);
}

TEST(Presheaf, PlantedConflictNamesThePair) {
  auto fam = StateFamily::from(load("family-conflict.tapo"));
  auto g = glue(fam, "U", {"V1", "V2"});
  ASSERT_TRUE(g.conflict());
  const auto& c = std::get<Conflict>(g.result);
  EXPECT_EQ(c.left, "V1");
  EXPECT_EQ(c.right, "V2");
  ASSERT_TRUE(c.left_assertion && c.right_assertion);
  EXPECT_EQ(*c.left_assertion, Assertion::member("b", Concept::atom("Open"), "V1"));
  EXPECT_EQ(*c.right_assertion, Assertion::member("b", Concept::negation(Concept::atom("Open")), "V2"));
}

TEST(Presheaf, DiamondGluesCompatibleSections) {
  auto fam = StateFamily::from(load("family-diamond.tapo"));
  auto g = glue(fam, "U", {"V1", "V2"});
  ASSERT_TRUE(g.glued());
  const auto& abox = std::get<Glued>(g.result).object.state.abox;
  EXPECT_TRUE(abox.count(Assertion::related("a", "b", "links", "U")));
  EXPECT_TRUE(abox.count(Assertion::related("b", "c", "links", "U")));
  EXPECT_THROW(glue(fam, "V1", {"V2"}), ContextError);
}

TEST(Presheaf, ProcedureAndOracleCompatibility) {
  auto fam = StateFamily::from(load("family-chain.tapo"));
  auto pc = check_procedure_compat(fam, "tag", [](const Name&) { return std::make_shared<StateDerivedProvider>(); });
  EXPECT_TRUE(pc.ok());
  EXPECT_FALSE(pc.entries.empty());
  auto oc = check_oracle_compat(fam, "ratings");
  EXPECT_TRUE(oc.ok());
}

TEST(Presheaf, RestrictStateReportsTheProgram) {
  auto kb = parse_kb(R"(
    signature { concepts A individuals a b contexts U V }
    context { V <= U }
    pbox U { program p { add b : A @ U } }
    restriction U -> V { individuals a }
  )");
  try {
    restrict_state(*kb.restriction("U", "V"), kb.object("U"));
    FAIL();
  } catch (const RestrictionFailure& e) {
    EXPECT_EQ(e.program(), "p");
  }
}
