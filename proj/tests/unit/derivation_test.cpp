#include <gtest/gtest.h>

#include "gen.hpp"
#include "tapo/derivation.hpp"
#include "tapo/error.hpp"
#include "tapo/parse.hpp"

using namespace tapo;

namespace {

const char* kKb = R"(
  signature { concepts A B C ReviewConsultationNeeded Hesitant individuals x v contexts U }
  tbox { A sub B  Hesitant sub ReviewConsultationNeeded }
  abox { x : A @ U }
  pbox U {
    program p { if x : A @ U then { add x : C @ U } else { skip } }
    program loop { while not x : C @ U do { add x : C @ U } }
    program ask { add v : Hesitant @ U ; consult q }
  }
  obox U {
    frame f {
      levels lo hi order lo < hi threshold hi
      query q "q?"
      response r for q trust hi { import x : C @ U cert k provenance }
      policy { accept if certs { provenance } default reject }
      hesitation q v
    }
  }
)";

struct Env {
  KnowledgeBase kb = parse_kb(kKb);
  const TapoObject& x = kb.object("U");
};

// Every single-field mutation of a valid tree must be rejected.
std::vector<ProofTree> mutants(const ProofTree& t) {
  std::vector<ProofTree> out;
  auto m = t;
  m.rule = t.rule == Rule::IfT ? Rule::IfF : Rule::IfT;
  out.push_back(m);
  if (auto* tr = std::get_if<TransJ>(&t.conclusion)) {
    auto bad = t;
    auto& j = std::get<TransJ>(bad.conclusion);
    j.after.abox.insert(Assertion::member("x", Concept::atom("B"), "U"));
    out.push_back(bad);
    (void)tr;
  }
  if (!t.children.empty()) {
    auto dropped = t;
    dropped.children.pop_back();
    out.push_back(dropped);
  }
  return out;
}

}  // namespace

TEST(Derivation, TransitionTreeChecks) {
  Env e;
  StateDerivedProvider prov;
  prov.set_name("state");
  auto t = derive_transition(e.x.state, e.x.pbox.at("p"), prov);
  ASSERT_TRUE(t);
  EXPECT_EQ(t->rule, Rule::IfT);
  CheckEnv env{{{"state", &prov}}, {}, 10, 32};
  EXPECT_TRUE(check_derivation(*t, env).valid);
  for (const auto& m : mutants(*t)) EXPECT_FALSE(check_derivation(m, env).valid);
}

TEST(Derivation, FuelIsEnforcedByTheChecker) {
  Env e;
  StateDerivedProvider prov;
  auto t = derive_transition(e.x.state, e.x.pbox.at("loop"), prov, 5);
  ASSERT_TRUE(t);
  CheckEnv env{{{prov.name(), &prov}}, {}, 5, 32};
  EXPECT_TRUE(check_derivation(*t, env).valid);
  env.fuel = 0;
  EXPECT_FALSE(check_derivation(*t, env).valid);
  EXPECT_FALSE(derive_transition(e.x.state, e.x.pbox.at("loop"), prov, 0));
}

TEST(Derivation, InteractiveAtomsCheckAgainstTheLog) {
  Env e;
  GuardProfile prof;
  prof.valuation[GuardAtom::of(Assertion::member("x", Concept::atom("A"), "U"))] = false;
  ScriptedProvider prov({{GuardAtom::of(Assertion::member("x", Concept::atom("A"), "U")), {false}}});
  prov.set_name("human");
  auto t = derive_transition(e.x.state, e.x.pbox.at("p"), prov);
  ASSERT_TRUE(t);
  EXPECT_EQ(t->rule, Rule::IfF);
  CheckEnv env{{{"human", &prov}}, {}, 10, 32};
  EXPECT_TRUE(check_derivation(*t, env).valid);
  auto forged = *t;
  std::get<GuardJ>(forged.children[0].conclusion).value = true;
  EXPECT_FALSE(check_derivation(forged, env).valid);
}

TEST(Derivation, ConsultAndOracleSteps) {
  Env e;
  StateDerivedProvider prov;
  auto t = derive_transition(e.x.state, e.x.pbox.at("ask"), prov, 10, &e.x.obox);
  ASSERT_TRUE(t);
  CheckEnv env{{{prov.name(), &prov}}, e.x.obox, 10, 32};
  EXPECT_TRUE(check_derivation(*t, env).valid);
  EXPECT_EQ(std::get<TransJ>(t->conclusion).after.abox.count(Assertion::member("x", Concept::atom("C"), "U")), 1u);

  auto o = derive_oracle_step(e.x.obox.at("f"), e.x.state, "q");
  EXPECT_EQ(o.rule, Rule::OracleAccept);
  EXPECT_TRUE(check_derivation(o, env).valid);
  auto wrong = o;
  wrong.witness = {{"nope"}};
  EXPECT_FALSE(check_derivation(wrong, env).valid);
  auto hold = o;
  hold.rule = Rule::OracleHold;
  EXPECT_FALSE(check_derivation(hold, env).valid);
}

TEST(Derivation, ConsultNeedsHesitation) {
  Env e;
  EXPECT_THROW(consult(e.x.state, e.x.obox.at("f"), "v", "q"), HesitationError);
  auto s = e.x.state;
  s.abox.insert(Assertion::member("v", Concept::atom("Hesitant"), "U"));
  auto r = consult(s, e.x.obox.at("f"), "v", "q");
  EXPECT_TRUE(r.report.accepted);
  EXPECT_EQ(r.tree.rule, Rule::Consult);
  EXPECT_THROW(consult(s, e.x.obox.at("f"), "x", "q"), ConfigError);
}

TEST(Derivation, StaticTreesLiftAndCheck) {
  Env e;
  auto d = entails(e.x.state, Assertion::member("x", Concept::atom("B"), "U"));
  ASSERT_TRUE(d);
  auto t = lift(*d, e.x.state);
  CheckEnv env;
  EXPECT_TRUE(check_derivation(t, env).valid);
  auto bad = t;
  std::get<AsrtJ>(bad.conclusion).assertion = Assertion::member("x", Concept::atom("C"), "U");
  auto v = check_derivation(bad, env);
  EXPECT_FALSE(v.valid);
  EXPECT_FALSE(v.reason.empty());
}

TEST(DerivationProperty, SmallHarness) {
  gen::Rng rng(8);
  auto v = gen::vocab(3, 3, 1);
  Corpus c;
  for (int i = 0; i < 150; ++i) {
    auto s = gen::state(rng, v, 3, 1, 1);
    auto atoms = gen::atoms(rng, v, 3);
    c.transitions.push_back({s, gen::program(rng, v, atoms, 4), std::make_shared<StateDerivedProvider>(), {}, {}});
    auto f = gen::frame(rng, v, "f", 2);
    c.oracle_steps.push_back({f, s, f.queries.begin()->first, {}});
  }
  for (int i = 0; i < 40; ++i) c.statics.push_back({gen::state(rng, v, 3, 2, 2)});
  auto rep = soundness_harness(c, 12, 8, 3);
  EXPECT_TRUE(rep.ok()) << (rep.ok() ? "" : rep.counterexamples[0].detail);
  EXPECT_EQ(rep.transitions, 150u);
  EXPECT_EQ(rep.oracle_steps, 150u);
}
