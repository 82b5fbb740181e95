#include <gtest/gtest.h>

#include "gen.hpp"
#include "tapo/error.hpp"
#include "tapo/parse.hpp"

using namespace tapo;

namespace {

Signature sig() {
  Signature s;
  s.concept_names = {"A", "B", "C", "D", "Orders(c1)"};
  s.role_names = {"r0", "r1"};
  s.individual_names = {"i0", "i1", "i2", "i3", "c1"};
  s.contexts.add_context("U");
  s.contexts.add_context("V");
  s.contexts.add_refinement("V", "U");
  return s;
}

}  // namespace

TEST(Syntax, ConceptPrecedence) {
  auto s = sig();
  auto c = parse_concept("A and B or not C", s);
  ASSERT_TRUE(c.is(ConceptKind::Or));
  EXPECT_TRUE(c.lhs().is(ConceptKind::And));
  EXPECT_TRUE(c.rhs().is(ConceptKind::Not));
  auto e = parse_concept("exists r0 . (A and B)", s);
  EXPECT_TRUE(e.is(ConceptKind::Exists));
  EXPECT_EQ(e.name(), "r0");
}

TEST(Syntax, Assertions) {
  auto s = sig();
  auto a = parse_assertion("i0 : A and B @ U", s);
  EXPECT_TRUE(a.is_concept());
  EXPECT_EQ(a.context, "U");
  auto r = parse_assertion("(i0, i1) : r1 @ V", s);
  EXPECT_TRUE(r.is_role());
  EXPECT_EQ(r.other, "i1");
  EXPECT_EQ(to_string(r), "(i0, i1) : r1 @ V");
}

TEST(Syntax, IndexedNamesAreSingleConcepts) {
  auto s = sig();
  auto a = parse_assertion("c1 : Orders(c1) @ U", s);
  ASSERT_TRUE(a.term.is(ConceptKind::Atom));
  EXPECT_EQ(a.term.name(), "Orders(c1)");
}

TEST(Syntax, UnknownNames) {
  auto s = sig();
  EXPECT_THROW(parse_assertion("zz : A @ U", s), UnknownNameError);
  EXPECT_THROW(parse_assertion("i0 : Z @ U", s), UnknownNameError);
  EXPECT_THROW(parse_assertion("(i0, i1) : q @ U", s), UnknownNameError);
}

TEST(Syntax, ErrorsCarryPositions) {
  auto s = sig();
  try {
    parse_program("if i0 : A @ U then { add i0 : B @ U } else", s);
    FAIL() << "expected SyntaxError";
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 1u);
    EXPECT_GT(e.column(), 1u);
  }
  EXPECT_THROW(parse_guard("i0 : A @ U and", s), SyntaxError);
  EXPECT_THROW(parse_concept("A and", s), SyntaxError);
}

TEST(Syntax, GuardForms) {
  auto s = sig();
  auto g = parse_guard("not [A sub B] or (i0 : A @ U and true)", s);
  ASSERT_TRUE(g.is(GuardKind::Or));
  EXPECT_TRUE(g.lhs().is(GuardKind::Not));
  EXPECT_FALSE(g.lhs().body().atom().is_assertion());
  EXPECT_TRUE(g.rhs().is(GuardKind::And));
}

TEST(Syntax, ProgramForms) {
  auto s = sig();
  auto p = parse_program("while not i0 : A @ U do { add i0 : A @ U ; skip } ; consult q1", s);
  ASSERT_TRUE(p.is(ProgramKind::Seq));
  EXPECT_TRUE(p.first().is(ProgramKind::While));
  EXPECT_EQ(p.second().query(), "q1");
}

// Printing then parsing returns the same tree.
TEST(SyntaxProperty, RoundTrip) {
  auto s = sig();
  gen::Rng rng(7);
  auto v = gen::vocab(4, 4, 2);
  for (int i = 0; i < 300; ++i) {
    auto c = gen::concept_term(rng, v, 4);
    EXPECT_EQ(parse_concept(to_string(c), s), c) << to_string(c);
    auto a = gen::assertion(rng, v, 3);
    EXPECT_EQ(parse_assertion(to_string(a), s), a) << to_string(a);
    auto atoms = gen::atoms(rng, v, 3);
    auto g = gen::guard(rng, atoms, 4);
    EXPECT_EQ(parse_guard(to_string(g), s), g) << to_string(g);
    auto p = gen::program(rng, v, atoms, 5, {"q1", "q2"});
    EXPECT_EQ(parse_program(to_string(p), s), p) << to_string(p);
  }
}

TEST(Syntax, KbSections) {
  auto kb = parse_kb(R"(
    signature { concepts A B individuals x contexts U V }
    context { V <= U }
    tbox { A sub B }
    abox { x : A @ U  x : A @ V }
    pbox U { program p { add x : B @ U } }
  )");
  EXPECT_EQ(kb.objects.size(), 2u);
  EXPECT_EQ(kb.object("U").state.tbox.size(), 1u);
  EXPECT_EQ(kb.object("V").state.abox.size(), 1u);
  EXPECT_TRUE(kb.object("U").pbox.count("p"));
  ASSERT_NE(kb.restriction("U", "V"), nullptr);
  EXPECT_THROW(kb.object("W"), ContextError);
}

TEST(Syntax, KbErrors) {
  EXPECT_THROW(parse_kb("signature { concepts A A contexts U }"), ConfigError);
  EXPECT_THROW(parse_kb("signature { concepts A contexts U } context { U <= W }"), ContextError);
  EXPECT_THROW(parse_kb("signature { concepts A contexts U } pbox U { program p { add x : A @ U } }"),
               UnknownNameError);
  EXPECT_THROW(parse_kb("signature { concepts A individuals x contexts U V } abox { x : A @ U } "
                        "pbox V { program p { add x : A @ U } }"),
               ContextError);
  EXPECT_THROW(parse_kb("signature { concepts A individuals x contexts U } "
                        "obox U { frame f { levels a query q } }"),
               ConfigError);  // no threshold
  EXPECT_THROW(parse_kb("signature { concepts A contexts U } bogus { }"), SyntaxError);
}

TEST(Syntax, DigestIsStable) {
  auto s = sig();
  KnowledgeState a{{}, {parse_assertion("i0 : A @ U", s), parse_assertion("i1 : B @ U", s)}, "U"};
  KnowledgeState b{{}, {parse_assertion("i1 : B @ U", s), parse_assertion("i0 : A @ U", s)}, "U"};
  EXPECT_EQ(digest(a), digest(b));
  EXPECT_EQ(digest(a).size(), 16u);
  b.abox.erase(b.abox.begin());
  EXPECT_NE(digest(a), digest(b));
}
