#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "tapo/parse.hpp"
#include "tapo/session.hpp"

using namespace tapo;

namespace {

std::string slurp(const std::string& name) {
  std::ifstream in(std::string(TAPO_FIXTURES) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool has(const KnowledgeState& s, const std::string& text) {
  return std::any_of(s.abox.begin(), s.abox.end(), [&](const Assertion& a) { return to_string(a) == text; });
}

}  // namespace

TEST(Session, GuardQuestionsThenCompletion) {
  SessionManager m;
  auto s = m.create(slurp("curry-u-interactive.yaml"), TAPO_FIXTURES);
  EXPECT_EQ(s->id(), "s1");
  EXPECT_EQ(s->status(), Session::Status::Pending);
  auto q = s->pending();
  ASSERT_TRUE(q);
  EXPECT_EQ(q->value("kind", ""), "guard");
  EXPECT_THROW(s->answer("perhaps"), ConfigError);
  s->answer("f");
  EXPECT_EQ(s->status(), Session::Status::Completed);
  EXPECT_FALSE(s->pending());
  EXPECT_THROW(s->answer("t"), SessionError);
  EXPECT_TRUE(has(s->result().state, "c3 : PreferredCandidate @ U"));
  EXPECT_EQ(s->answers(), std::vector<std::string>{"f"});
}

TEST(Session, OracleQuestionsCheckLevelsAndCertificates) {
  SessionManager m;
  auto s = m.create(slurp("curry-v-interactive.yaml"), TAPO_FIXTURES);
  s->answer("t");
  s->answer("t");
  auto q = s->pending();
  ASSERT_TRUE(q);
  EXPECT_EQ(q->value("kind", ""), "oracle");
  EXPECT_EQ(q->value("query", ""), "q1");
  EXPECT_THROW(s->answer("stellar p1"), ConfigError);
  EXPECT_THROW(s->answer("high forged"), ConfigError);
  s->answer("high p1");
  s->answer("high p2");
  while (s->pending()) s->answer("t");
  ASSERT_EQ(s->status(), Session::Status::Completed);

  ReplayChannel ch(s->answers());
  auto direct = run_scenario(parse_scenario(slurp("curry-v-interactive.yaml"), TAPO_FIXTURES), {.channel = &ch});
  EXPECT_EQ(direct.state, s->result().state);
  EXPECT_EQ(s->to_json()["status"], "completed");
}

TEST(Session, ManagerLifecycle) {
  SessionManager m;
  auto a = m.create(slurp("curry-u.yaml"), TAPO_FIXTURES);
  auto b = m.create(slurp("curry-u-interactive.yaml"), TAPO_FIXTURES);
  EXPECT_EQ(a->status(), Session::Status::Completed);
  EXPECT_EQ(b->id(), "s2");
  EXPECT_EQ(m.find("s2"), b);
  EXPECT_EQ(m.size(), 2u);
  EXPECT_TRUE(m.erase("s1"));
  EXPECT_FALSE(m.erase("s1"));
  EXPECT_EQ(m.find("s1"), nullptr);
  EXPECT_THROW(m.create("name: [", TAPO_FIXTURES), SyntaxError);
}

TEST(Session, AnswerBodies) {
  EXPECT_EQ(answer_text(Json{{"answer", "t"}}), "t");
  EXPECT_EQ(answer_text(Json("f")), "f");
  auto obj = Json{{"trust", "high"}, {"certificates", {"p1"}}};
  EXPECT_EQ(Json::parse(answer_text(Json{{"answer", obj}})), obj);
}
