#include <gtest/gtest.h>

#include <fstream>
#include <sstream>
#include <thread>

#include "service.hpp"
#include "tapo/parse.hpp"

using namespace tapo;

namespace {

std::string slurp(const std::string& name) {
  std::ifstream in(std::string(TAPO_FIXTURES) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Http : public ::testing::Test {
 protected:
  void SetUp() override {
    service::install(server_, sessions_, TAPO_FIXTURES);
    port_ = server_.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port_, 0);
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
  }

  void TearDown() override {
    server_.stop();
    thread_.join();
  }

  httplib::Result post(const std::string& path, const Json& body) {
    return client_->Post(path, body.dump(), "application/json");
  }

  httplib::Server server_;
  SessionManager sessions_;
  int port_ = 0;
  std::thread thread_;
  std::unique_ptr<httplib::Client> client_;
};

}  // namespace

TEST_F(Http, SessionRoundTrip) {
  auto created = post("/sessions", {{"scenario", slurp("curry-v-interactive.yaml")}});
  ASSERT_TRUE(created);
  ASSERT_EQ(created->status, 201);
  auto id = Json::parse(created->body)["id"].get<std::string>();
  EXPECT_EQ(created->get_header_value("Location"), "/sessions/" + id);

  auto pending = client_->Get("/sessions/" + id + "/pending");
  ASSERT_EQ(pending->status, 200);
  EXPECT_EQ(Json::parse(pending->body)["kind"], "guard");

  for (const Json& a : {Json("t"), Json("t"), Json{{"trust", "high"}, {"certificates", {"p1"}}}, Json("high p2")}) {
    auto r = post("/sessions/" + id + "/answer", {{"answer", a}});
    ASSERT_EQ(r->status, 200) << r->body;
  }
  EXPECT_EQ(post("/sessions/" + id + "/answer", {{"answer", "maybe"}})->status, 400);
  Json last;
  while (client_->Get("/sessions/" + id + "/pending")->status == 200) {
    auto r = post("/sessions/" + id + "/answer", {{"answer", "t"}});
    ASSERT_EQ(r->status, 200);
    last = Json::parse(r->body);
  }
  EXPECT_EQ(last["status"], "completed");
  EXPECT_EQ(client_->Get("/sessions/" + id + "/pending")->status, 204);
  EXPECT_EQ(post("/sessions/" + id + "/answer", {{"answer", "t"}})->status, 409);

  auto batch = run_scenario(load_scenario(std::filesystem::path(TAPO_FIXTURES) / "curry-v.yaml"));
  EXPECT_EQ(last["state"]["abox"], to_json(batch.state.abox));

  EXPECT_EQ(client_->Delete("/sessions/" + id)->status, 204);
  EXPECT_EQ(client_->Get("/sessions/" + id)->status, 404);
  EXPECT_EQ(client_->Delete("/sessions/" + id)->status, 404);
}

TEST_F(Http, BadRequests) {
  EXPECT_EQ(client_->Post("/sessions", "not json", "application/json")->status, 400);
  EXPECT_EQ(post("/sessions", {{"fuel", 3}})->status, 400);
  EXPECT_EQ(post("/sessions", {{"scenario", "name: x\ncontext: U\nsteps: []\n"}})->status, 422);
  EXPECT_EQ(client_->Get("/sessions/nope")->status, 404);
  EXPECT_EQ(post("/sessions/nope/answer", {{"answer", "t"}})->status, 404);
}

TEST_F(Http, BatchScenarioCompletesImmediately) {
  auto created = post("/sessions", {{"scenario", slurp("search-stable.yaml")}});
  ASSERT_EQ(created->status, 201);
  auto body = Json::parse(created->body);
  EXPECT_EQ(body["status"], "completed");
  EXPECT_TRUE(body["pending"].is_null());
}
