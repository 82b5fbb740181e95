#include "tapo/session.hpp"
#include <algorithm>

namespace tapo {

std::string to_string(Session::Status s) {
  switch (s) {
    case Session::Status::Pending: return "pending";
    case Session::Status::Completed: return "completed";
    case Session::Status::Failed: return "failed";
  }
  return "?";
}

std::string answer_text(const Json& body) {
  const Json& a = body.is_object() && body.contains("answer") ? body["answer"] : body;
  if (a.is_string()) return a.get<std::string>();
  if (a.is_object()) return a.dump();
  throw ConfigError("answer must be a string or an object");
}

Session::Session(std::string id, Scenario scenario, std::optional<std::size_t> fuel)
    : id_(std::move(id)), scenario_(std::move(scenario)), fuel_(fuel) {
  advance();
}

void Session::advance() {
  ReplayChannel channel(answers_);
  RunOptions options;
  options.fuel = fuel_;
  options.channel = &channel;
  result_ = run_scenario(scenario_, options);
}

Session::Status Session::status() const {
  std::lock_guard lock(mu_);
  if (result_.status == RunResult::Status::Aborted) return Status::Pending;
  return result_.ok() ? Status::Completed : Status::Failed;
}

std::optional<Json> Session::pending() const {
  std::lock_guard lock(mu_);
  if (!result_.open_question) return std::nullopt;
  return Json::parse(*result_.open_question);
}

RunResult Session::result() const {
  std::lock_guard lock(mu_);
  return result_;
}

std::vector<std::string> Session::answers() const {
  std::lock_guard lock(mu_);
  return answers_;
}

void Session::answer(const std::string& text) {
  std::lock_guard lock(mu_);
  if (!result_.open_question) throw SessionError("session '" + id_ + "' has no pending question");
  Json q = Json::parse(*result_.open_question);
  if (q["kind"] == "guard") {
    if (text != "t" && text != "f") throw ConfigError("guard answers are \"t\" or \"f\"");
  } else {
    auto a = OracleAnswer::parse(text);
    if (!a.none) {
      bool known = false;
      for (const auto& l : q["frame"]["levels"]) known = known || l == a.trust;
      if (!known) throw ConfigError("unknown trust level '" + a.trust + "'");
      std::vector<std::string> offered;
      if (q["response"].is_object()) {
        for (const auto& c : q["response"]["certificates"]) offered.push_back(c["id"]);
      }
      for (const auto& c : a.certificates) {
        if (std::find(offered.begin(), offered.end(), c) == offered.end()) {
          throw ConfigError("certificate '" + c + "' was not offered");
        }
      }
    }
  }
  answers_.push_back(text);
  advance();
}

Json Session::to_json() const {
  std::lock_guard lock(mu_);
  Json out = result_.to_json();
  Status st = result_.status == RunResult::Status::Aborted ? Status::Pending
            : result_.ok()                                   ? Status::Completed
                                                             : Status::Failed;
  out["id"] = id_;
  out["scenario"] = scenario_.name;
  out["status"] = to_string(st);
  out["answers"] = answers_;
  out["pending"] = result_.open_question ? Json::parse(*result_.open_question) : Json();
  return out;
}

std::shared_ptr<Session> SessionManager::create(const std::string& scenario_yaml,
                                                const std::filesystem::path& base_dir,
                                                std::optional<std::size_t> fuel) {
  Scenario sc = parse_scenario(scenario_yaml, base_dir);
  std::string id;
  {
    std::lock_guard lock(mu_);
    id = "s" + std::to_string(next_++);
  }
  auto s = std::make_shared<Session>(id, std::move(sc), fuel);
  std::lock_guard lock(mu_);
  sessions_[id] = s;
  return s;
}

std::shared_ptr<Session> SessionManager::find(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

bool SessionManager::erase(const std::string& id) {
  std::lock_guard lock(mu_);
  return sessions_.erase(id) > 0;
}

std::size_t SessionManager::size() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

}  // namespace tapo
