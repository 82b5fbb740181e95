#pragma once

// Answer-driven sessions over a scenario. A session keeps the scenario and
// the answers given so far; every answer re-runs the scenario against the
// recorded answers, so the run is a pure function of (scenario, answers).

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "tapo/error.hpp"
#include "tapo/scenario.hpp"

namespace tapo {

// Answer given while no question is open.
class SessionError : public Error {
 public:
  using Error::Error;
};

class Session {
 public:
  enum class Status : std::uint8_t { Pending, Completed, Failed };

  Session(std::string id, Scenario scenario, std::optional<std::size_t> fuel = std::nullopt);

  const std::string& id() const { return id_; }
  Status status() const;
  std::optional<Json> pending() const;  // the open question, if any
  RunResult result() const;
  std::vector<std::string> answers() const;

  // Throws SessionError when nothing is pending and ConfigError when the
  // answer does not fit the pending question.
  void answer(const std::string& text);

  Json to_json() const;

 private:
  void advance();

  std::string id_;
  Scenario scenario_;
  std::optional<std::size_t> fuel_;
  mutable std::mutex mu_;
  std::vector<std::string> answers_;
  RunResult result_;
};

std::string to_string(Session::Status s);

// Canonical answer text for a JSON answer body: strings pass through,
// objects are serialized.
std::string answer_text(const Json& body);

class SessionManager {
 public:
  // Throws what parse_scenario throws.
  std::shared_ptr<Session> create(const std::string& scenario_yaml, const std::filesystem::path& base_dir = {},
                                  std::optional<std::size_t> fuel = std::nullopt);
  std::shared_ptr<Session> find(const std::string& id) const;
  bool erase(const std::string& id);
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_ = 1;
};

}  // namespace tapo
