#pragma once

#include <iosfwd>

#include "tapo/guard.hpp"

namespace tapo {

// Prompts on out, reads one line per answer from in; EOF closes the channel.
class TerminalChannel : public QuestionChannel {
 public:
  TerminalChannel(std::istream& in, std::ostream& out) : in_(in), out_(out) {}

  std::optional<std::string> ask(const std::string& question_json) override;

 private:
  std::istream& in_;
  std::ostream& out_;
};

}  // namespace tapo
