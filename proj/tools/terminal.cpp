#include "terminal.hpp"

#include <iostream>

#include "tapo/json.hpp"

namespace tapo {

std::optional<std::string> TerminalChannel::ask(const std::string& question_json) {
  Json q = Json::parse(question_json);
  if (q["kind"] == "guard") {
    out_ << "guard  " << q["atom"].get<std::string>() << "  [t/f]? " << std::flush;
  } else {
    out_ << "oracle  " << q["frame"]["name"].get<std::string>() << " / " << q["query"].get<std::string>() << ": "
         << q["text"].get<std::string>() << "\n";
    const auto& r = q["response"];
    if (r.is_null()) {
      out_ << "  no response available\n";
    } else {
      out_ << "  response " << r["id"].get<std::string>() << " imports";
      for (const auto& a : r["payload"]) out_ << " {" << a.get<std::string>() << "}";
      out_ << "\n  certificates:";
      for (const auto& c : r["certificates"]) out_ << " " << c["id"].get<std::string>() << "(" << c["kind"].get<std::string>() << ")";
      out_ << "\n";
    }
    out_ << "  trust levels:";
    for (const auto& l : q["frame"]["levels"]) out_ << " " << l.get<std::string>();
    out_ << "\n  answer '<level> [cert ...]' or 'none'> " << std::flush;
  }
  std::string line;
  if (!std::getline(in_, line)) {
    out_ << "\n";
    return std::nullopt;
  }
  while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
  return line;
}

}  // namespace tapo
