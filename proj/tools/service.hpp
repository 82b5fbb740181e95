#pragma once

// JSON-over-HTTP binding of tapo::SessionManager.
//
//   POST   /sessions               {"scenario": "<yaml>", "fuel"?: n}  -> 201
//   GET    /sessions/{id}          state, trace so far, pending question
//   GET    /sessions/{id}/pending  the open question, 204 when none
//   POST   /sessions/{id}/answer   {"answer": "t" | "f" | {...}}        -> session
//   DELETE /sessions/{id}                                               -> 204

#include <filesystem>

#include "httplib.h"
#include "tapo/session.hpp"

namespace tapo::service {

// kb_file references in posted scenarios resolve against root.
void install(httplib::Server& server, SessionManager& sessions, std::filesystem::path root);

}  // namespace tapo::service
