#include "service.hpp"

namespace tapo::service {

namespace {

void send(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void error(httplib::Response& res, int status, const std::string& msg) {
  send(res, status, {{"error", msg}});
}

}  // namespace

void install(httplib::Server& server, SessionManager& sessions, std::filesystem::path root) {
  server.Post("/sessions", [&sessions, root](const httplib::Request& req, httplib::Response& res) {
    Json body = Json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object() || !body.contains("scenario") || !body["scenario"].is_string()) {
      return error(res, 400, "body must be {\"scenario\": \"<yaml>\"}");
    }
    std::optional<std::size_t> fuel;
    if (body.contains("fuel")) {
      if (!body["fuel"].is_number_unsigned()) return error(res, 400, "fuel must be a non-negative integer");
      fuel = body["fuel"].get<std::size_t>();
    }
    try {
      auto s = sessions.create(body["scenario"].get<std::string>(), root, fuel);
      res.set_header("Location", "/sessions/" + s->id());
      send(res, 201, s->to_json());
    } catch (const Error& e) {
      error(res, 422, e.what());
    }
  });

  server.Get(R"(/sessions/([^/]+))", [&sessions](const httplib::Request& req, httplib::Response& res) {
    auto s = sessions.find(req.matches[1]);
    if (!s) return error(res, 404, "no such session");
    send(res, 200, s->to_json());
  });

  server.Get(R"(/sessions/([^/]+)/pending)", [&sessions](const httplib::Request& req, httplib::Response& res) {
    auto s = sessions.find(req.matches[1]);
    if (!s) return error(res, 404, "no such session");
    auto q = s->pending();
    if (!q) {
      res.status = 204;
      return;
    }
    send(res, 200, *q);
  });

  server.Post(R"(/sessions/([^/]+)/answer)", [&sessions](const httplib::Request& req, httplib::Response& res) {
    auto s = sessions.find(req.matches[1]);
    if (!s) return error(res, 404, "no such session");
    Json body = Json::parse(req.body, nullptr, false);
    if (body.is_discarded()) return error(res, 400, "body is not JSON");
    try {
      s->answer(answer_text(body));
    } catch (const SessionError& e) {
      return error(res, 409, e.what());
    } catch (const ConfigError& e) {
      return error(res, 400, e.what());
    }
    send(res, 200, s->to_json());
  });

  server.Delete(R"(/sessions/([^/]+))", [&sessions](const httplib::Request& req, httplib::Response& res) {
    if (!sessions.erase(req.matches[1])) return error(res, 404, "no such session");
    res.status = 204;
  });
}

}  // namespace tapo::service
