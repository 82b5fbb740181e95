#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "httplib.h"
#include "service.hpp"
#include "tapo/error.hpp"
#include "tapo/json.hpp"
#include "tapo/parse.hpp"
#include "tapo/presheaf.hpp"
#include "tapo/scenario.hpp"
#include "terminal.hpp"

namespace fs = std::filesystem;
using tapo::Json;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw tapo::ConfigError("cannot read '" + p.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_json(const fs::path& p, const Json& j) {
  std::ofstream out(p);
  if (!out) throw tapo::ConfigError("cannot write '" + p.string() + "'");
  out << j.dump(2) << "\n";
}

void report(const tapo::Scenario& sc, const tapo::RunResult& r, std::ostream& out) {
  out << sc.name << ": ";
  if (r.status == tapo::RunResult::Status::Aborted) out << "aborted";
  else out << (r.ok() ? "ok" : "FAILED");
  out << " (" << r.trace.events.size() << " events, fuel " << r.fuel << ")\n";
  for (const auto& s : r.steps) {
    out << "  step " << s["step"].get<std::size_t>() + 1 << " " << s["kind"].get<std::string>();
    for (const char* k : {"program", "query", "goal", "outcome", "unfolds", "accepted", "derivable", "result"}) {
      if (s.contains(k)) out << " " << k << "=" << (s[k].is_string() ? s[k].get<std::string>() : s[k].dump());
    }
    out << "\n";
  }
  for (const auto& f : r.failures) out << "  failure: " << f << "\n";
  if (r.status == tapo::RunResult::Status::Completed) {
    out << "final state " << tapo::digest(r.state) << "\n";
    for (const auto& a : r.state.abox) out << "  " << tapo::to_string(a) << "\n";
  }
}

int run(const fs::path& file, std::optional<std::size_t> fuel, const std::string& trace_out,
        const std::string& derivations_dir) {
  auto sc = tapo::load_scenario(file);
  tapo::RunOptions opt;
  opt.fuel = fuel;
  opt.derivations = !derivations_dir.empty();
  auto r = tapo::run_scenario(sc, opt);
  report(sc, r, std::cout);
  if (!trace_out.empty()) write_json(trace_out, r.to_json());
  if (!derivations_dir.empty()) {
    fs::create_directories(derivations_dir);
    for (const auto& d : r.derivations) {
      Json j{{"step", d.step}, {"kind", d.kind}, {"verdict", tapo::to_json(d.verdict)}, {"tree", tapo::to_json(d.tree)}};
      write_json(fs::path(derivations_dir) / ("step-" + std::to_string(d.step + 1) + "-" + d.kind + ".json"), j);
    }
  }
  return r.exit_code();
}

int interactive(const fs::path& file, std::optional<std::size_t> fuel, const std::string& trace_out) {
  auto sc = tapo::load_scenario(file);
  tapo::TerminalChannel channel(std::cin, std::cout);
  tapo::RunOptions opt;
  opt.fuel = fuel;
  opt.channel = &channel;
  auto r = tapo::run_scenario(sc, opt);
  report(sc, r, std::cout);
  if (!trace_out.empty()) write_json(trace_out, r.to_json());
  return r.exit_code();
}

int check(const fs::path& file) {
  auto kb = tapo::parse_kb(slurp(file));
  bool ok = true;
  Json out{{"file", file.string()}};

  Json objects = Json::array();
  for (const auto& x : kb.objects) {
    auto compat = tapo::check_t_compatibility(x.state.tbox, x.state.abox);
    Json audits = Json::array();
    for (const auto& [name, frame] : x.obox) {
      auto a = tapo::audit_frame_soundness(frame, x.state.tbox);
      Json v = Json::array();
      for (const auto& s : a.violations) v.push_back({{"query", s.query}, {"response", s.response}});
      audits.push_back({{"frame", name}, {"sound", a.sound()}, {"violations", v}});
      ok = ok && a.sound();
    }
    Json clash = Json::array();
    for (const auto& c : compat.clash) clash.push_back(tapo::to_string(c));
    objects.push_back({{"context", x.context()},
                       {"assertions", x.state.abox.size()},
                       {"programs", x.pbox.size()},
                       {"frames", x.obox.size()},
                       {"consistent", compat.compatible},
                       {"clash", clash},
                       {"audits", audits}});
    ok = ok && compat.compatible;
  }
  out["objects"] = objects;

  auto fam = tapo::StateFamily::from(kb);
  fam.validate();
  auto f = tapo::check_functoriality(fam);
  out["functoriality"] = tapo::to_json(f);
  ok = ok && f.ok();
  out["ok"] = ok;
  std::cout << out.dump(2) << "\n";
  return ok ? 0 : 1;
}

int serve(const std::string& bind, const fs::path& root) {
  auto colon = bind.rfind(':');
  if (colon == std::string::npos) throw tapo::ConfigError("--bind expects HOST:PORT");
  std::string host = bind.substr(0, colon);
  int port = std::stoi(bind.substr(colon + 1));
  tapo::SessionManager sessions;
  httplib::Server server;
  tapo::service::install(server, sessions, root);
  std::cerr << "tapo: serving sessions on " << host << ":" << port << "\n";
  if (!server.listen(host, port)) throw tapo::ConfigError("cannot bind " + bind);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tapo: layered description-logic engine with procedural and oracle layers"};
  app.require_subcommand(1);

  std::string file, trace_out, derivations_dir, bind = "127.0.0.1:8080", root = ".";
  std::optional<std::size_t> fuel;

  auto* run_cmd = app.add_subcommand("run", "run a scenario in batch mode");
  run_cmd->add_option("file", file, "scenario file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--fuel", fuel, "fuel bound (overrides the scenario and TAPO_FUEL)");
  run_cmd->add_option("--trace", trace_out, "write the run and its trace as JSON");
  run_cmd->add_option("--emit-derivations", derivations_dir, "write checked proof trees to this directory");

  auto* int_cmd = app.add_subcommand("interactive", "run a scenario, prompting for interactive answers");
  int_cmd->add_option("file", file, "scenario file")->required()->check(CLI::ExistingFile);
  int_cmd->add_option("--fuel", fuel, "fuel bound");
  int_cmd->add_option("--trace", trace_out, "write the run and its trace as JSON");

  auto* check_cmd = app.add_subcommand("check", "parse a KB and check its invariants and functoriality");
  check_cmd->add_option("file", file, "KB file")->required()->check(CLI::ExistingFile);

  auto* serve_cmd = app.add_subcommand("serve", "serve the session API over HTTP");
  serve_cmd->add_option("--bind", bind, "HOST:PORT")->capture_default_str();
  serve_cmd->add_option("--root", root, "directory kb_file paths resolve against")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return run(file, fuel, trace_out, derivations_dir);
    if (*int_cmd) return interactive(file, fuel, trace_out);
    if (*check_cmd) return check(file);
    if (*serve_cmd) return serve(bind, root);
  } catch (const tapo::Error& e) {
    std::cerr << "tapo: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "tapo: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
