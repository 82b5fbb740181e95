#include "tapo/scenario.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "tapo/error.hpp"
#include "tapo/parse.hpp"
#include "tapo/presheaf.hpp"

namespace tapo {

std::string to_string(Step::Kind k) {
  switch (k) {
    case Step::Kind::Run: return "run";
    case Step::Kind::Consult: return "consult";
    case Step::Kind::Check: return "check";
    case Step::Kind::Glue: return "glue";
  }
  return "?";
}

OracleAnswer OracleAnswer::parse(const std::string& text) {
  OracleAnswer a;
  std::string trimmed = text;
  trimmed.erase(0, trimmed.find_first_not_of(" \t\r\n"));
  trimmed.erase(trimmed.find_last_not_of(" \t\r\n") + 1);
  if (trimmed == "none") {
    a.none = true;
    return a;
  }
  if (!trimmed.empty() && trimmed.front() == '{') {
    Json j = Json::parse(trimmed, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ConfigError("oracle answer is not a JSON object");
    if (j.value("none", false)) {
      a.none = true;
      return a;
    }
    if (!j.contains("trust") || !j["trust"].is_string()) {
      throw ConfigError("oracle answer needs a string 'trust' field");
    }
    a.trust = j["trust"].get<std::string>();
    if (j.contains("certificates")) {
      if (!j["certificates"].is_array()) throw ConfigError("'certificates' must be a list of ids");
      for (const auto& c : j["certificates"]) {
        if (!c.is_string()) throw ConfigError("certificate ids must be strings");
        a.certificates.push_back(c.get<std::string>());
      }
    }
    return a;
  }
  std::istringstream in(trimmed);
  if (!(in >> a.trust)) throw ConfigError("empty oracle answer");
  for (std::string id; in >> id;) a.certificates.push_back(id);
  return a;
}

Json OracleAnswer::to_json() const {
  if (none) return {{"none", true}};
  return {{"trust", trust}, {"certificates", certificates}};
}

bool Scenario::needs_channel() const {
  if (interactive_oracle) return true;
  return std::any_of(steps.begin(), steps.end(), [&](const Step& s) {
    if (s.kind != Step::Kind::Run) return false;
    auto it = providers.find(s.provider);
    return it != providers.end() && it->second.kind == ProviderKind::Interactive;
  });
}

namespace {

std::string str(const YAML::Node& n, const char* what) {
  if (!n || !n.IsScalar()) throw ConfigError(std::string("scenario field '") + what + "' must be a string");
  return n.as<std::string>();
}

std::size_t count(const YAML::Node& n, const char* what) {
  try {
    long long v = n.as<long long>();
    if (v < 0) throw ConfigError(std::string("scenario field '") + what + "' must be non-negative");
    return static_cast<std::size_t>(v);
  } catch (const YAML::Exception&) {
    throw ConfigError(std::string("scenario field '") + what + "' must be a count");
  }
}

bool boolean(const YAML::Node& n, const char* what) {
  try {
    return n.as<bool>();
  } catch (const YAML::Exception&) {
    throw ConfigError(std::string("scenario field '") + what + "' must be true or false");
  }
}

GuardAtom guard_atom(const std::string& text, const Signature& sig) {
  GuardExpr g = parse_guard(text, sig);
  if (!g.is(GuardKind::Atom)) throw ConfigError("'" + text + "' is not a guard atom");
  return g.atom();
}

ProviderSpec provider_spec(const YAML::Node& n, const Signature& sig, const Name& name) {
  ProviderSpec spec;
  std::string kind = n["kind"] ? str(n["kind"], "kind") : "state";
  if (kind == "static") {
    spec.kind = ProviderKind::Static;
    if (n["profile"] && !n["profile"].IsMap()) throw ConfigError("provider '" + name + "': profile must be a map");
    for (const auto& kv : n["profile"]) {
      spec.profile.valuation[guard_atom(kv.first.as<std::string>(), sig)] = boolean(kv.second, "profile");
    }
  } else if (kind == "state" || kind == "entailment") {
    spec.kind = ProviderKind::StateDerived;
    if (kind == "entailment") spec.mode = StateDerivedProvider::Mode::Entailment;
  } else if (kind == "interactive") {
    spec.kind = ProviderKind::Interactive;
  } else if (kind == "scripted") {
    spec.kind = ProviderKind::Scripted;
    if (!n["script"] || !n["script"].IsMap()) throw ConfigError("provider '" + name + "': script must be a map");
    for (const auto& kv : n["script"]) {
      std::vector<bool> values;
      for (const auto& v : kv.second) values.push_back(boolean(v, "script"));
      if (values.empty()) throw ConfigError("provider '" + name + "': empty script");
      spec.script[guard_atom(kv.first.as<std::string>(), sig)] = std::move(values);
    }
  } else {
    throw ConfigError("provider '" + name + "' has unknown kind '" + kind + "'");
  }
  return spec;
}

Step step_of(const YAML::Node& n, const Scenario& sc, std::size_t index) {
  if (!n.IsMap()) throw ConfigError("step " + std::to_string(index + 1) + " must be a map");
  const auto& sig = sc.kb.signature;
  const auto& x = sc.kb.object(sc.context);
  Step s;
  std::string where = "step " + std::to_string(index + 1);
  if (n["run"]) {
    s.kind = Step::Kind::Run;
    s.program = str(n["run"], "run");
    if (!x.pbox.count(s.program)) throw UnknownNameError("program", s.program);
    if (n["provider"]) s.provider = str(n["provider"], "provider");
    if (!sc.providers.count(s.provider)) throw UnknownNameError("provider", s.provider);
    if (n["outcome"]) {
      s.expect_outcome = str(n["outcome"], "outcome");
      if (*s.expect_outcome != "final" && *s.expect_outcome != "out-of-fuel" && *s.expect_outcome != "failed") {
        throw ConfigError(where + ": outcome must be final, out-of-fuel or failed");
      }
    }
    if (n["unfolds"]) s.expect_unfolds = count(n["unfolds"], "unfolds");
  } else if (n["consult"]) {
    s.kind = Step::Kind::Consult;
    s.query = str(n["consult"], "consult");
    s.individual = str(n["individual"], "individual");
    if (!sig.has_individual(s.individual)) throw UnknownNameError("individual", s.individual);
    if (!frame_for_query(x.obox, s.query)) throw ConfigError(where + ": no frame admits query '" + s.query + "'");
    if (n["accepted"]) s.expect_accepted = boolean(n["accepted"], "accepted");
  } else if (n["check"]) {
    s.kind = Step::Kind::Check;
    s.goal = parse_assertion(str(n["check"], "check"), sig);
    if (n["derivable"]) s.expect_derivable = boolean(n["derivable"], "derivable");
  } else if (n["glue"]) {
    s.kind = Step::Kind::Glue;
    for (const auto& c : n["glue"]) {
      Name ctx = c.as<std::string>();
      if (!sig.has_context(ctx)) throw ContextError("undeclared context '" + ctx + "'");
      s.cover.insert(ctx);
    }
    s.glue_context = n["context"] ? str(n["context"], "context") : sc.context;
    if (!sig.has_context(s.glue_context)) throw ContextError("undeclared context '" + s.glue_context + "'");
    if (n["result"]) {
      s.expect_glue = str(n["result"], "result");
      if (*s.expect_glue != "glued" && *s.expect_glue != "conflict" && *s.expect_glue != "not-unique") {
        throw ConfigError(where + ": result must be glued, conflict or not-unique");
      }
    }
  } else {
    throw ConfigError(where + " needs one of run, consult, check, glue");
  }
  return s;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

Scenario parse_scenario(const std::string& yaml, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml);
  } catch (const YAML::ParserException& e) {
    throw SyntaxError("scenario: " + e.msg, static_cast<std::size_t>(e.mark.line + 1),
                      static_cast<std::size_t>(e.mark.column + 1));
  }
  if (!root.IsMap()) throw ConfigError("scenario must be a YAML map");

  Scenario sc;
  sc.name = str(root["name"], "name");
  if (root["kb"]) {
    sc.kb_text = str(root["kb"], "kb");
  } else if (root["kb_file"]) {
    sc.kb_text = read_file(base_dir / str(root["kb_file"], "kb_file"));
  } else {
    throw ConfigError("scenario needs 'kb' or 'kb_file'");
  }
  sc.kb = parse_kb(sc.kb_text);
  sc.context = str(root["context"], "context");
  auto& x = sc.kb.object(sc.context);
  if (root["fuel"]) sc.fuel = count(root["fuel"], "fuel");
  if (root["max_depth"]) sc.max_depth = count(root["max_depth"], "max_depth");

  if (root["oracle"]) {
    std::string mode = str(root["oracle"], "oracle");
    if (mode != "batch" && mode != "interactive") throw ConfigError("oracle must be batch or interactive");
    sc.interactive_oracle = mode == "interactive";
  }
  for (const auto& a : root["oracle_answers"]) {
    sc.oracle_answers.push_back(OracleAnswer::parse(a.IsScalar() ? a.as<std::string>() : YAML::Dump(a)));
  }
  for (const auto& o : root["overrides"]) {
    Name frame = str(o["frame"], "frame"), query = str(o["query"], "query");
    auto it = x.obox.find(frame);
    if (it == x.obox.end()) throw ConfigError("override names unknown frame '" + frame + "'");
    auto r = it->second.answers.find(query);
    if (r == it->second.answers.end()) throw ConfigError("override: frame '" + frame + "' has no answer for '" + query + "'");
    if (o["trust"]) r->second.trust = str(o["trust"], "trust");
    it->second.validate();
  }

  sc.providers["default"] = ProviderSpec{};
  for (const auto& kv : root["providers"]) {
    Name n = kv.first.as<std::string>();
    sc.providers[n] = provider_spec(kv.second, sc.kb.signature, n);
  }
  if (!root["steps"] || !root["steps"].IsSequence()) throw ConfigError("scenario needs a 'steps' list");
  for (std::size_t i = 0; i < root["steps"].size(); ++i) sc.steps.push_back(step_of(root["steps"][i], sc, i));

  if (const auto& e = root["expect"]) {
    for (const auto& a : e["contains"]) sc.expect_contains.push_back(parse_assertion(a.as<std::string>(), sc.kb.signature));
    for (const auto& a : e["absent"]) sc.expect_absent.push_back(parse_assertion(a.as<std::string>(), sc.kb.signature));
  }
  for (const auto& a : sc.expect_contains) {
    if (a.context != sc.context) throw ContextError("expectation '" + to_string(a) + "' is not over " + sc.context);
  }
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  return parse_scenario(read_file(path), path.parent_path());
}

bool Trace::chained() const {
  for (std::size_t i = 1; i < events.size(); ++i) {
    if (events[i].before != events[i - 1].after) return false;
  }
  return true;
}

Json Trace::to_json() const {
  Json out = Json::array();
  for (const auto& e : events) {
    out.push_back({{"step", e.step}, {"kind", e.kind}, {"payload", e.payload}, {"before", e.before},
                   {"after", e.after}});
  }
  return out;
}

Json RunResult::to_json() const {
  Json out{{"status", status == Status::Completed ? "completed" : "aborted"},
           {"ok", ok()},
           {"fuel", fuel},
           {"state", tapo::to_json(state)},
           {"failures", failures},
           {"steps", steps},
           {"trace", trace.to_json()}};
  out["open_question"] = open_question ? Json::parse(*open_question, nullptr, false) : Json();
  return out;
}

std::size_t resolve_fuel(const Scenario& sc, const RunOptions& options) {
  if (options.fuel) return *options.fuel;
  if (sc.fuel) return *sc.fuel;
  if (const char* env = std::getenv("TAPO_FUEL")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0') return static_cast<std::size_t>(v);
    throw ConfigError("TAPO_FUEL must be a non-negative integer");
  }
  return kDefaultFuel;
}

std::optional<std::string> ReplayChannel::ask(const std::string& question_json) {
  if (next_ < answers_.size()) return answers_[next_++];
  unanswered_ = question_json;
  return std::nullopt;
}

namespace {

// Records every answer and whether the channel has closed.
class RecordingChannel : public QuestionChannel {
 public:
  explicit RecordingChannel(QuestionChannel* inner) : inner_(inner) {}

  std::optional<std::string> ask(const std::string& question_json) override {
    if (!inner_ || closed_) {
      closed_ = true;
      open_ = question_json;
      return std::nullopt;
    }
    auto a = inner_->ask(question_json);
    if (!a) {
      closed_ = true;
      open_ = question_json;
    } else {
      answers.push_back(*a);
    }
    return a;
  }

  bool closed() const { return closed_; }
  const std::optional<std::string>& open() const { return open_; }

  std::vector<std::string> answers;

 private:
  QuestionChannel* inner_;
  bool closed_ = false;
  std::optional<std::string> open_;
};

std::shared_ptr<GuardProvider> make_provider(const ProviderSpec& spec, QuestionChannel& channel,
                                             std::size_t max_depth) {
  switch (spec.kind) {
    case ProviderKind::Static: return std::make_shared<StaticProvider>(spec.profile);
    case ProviderKind::StateDerived: return std::make_shared<StateDerivedProvider>(max_depth, spec.mode);
    case ProviderKind::Interactive: return std::make_shared<InteractiveProvider>(channel);
    case ProviderKind::Scripted: return std::make_shared<ScriptedProvider>(spec.script);
  }
  return nullptr;
}

class Runner;

class Observer : public ExecutionObserver {
 public:
  Observer(Runner& runner, GuardProvider& provider) : runner_(runner), provider_(provider) {}

  void on_guard(const GuardExpr& guard, bool value, const KnowledgeState& state) override;
  void on_rule(Rule rule, const Program& p, const KnowledgeState& before,
               const KnowledgeState& after) override;

  std::size_t unfolds = 0;

 private:
  Runner& runner_;
  GuardProvider& provider_;
  std::size_t cursor_ = 0;
};

class Runner : public ConsultHandler {
 public:
  Runner(const Scenario& sc, const RunOptions& options)
      : sc_(sc), options_(options), channel_(options.channel), obox_(sc.kb.object(sc.context).obox) {
    result_.fuel = resolve_fuel(sc, options);
    result_.state = sc.kb.object(sc.context).state;
  }

  RunResult run() {
    for (step_ = 0; step_ < sc_.steps.size(); ++step_) {
      const auto& s = sc_.steps[step_];
      try {
        switch (s.kind) {
          case Step::Kind::Run: run_step(s); break;
          case Step::Kind::Consult: consult_step(s); break;
          case Step::Kind::Check: check_step(s); break;
          case Step::Kind::Glue: glue_step(s); break;
        }
      } catch (const Error& e) {
        if (!channel_.closed()) fail(std::string("error: ") + e.what());
      }
      if (channel_.closed()) {
        result_.status = RunResult::Status::Aborted;
        result_.open_question = channel_.open();
        break;
      }
      if (stopped_) break;
    }
    if (result_.status == RunResult::Status::Completed && !stopped_) {
      for (const auto& a : sc_.expect_contains) {
        if (!result_.state.contains(a)) result_.failures.push_back("expected '" + to_string(a) + "' in the final state");
      }
      for (const auto& a : sc_.expect_absent) {
        if (result_.state.contains(a)) result_.failures.push_back("expected '" + to_string(a) + "' to be absent");
      }
    }
    result_.answers = channel_.answers;
    return std::move(result_);
  }

  void event(std::string kind, Json payload, const KnowledgeState& before, const KnowledgeState& after) {
    result_.trace.events.push_back(TraceEvent{step_, std::move(kind), std::move(payload), digest(before), digest(after)});
  }

  KnowledgeState consult(const KnowledgeState& state, const Name& query) override {
    const auto* frame = frame_for_query(obox_, query);
    if (!frame) throw OracleError("no frame admits query '" + query + "'");
    auto it = frame->hesitation.find(query);
    if (it == frame->hesitation.end()) {
      throw ConfigError("query '" + query + "' has no hesitation association in frame '" + frame->name + "'");
    }
    return consult_with(state, *frame, it->second, query).state;
  }

 private:
  std::string where(const Step& s) const {
    std::string detail = s.kind == Step::Kind::Run ? s.program
                       : s.kind == Step::Kind::Consult ? s.query
                       : s.kind == Step::Kind::Check ? to_string(s.goal)
                                                     : s.glue_context;
    return "step " + std::to_string(step_ + 1) + " (" + to_string(s.kind) + " " + detail + ")";
  }

  void fail(std::string msg) {
    result_.failures.push_back(where(sc_.steps[step_]) + ": " + std::move(msg));
    stopped_ = true;
  }

  void mismatch(std::string msg) { result_.failures.push_back(where(sc_.steps[step_]) + ": " + std::move(msg)); }

  std::optional<OracleAnswer> next_oracle_answer(const OracleFrame& frame, const Name& query) {
    if (sc_.interactive_oracle) {
      Json q{{"kind", "oracle"}, {"frame", to_json(frame)}, {"query", query}, {"text", frame.queries.at(query)}};
      auto r = answer(frame, query);
      if (r) {
        Json certs = Json::array();
        for (const auto& c : r->certificates) certs.push_back({{"id", c.id}, {"kind", c.kind}});
        q["response"] = {{"id", r->id}, {"payload", to_json(r->payload)}, {"certificates", certs}, {"trust", r->trust}};
      } else {
        q["response"] = nullptr;
      }
      for (;;) {
        auto text = channel_.ask(q.dump());
        if (!text) throw OracleError("question channel closed");
        try {
          auto a = OracleAnswer::parse(*text);
          if (a.none || frame.trust.levels.count(a.trust)) return a;
        } catch (const ConfigError&) {
        }
      }
    }
    if (replayed_ < sc_.oracle_answers.size()) return sc_.oracle_answers[replayed_++];
    return std::nullopt;
  }

  OracleFrame effective(const OracleFrame& frame, const Name& query, const std::optional<OracleAnswer>& a) {
    if (!a) return frame;
    if (frame.composite()) throw ConfigError("answers for composite frame '" + frame.name + "' cannot be supplied");
    OracleFrame out = frame;
    if (a->none) {
      out.answers.erase(query);
      return out;
    }
    Response r;
    if (auto it = frame.answers.find(query); it != frame.answers.end()) r = it->second;
    else r.id = "answer-" + query;
    r.trust = a->trust;
    std::vector<Certificate> kept;
    for (const auto& c : r.certificates) {
      if (std::find(a->certificates.begin(), a->certificates.end(), c.id) != a->certificates.end()) kept.push_back(c);
    }
    r.certificates = std::move(kept);
    out.answers[query] = std::move(r);
    return out;
  }

  ConsultResult consult_with(const KnowledgeState& state, const OracleFrame& frame, const Name& individual,
                             const Name& query) {
    auto a = next_oracle_answer(frame, query);
    OracleFrame eff = effective(frame, query, a);
    auto res = tapo::consult(state, eff, individual, query, sc_.max_depth);
    event("consult",
          {{"individual", individual}, {"query", query}, {"frame", frame.name},
           {"hesitation", to_string(std::get<AsrtJ>(res.tree.children[0].conclusion).assertion)}},
          state, state);
    Json payload = to_json(res.report);
    if (a) payload["answer"] = a->to_json();
    event("oracle-gate", std::move(payload), state, res.state);
    effective_[frame.name] = eff;
    return res;
  }

  std::map<Name, OracleFrame> effective_obox() const {
    auto out = obox_;
    for (const auto& [name, f] : effective_) out[name] = f;
    return out;
  }

  void run_step(const Step& s) {
    const auto& spec = sc_.providers.at(s.provider);
    auto provider = make_provider(spec, channel_, sc_.max_depth);
    provider->set_name(s.provider);
    const auto& prog = sc_.kb.object(sc_.context).pbox.at(s.program);
    Observer obs(*this, *provider);
    KnowledgeState start = result_.state;
    effective_.clear();
    auto out = eval_program(start, prog, *provider, result_.fuel, EvalHooks{this, &obs});
    if (channel_.closed()) return;

    std::string status = out.is_final() ? "final" : out.out_of_fuel() ? "out-of-fuel" : "failed";
    Json summary{{"step", step_}, {"kind", "run"}, {"program", s.program}, {"outcome", status}, {"unfolds", obs.unfolds}};
    if (out.failed()) summary["error"] = out.error();
    result_.steps.push_back(summary);

    std::string expected = s.expect_outcome.value_or("final");
    if (status != expected) {
      std::string msg = "expected " + expected + ", got " + describe(out);
      if (out.failed()) fail(msg);
      else mismatch(msg);
    }
    if (s.expect_unfolds && *s.expect_unfolds != obs.unfolds) {
      mismatch("expected " + std::to_string(*s.expect_unfolds) + " unfoldings, got " + std::to_string(obs.unfolds));
    }
    if (out.failed()) {
      stopped_ = true;
      return;
    }
    // An interrupted run leaves the agent where it stopped.
    result_.state = out.state();

    if (options_.derivations && out.is_final()) {
      std::shared_ptr<GuardProvider> again;
      if (spec.kind == ProviderKind::Interactive) {
        GuardProfile profile;
        for (const auto& a : provider->answers()) profile.valuation[a.atom] = a.value;
        again = std::make_shared<StaticProvider>(profile);
      } else {
        again = make_provider(spec, channel_, sc_.max_depth);
      }
      again->set_name(s.provider);
      auto frames = effective_obox();
      auto tree = derive_transition(start, prog, *again, result_.fuel, &frames, sc_.max_depth);
      if (!tree) {
        mismatch("no derivation for a final run");
        return;
      }
      CheckEnv env{{{again->name(), again.get()}}, frames, result_.fuel, sc_.max_depth};
      auto verdict = check_derivation(*tree, env);
      if (!verdict.valid) mismatch("derivation check failed: " + verdict.reason);
      result_.derivations.push_back({step_, "run", std::move(*tree), verdict});
    }
  }

  void consult_step(const Step& s) {
    const auto* frame = frame_for_query(obox_, s.query);
    effective_.clear();
    auto res = consult_with(result_.state, *frame, s.individual, s.query);
    result_.steps.push_back({{"step", step_}, {"kind", "consult"}, {"query", s.query}, {"accepted", res.report.accepted}});
    if (s.expect_accepted && *s.expect_accepted != res.report.accepted) {
      mismatch(std::string("expected the response to be ") + (*s.expect_accepted ? "accepted" : "held"));
    }
    result_.state = res.state;
    if (options_.derivations) {
      auto frames = effective_obox();
      CheckEnv env{{}, frames, result_.fuel, sc_.max_depth};
      auto verdict = check_derivation(res.tree, env);
      if (!verdict.valid) mismatch("derivation check failed: " + verdict.reason);
      result_.derivations.push_back({step_, "consult", std::move(res.tree), verdict});
    }
  }

  void check_step(const Step& s) {
    auto d = entails(result_.state, s.goal, sc_.max_depth);
    Json payload{{"goal", to_string(s.goal)}, {"derivable", d.has_value()}};
    std::optional<ProofTree> tree;
    if (d) {
      tree = lift(*d, result_.state);
      payload["derivation"] = to_json(*tree);
    }
    event("static-derivation", std::move(payload), result_.state, result_.state);
    result_.steps.push_back({{"step", step_}, {"kind", "check"}, {"goal", to_string(s.goal)}, {"derivable", d.has_value()}});
    if (d.has_value() != s.expect_derivable) {
      mismatch("'" + to_string(s.goal) + "' is " + (d ? "" : "not ") + "derivable");
    }
    if (options_.derivations && tree) {
      CheckEnv env;
      env.max_depth = sc_.max_depth;
      auto verdict = check_derivation(*tree, env);
      if (!verdict.valid) mismatch("derivation check failed: " + verdict.reason);
      result_.derivations.push_back({step_, "check", std::move(*tree), verdict});
    }
  }

  void glue_step(const Step& s) {
    auto fam = StateFamily::from(sc_.kb);
    fam.states.at(sc_.context).state = result_.state;
    auto g = glue(fam, s.glue_context, s.cover);
    Json payload = to_json(g);
    std::string status = payload["status"].get<std::string>();
    payload["context"] = s.glue_context;
    payload["cover"] = s.cover;
    event("glue", payload, result_.state, result_.state);
    result_.steps.push_back({{"step", step_}, {"kind", "glue"}, {"result", status}});
    if (s.expect_glue && *s.expect_glue != status) mismatch("expected " + *s.expect_glue + ", got " + status);
  }

  const Scenario& sc_;
  const RunOptions& options_;
  RecordingChannel channel_;
  std::map<Name, OracleFrame> obox_;
  std::map<Name, OracleFrame> effective_;
  RunResult result_;
  std::size_t step_ = 0;
  std::size_t replayed_ = 0;
  bool stopped_ = false;
};

void Observer::on_guard(const GuardExpr& guard, bool value, const KnowledgeState& state) {
  Json atoms = Json::array();
  const auto& log = provider_.answers();
  for (; cursor_ < log.size(); ++cursor_) {
    atoms.push_back({{"atom", to_string(log[cursor_].atom)}, {"value", log[cursor_].value}});
  }
  runner_.event("guard", {{"guard", to_string(guard)}, {"value", value}, {"atoms", atoms}}, state, state);
}

void Observer::on_rule(Rule rule, const Program& p, const KnowledgeState& before, const KnowledgeState& after) {
  if (rule == Rule::Consult) return;  // recorded by the consult handler
  if (rule == Rule::WhileT) ++unfolds;
  Json payload{{"rule", std::string(to_string(rule))}};
  if (p.is(ProgramKind::Add) || p.is(ProgramKind::Del)) payload["assertion"] = to_string(p.assertion());
  else if (!p.is(ProgramKind::Skip)) payload["guard"] = to_string(p.guard());
  runner_.event("pbox-rule", std::move(payload), before, after);
}

}  // namespace

RunResult run_scenario(const Scenario& sc, const RunOptions& options) {
  if (sc.needs_channel() && options.channel == nullptr) {
    throw ConfigError("scenario '" + sc.name + "' has interactive steps; run it in a session or interactively");
  }
  return Runner(sc, options).run();
}

Scenario replay_scenario(const Scenario& sc, const Trace& trace) {
  Scenario out = sc;
  for (std::size_t i = 0; i < out.steps.size(); ++i) {
    auto& s = out.steps[i];
    if (s.kind != Step::Kind::Run || out.providers.at(s.provider).kind != ProviderKind::Interactive) continue;
    ProviderSpec spec;
    spec.kind = ProviderKind::Static;
    for (const auto& e : trace.events) {
      if (e.step != i || e.kind != "guard") continue;
      for (const auto& a : e.payload["atoms"]) {
        spec.profile.valuation[guard_atom(a["atom"].get<std::string>(), sc.kb.signature)] = a["value"].get<bool>();
      }
    }
    Name name = "replay-" + std::to_string(i + 1);
    out.providers[name] = std::move(spec);
    s.provider = name;
  }
  if (out.interactive_oracle) {
    out.interactive_oracle = false;
    out.oracle_answers.clear();
    for (const auto& e : trace.events) {
      if (e.kind != "oracle-gate" || !e.payload.contains("answer")) continue;
      out.oracle_answers.push_back(OracleAnswer::parse(e.payload["answer"].dump()));
    }
  }
  return out;
}

}  // namespace tapo
