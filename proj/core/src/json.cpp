#include "tapo/json.hpp"

#include <set>

namespace tapo {

namespace {

Json strings(const std::vector<Assertion>& as) {
  Json out = Json::array();
  for (const auto& a : as) out.push_back(to_string(a));
  return out;
}

Json judgment_kind(const Judgment& j) {
  static const char* kNames[] = {"sub", "asrt", "guard", "trans", "oracle", "answer"};
  return kNames[j.index()];
}

}  // namespace

Json to_json(const Assertion& a) { return to_string(a); }

Json to_json(const ABox& abox) {
  Json out = Json::array();
  for (const auto& a : abox) out.push_back(to_string(a));
  return out;
}

Json to_json(const KnowledgeState& s) {
  Json tbox = Json::array();
  for (const auto& ax : s.tbox) tbox.push_back(to_string(ax));
  return {{"context", s.context}, {"tbox", tbox}, {"abox", to_json(s.abox)}, {"digest", digest(s)}};
}

Json to_json(const Saturation& sat) {
  Json steps = Json::array();
  for (std::size_t i = 0; i < sat.trace.size(); ++i) {
    const auto& st = sat.trace[i];
    steps.push_back({{"index", i},
                     {"rule", std::string(to_string(st.rule))},
                     {"premises", st.premises},
                     {"conclusion", to_string(st.conclusion)}});
  }
  return {{"context", sat.base.context},
          {"depth_used", sat.depth_used},
          {"truncated", sat.truncated},
          {"steps", steps}};
}

Json to_json(const ProofTree& t) {
  Json out{{"rule", std::string(to_string(t.rule))},
           {"kind", judgment_kind(t.conclusion)},
           {"judgment", to_string(t.conclusion)}};
  if (const auto* tr = std::get_if<TransJ>(&t.conclusion)) {
    out["before"] = digest(tr->before);
    out["after"] = digest(tr->after);
  } else if (const auto* o = std::get_if<OracleJ>(&t.conclusion)) {
    out["before"] = digest(o->before);
    out["after"] = digest(o->after);
  }
  if (!t.witness.empty()) out["witness"] = t.witness;
  if (t.log_index) out["log_index"] = *t.log_index;
  Json children = Json::array();
  for (const auto& c : t.children) children.push_back(to_json(c));
  out["children"] = std::move(children);
  return out;
}

Json to_json(const CheckVerdict& v) {
  Json out{{"valid", v.valid}};
  if (!v.valid) {
    out["path"] = v.path;
    out["reason"] = v.reason;
  }
  return out;
}

Json to_json(const Outcome& o) {
  if (const auto* f = std::get_if<Final>(&o.result)) {
    return {{"status", "final"}, {"state", to_json(f->state)}};
  }
  if (const auto* f = std::get_if<OutOfFuel>(&o.result)) {
    return {{"status", "out-of-fuel"}, {"steps", f->steps}, {"state", to_json(f->state)}};
  }
  return {{"status", "failed"}, {"error", o.error()}};
}

Json to_json(const OracleReport& r) {
  Json out{{"frame", r.frame}, {"query", r.query}, {"accepted", r.accepted}};
  out["response"] = r.response ? Json(*r.response) : Json();
  out["cause"] = r.cause ? Json(to_string(*r.cause)) : Json();
  Json gates;
  gates["trust"] = r.trust_gate ? Json(*r.trust_gate) : Json();
  gates["policy"] = r.policy_gate ? Json(to_string(*r.policy_gate)) : Json();
  gates["compat"] = r.compat_gate ? Json(*r.compat_gate) : Json();
  out["gates"] = gates;
  out["trust"] = r.trust;
  out["threshold"] = r.threshold;
  out["witness"] = r.witness;
  out["clash"] = strings(r.clash);
  out["imported"] = strings(r.imported);
  out["stage"] = r.stage;
  return out;
}

Json to_json(const OracleFrame& f) {
  Json queries = Json::array();
  for (const auto& [q, text] : f.queries) queries.push_back({{"id", q}, {"text", text}});
  const auto& lattice = f.composite() ? f.stages.front().trust : f.trust;
  Json levels = Json::array();
  for (const auto& l : lattice.levels) levels.push_back(l);
  Json order = Json::array();
  for (const auto& [lo, hi] : lattice.order) order.push_back({lo, hi});
  std::set<Name> kinds;
  for (const auto& [q, r] : f.answers) {
    for (const auto& c : r.certificates) kinds.insert(c.kind);
  }
  return {{"name", f.name},         {"context", f.context},      {"queries", queries},
          {"levels", levels},       {"order", order},            {"threshold", lattice.threshold},
          {"certificate_kinds", kinds}};
}

Json to_json(const HarnessReport& r) {
  Json cex = Json::array();
  for (const auto& c : r.counterexamples) {
    cex.push_back({{"kind", c.kind}, {"index", c.index}, {"detail", c.detail}});
  }
  return {{"transitions", r.transitions},
          {"finals", r.finals},
          {"oracle_steps", r.oracle_steps},
          {"static_states", r.static_states},
          {"static_assertions", r.static_assertions},
          {"counterexamples", cex}};
}

Json to_json(const FunctorialityReport& r) {
  Json v = Json::array();
  for (const auto& x : r.violations) {
    v.push_back({{"kind", to_string(x.kind)}, {"source", x.source}, {"target", x.target},
                 {"detail", x.detail}});
  }
  return {{"ok", r.ok()}, {"checked_pairs", r.checked_pairs}, {"violations", v}};
}

Json to_json(const CompatReport& r) {
  Json e = Json::array();
  for (const auto& x : r.entries) {
    Json item{{"source", x.source}, {"target", x.target}, {"item", x.item},
              {"status", to_string(x.status)}, {"detail", x.detail}};
    if (!x.gate.empty()) item["gate"] = x.gate;
    e.push_back(std::move(item));
  }
  return {{"ok", r.ok()}, {"entries", e}};
}

Json to_json(const GlueResult& r) {
  if (const auto* g = std::get_if<Glued>(&r.result)) {
    Json vac = Json::array();
    for (const auto& [a, b] : g->vacuous_pairs) vac.push_back({a, b});
    return {{"status", "glued"}, {"state", to_json(g->object.state)}, {"vacuous_pairs", vac}};
  }
  if (const auto* c = std::get_if<Conflict>(&r.result)) {
    Json out{{"status", "conflict"}, {"left", c->left}, {"right", c->right}, {"reason", c->reason}};
    if (c->left_assertion) out["left_assertion"] = to_string(*c->left_assertion);
    if (c->right_assertion) out["right_assertion"] = to_string(*c->right_assertion);
    return out;
  }
  const auto& n = std::get<NotUnique>(r.result);
  return {{"status", "not-unique"}, {"first", to_json(n.first)}, {"second", to_json(n.second)},
          {"reason", n.reason}};
}

}  // namespace tapo
