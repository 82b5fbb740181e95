#include "tapo/obox.hpp"

#include <algorithm>
#include <deque>

#include "tapo/error.hpp"

namespace tapo {

bool TrustLattice::leq(const Name& lower, const Name& higher) const {
  if (lower == higher) return true;
  std::set<Name> seen{lower};
  std::deque<Name> todo{lower};
  while (!todo.empty()) {
    Name cur = todo.front();
    todo.pop_front();
    for (const auto& [lo, hi] : order) {
      if (lo != cur || seen.count(hi)) continue;
      if (hi == higher) return true;
      seen.insert(hi);
      todo.push_back(hi);
    }
  }
  return false;
}

std::optional<Name> TrustLattice::meet(const Name& a, const Name& b) const {
  std::vector<Name> lower;
  for (const auto& l : levels) {
    if (leq(l, a) && leq(l, b)) lower.push_back(l);
  }
  for (const auto& l : lower) {
    bool greatest = std::all_of(lower.begin(), lower.end(),
                                [&](const Name& m) { return leq(m, l); });
    if (greatest) return l;  // levels iterate in name order
  }
  return std::nullopt;
}

void TrustLattice::validate() const {
  if (!levels.count(threshold)) {
    throw ConfigError("trust threshold '" + threshold + "' is not a declared level");
  }
  for (const auto& [lo, hi] : order) {
    if (!levels.count(lo) || !levels.count(hi)) {
      throw ConfigError("trust order edge " + lo + " < " + hi + " names an unknown level");
    }
  }
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Accept: return "accept";
    case Verdict::Reject: return "reject";
    case Verdict::Defer: return "defer";
  }
  return "?";
}

std::string to_string(HoldReason r) {
  switch (r) {
    case HoldReason::NoAnswer: return "no-answer";
    case HoldReason::BelowThreshold: return "below-threshold";
    case HoldReason::Rejected: return "rejected";
    case HoldReason::Deferred: return "deferred";
    case HoldReason::TIncompatible: return "t-incompatible";
  }
  return "?";
}

namespace {

std::set<Name> kinds_of(const std::vector<Certificate>& certs) {
  std::set<Name> out;
  for (const auto& c : certs) out.insert(c.kind);
  return out;
}

bool floor_met(const TrustLattice& trust, const PolicyRule& rule, const Response& r) {
  return !rule.trust_floor || trust.leq(*rule.trust_floor, r.trust);
}

// One certificate per required kind, or nullopt if some kind is missing.
std::optional<std::vector<Certificate>> cover(const std::set<Name>& kinds,
                                              const std::vector<Certificate>& certs) {
  std::vector<Certificate> out;
  for (const auto& k : kinds) {
    auto it = std::find_if(certs.begin(), certs.end(), [&](const Certificate& c) { return c.kind == k; });
    if (it == certs.end()) return std::nullopt;
    out.push_back(*it);
  }
  return out;
}

}  // namespace

Verdict ValidationPolicy::evaluate(const TrustLattice& trust, const Response& r,
                                   const std::vector<Certificate>& certs) const {
  auto kinds = kinds_of(certs);
  for (const auto& rule : rules) {
    if (!floor_met(trust, rule, r)) continue;
    if (std::includes(kinds.begin(), kinds.end(), rule.required_kinds.begin(),
                      rule.required_kinds.end())) {
      return rule.verdict;
    }
  }
  return fallback;
}

void OracleFrame::validate() const {
  trust.validate();
  std::set<Name> cert_ids;
  for (const auto& [q, r] : answers) {
    if (!queries.count(q)) throw ConfigError("frame '" + name + "' answers undeclared query '" + q + "'");
    if (!composite() && !trust.levels.count(r.trust)) {
      throw ConfigError("response '" + r.id + "' has undeclared trust level '" + r.trust + "'");
    }
    for (const auto& c : r.certificates) {
      if (!cert_ids.insert(c.id).second && !composite()) {
        throw ConfigError("certificate id '" + c.id + "' is not unique in frame '" + name + "'");
      }
    }
    for (const auto& a : r.payload) {
      if (a.context != context) {
        throw ConfigError("response '" + r.id + "' imports '" + to_string(a) +
                          "' outside frame context '" + context + "'");
      }
    }
  }
  for (const auto& rule : policy.rules) {
    if (rule.trust_floor && !trust.levels.count(*rule.trust_floor)) {
      throw ConfigError("policy floor '" + *rule.trust_floor + "' is not a declared level");
    }
  }
  for (const auto& [q, x] : hesitation) {
    if (!queries.count(q)) throw ConfigError("hesitation entry for undeclared query '" + q + "'");
  }
  for (const auto& s : stages) {
    if (s.context != context) throw ConfigError("stage '" + s.name + "' is over another context");
    s.validate();
  }
}

namespace {

// Answer of one stage query inside a composite, or of a plain frame.
std::optional<Response> stage_answer(const OracleFrame& frame, const Name& q) {
  auto it = frame.answers.find(q);
  if (it == frame.answers.end()) return std::nullopt;
  return it->second;
}

Response combine(const OracleFrame& frame, const std::vector<Response>& parts) {
  Response out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const auto& p = parts[i];
    out.id += (i ? "+" : "") + p.id;
    out.payload.insert(p.payload.begin(), p.payload.end());
    out.certificates.insert(out.certificates.end(), p.certificates.begin(), p.certificates.end());
    if (i == 0) {
      out.trust = p.trust;
    } else {
      const auto& lattice = frame.stages.front().trust;
      auto m = lattice.meet(out.trust, p.trust);
      if (m) out.trust = *m;
      else out.trust = parts.front().trust;
    }
  }
  out.parts = parts;
  return out;
}

}  // namespace

std::optional<Response> answer(const OracleFrame& frame, const Name& q) {
  if (!frame.admissible(q)) {
    throw OracleError("query '" + q + "' is not admissible in frame '" + frame.name + "'");
  }
  if (!frame.composite()) return stage_answer(frame, q);
  const auto& ids = frame.stage_queries.at(q);
  std::vector<Response> parts;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto r = stage_answer(frame.stages.at(i), ids[i]);
    if (!r) return std::nullopt;
    parts.push_back(*r);
  }
  return combine(frame, parts);
}

namespace {

Validation validate_plain(const OracleFrame& frame, const Response& r) {
  Validation v;
  if (!frame.trust.leq(frame.trust.threshold, r.trust)) {
    v.reason = HoldReason::BelowThreshold;
    return v;
  }
  // The verdict of S is that of the first rule whose kinds S covers. For an
  // accept rule i, its minimal cover reaches i first whenever any superset
  // does, so testing each rule's minimal cover plus the empty set is exact.
  std::vector<std::vector<Certificate>> candidates{{}};
  for (const auto& rule : frame.policy.rules) {
    if (rule.verdict != Verdict::Accept || !floor_met(frame.trust, rule, r)) continue;
    if (auto s = cover(rule.required_kinds, r.certificates)) candidates.push_back(*s);
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const auto& a, const auto& b) { return a.size() < b.size(); });
  for (const auto& s : candidates) {
    if (frame.policy.evaluate(frame.trust, r, s) == Verdict::Accept) {
      v.validated = true;
      v.witness = s;
      return v;
    }
  }
  auto verdict = frame.policy.evaluate(frame.trust, r, r.certificates);
  v.reason = verdict == Verdict::Defer ? HoldReason::Deferred : HoldReason::Rejected;
  return v;
}

// Stage i of a composite sees its own certificates plus those carried from
// earlier stages.
Response with_carried(const Response& part, const std::vector<Certificate>& carried) {
  Response r = part;
  r.certificates.insert(r.certificates.begin(), carried.begin(), carried.end());
  return r;
}

}  // namespace

Validation validate(const OracleFrame& frame, const Response& r) {
  if (!frame.composite()) return validate_plain(frame, r);
  Validation out{true, {}, std::nullopt};
  std::vector<Certificate> carried;
  for (std::size_t i = 0; i < r.parts.size() && i < frame.stages.size(); ++i) {
    auto v = validate_plain(frame.stages[i], with_carried(r.parts[i], carried));
    if (!v.validated) return v;
    out.witness.insert(out.witness.end(), v.witness.begin(), v.witness.end());
    carried.insert(carried.end(), r.parts[i].certificates.begin(), r.parts[i].certificates.end());
  }
  return out;
}

namespace {

void fill_gates(OracleReport& rep, const OracleFrame& frame, const Response& r) {
  rep.trust = r.trust;
  rep.threshold = frame.trust.threshold;
  rep.trust_gate = frame.trust.leq(frame.trust.threshold, r.trust);
}

}  // namespace

OracleStep oracle_transition(const OracleFrame& frame, const KnowledgeState& state, const Name& q,
                             std::size_t max_depth) {
  if (frame.context != state.context) {
    throw ContextError("frame '" + frame.name + "' is over '" + frame.context + "', state over '" +
                       state.context + "'");
  }
  auto r = answer(frame, q);
  OracleStep step{state, {}};
  auto& rep = step.report;
  rep.frame = frame.name;
  rep.query = q;
  if (!r) {
    rep.cause = HoldReason::NoAnswer;
    return step;
  }
  rep.response = r->id;

  if (frame.composite()) {
    std::vector<Certificate> carried;
    for (std::size_t i = 0; i < r->parts.size(); ++i) {
      const auto& stage = frame.stages[i];
      auto part = with_carried(r->parts[i], carried);
      rep.stage = i;
      fill_gates(rep, stage, part);
      auto v = validate_plain(stage, part);
      if (!v.validated) {
        rep.cause = v.reason;
        if (*v.reason != HoldReason::BelowThreshold) {
          rep.policy_gate = stage.policy.evaluate(stage.trust, part, part.certificates);
        }
        return step;
      }
      for (const auto& c : v.witness) rep.witness.push_back(c.id);
      carried.insert(carried.end(), r->parts[i].certificates.begin(), r->parts[i].certificates.end());
    }
    rep.trust = r->trust;
    rep.policy_gate = Verdict::Accept;
  } else {
    fill_gates(rep, frame, *r);
    auto v = validate_plain(frame, *r);
    if (!v.validated) {
      rep.cause = v.reason;
      if (*v.reason != HoldReason::BelowThreshold) {
        rep.policy_gate = frame.policy.evaluate(frame.trust, *r, r->certificates);
      }
      return step;
    }
    rep.policy_gate = Verdict::Accept;
    for (const auto& c : v.witness) rep.witness.push_back(c.id);
  }

  ABox merged = state.abox;
  merged.insert(r->payload.begin(), r->payload.end());
  auto compat = check_t_compatibility(state.tbox, merged, max_depth);
  rep.compat_gate = compat.compatible;
  if (!compat.compatible) {
    rep.cause = HoldReason::TIncompatible;
    rep.clash = compat.clash;
    return step;
  }
  rep.accepted = true;
  rep.imported.assign(r->payload.begin(), r->payload.end());
  step.state.abox = std::move(merged);
  return step;
}

AuditReport audit_frame_soundness(const OracleFrame& frame, const TBox& tbox, std::size_t max_depth) {
  AuditReport rep;
  for (const auto& [q, text] : frame.queries) {
    auto r = answer(frame, q);
    if (!r || !validate(frame, *r).validated) continue;
    auto compat = check_t_compatibility(tbox, r->payload, max_depth);
    if (!compat.compatible) rep.violations.push_back({q, r->id, compat.clash});
  }
  return rep;
}

OracleFrame compose_frames(const OracleFrame& first, const OracleFrame& second) {
  if (first.context != second.context) {
    throw OracleError("cannot compose frames over '" + first.context + "' and '" + second.context + "'");
  }
  for (const auto& [q, text] : first.queries) {
    if (second.queries.count(q)) throw OracleError("query identifier '" + q + "' occurs in both frames");
  }
  if (second.queries.empty()) {
    OracleFrame out = first;
    out.name = first.name + "+" + second.name;
    return out;
  }

  auto stages_of = [](const OracleFrame& f) {
    return f.composite() ? f.stages : std::vector<OracleFrame>{f};
  };
  auto ids_of = [](const OracleFrame& f, const Name& q) {
    return f.composite() ? f.stage_queries.at(q) : std::vector<Name>{q};
  };

  OracleFrame out;
  out.name = first.name + "+" + second.name;
  out.context = first.context;
  out.trust = first.trust;
  out.policy = first.policy;
  out.stages = stages_of(first);
  for (auto& s : stages_of(second)) out.stages.push_back(std::move(s));
  for (const auto& [q1, t1] : first.queries) {
    for (const auto& [q2, t2] : second.queries) {
      Name id = q1 + "+" + q2;
      out.queries[id] = t1 + " ; " + t2;
      auto ids = ids_of(first, q1);
      for (auto& x : ids_of(second, q2)) ids.push_back(std::move(x));
      out.stage_queries[id] = std::move(ids);
      auto h = first.hesitation.find(q1);
      if (h != first.hesitation.end()) out.hesitation[id] = h->second;
    }
  }
  // The composite answer map is derived from the stages.
  for (const auto& [q, text] : out.queries) {
    auto r = answer(out, q);
    if (r) out.answers[q] = *r;
  }
  return out;
}

}  // namespace tapo
