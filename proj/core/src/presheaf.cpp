#include "tapo/presheaf.hpp"

#include <algorithm>

#include "tapo/error.hpp"

namespace tapo {

StateFamily StateFamily::from(const KnowledgeBase& kb) {
  StateFamily fam;
  fam.poset = kb.signature.contexts;
  fam.individuals = kb.signature.individual_names;
  fam.concepts = kb.signature.concept_names;
  fam.roles = kb.signature.role_names;
  for (const auto& x : kb.objects) fam.states.emplace(x.context(), x);
  for (const auto& r : kb.restrictions) fam.restrictions.emplace(Edge{r.source, r.target}, r);
  return fam;
}

void StateFamily::validate() const {
  for (const auto& [finer, coarser] : poset.refinements()) {
    if (!restrictions.count({coarser, finer})) {
      throw ConfigError("no restriction for refinement " + finer + " <= " + coarser);
    }
  }
  for (const auto& [edge, r] : restrictions) {
    if (!poset.leq(edge.second, edge.first)) {
      throw ConfigError("restriction " + edge.first + " -> " + edge.second + " goes against the order");
    }
  }
}

std::vector<std::vector<Name>> StateFamily::paths(const Name& u, const Name& v) const {
  std::vector<std::vector<Name>> out;
  std::vector<Name> cur{u};
  std::function<void(const Name&)> walk = [&](const Name& at) {
    if (at == v) {
      out.push_back(cur);
      return;
    }
    for (const auto& [edge, r] : restrictions) {
      if (edge.first != at || edge.second == at) continue;
      if (std::find(cur.begin(), cur.end(), edge.second) != cur.end()) continue;
      cur.push_back(edge.second);
      walk(edge.second);
      cur.pop_back();
    }
  };
  walk(u);
  return out;
}

namespace {

const FrameMap* frame_map(const Restriction& r, const Name& frame) {
  auto it = r.frames.find(frame);
  return it == r.frames.end() ? nullptr : &it->second;
}

}  // namespace

OracleFrame restrict_frame(const Restriction& r, const OracleFrame& frame) {
  FrameMap fallback;
  fallback.target_frame = frame.name;
  const FrameMap& fm = frame_map(r, frame.name) ? *frame_map(r, frame.name) : fallback;

  OracleFrame out;
  out.name = fm.target_frame;
  out.context = r.target;
  for (const auto& [q, text] : frame.queries) out.queries[fm.query(q)] = text;
  for (const auto& [q, resp] : frame.answers) {
    Response m;
    m.id = fm.response(resp.id);
    m.trust = fm.level(resp.trust);
    for (const auto& a : resp.payload) {
      if (auto b = r.apply(a)) m.payload.insert(*b);
    }
    for (auto c : resp.certificates) {
      c.id = fm.certificate(c.id);
      m.certificates.push_back(std::move(c));
    }
    out.answers[fm.query(q)] = std::move(m);
  }
  for (const auto& l : frame.trust.levels) out.trust.levels.insert(fm.level(l));
  for (const auto& [lo, hi] : frame.trust.order) out.trust.order.insert({fm.level(lo), fm.level(hi)});
  out.trust.threshold = fm.level(frame.trust.threshold);
  out.policy = frame.policy;
  for (auto& rule : out.policy.rules) {
    if (rule.trust_floor) rule.trust_floor = fm.level(*rule.trust_floor);
  }
  for (const auto& [q, x] : frame.hesitation) out.hesitation[fm.query(q)] = x;
  for (const auto& s : frame.stages) {
    Restriction inner = r;
    inner.frames[s.name] = fm;
    inner.frames[s.name].target_frame = s.name;
    out.stages.push_back(restrict_frame(inner, s));
  }
  for (const auto& [q, ids] : frame.stage_queries) {
    auto& mapped = out.stage_queries[fm.query(q)];
    for (const auto& id : ids) mapped.push_back(fm.query(id));
  }
  return out;
}

KnowledgeState restrict_knowledge(const Restriction& r, const KnowledgeState& s) {
  if (s.context != r.source) {
    throw ContextError("state over '" + s.context + "' restricted along " + r.source + " -> " + r.target);
  }
  KnowledgeState out{s.tbox, {}, r.target};
  for (const auto& a : s.abox) {
    if (auto b = r.apply(a)) out.abox.insert(*b);
  }
  return out;
}

TapoObject restrict_state(const Restriction& r, const TapoObject& x) {
  TapoObject out;
  out.state = restrict_knowledge(r, x.state);
  for (const auto& [name, prog] : x.pbox) {
    try {
      out.pbox.emplace(name, restrict_program(prog, r));
    } catch (const RestrictionFailure& e) {
      throw e.in_program(name);
    }
  }
  for (const auto& [name, frame] : x.obox) {
    auto f = restrict_frame(r, frame);
    out.obox.emplace(f.name, std::move(f));
  }
  return out;
}

std::optional<Assertion> restrict_along(const StateFamily& fam, const std::vector<Name>& path,
                                        const Assertion& a) {
  std::optional<Assertion> cur = a;
  for (std::size_t i = 0; i + 1 < path.size() && cur; ++i) {
    cur = fam.restrictions.at({path[i], path[i + 1]}).apply(*cur);
  }
  return cur;
}

namespace {

KnowledgeState knowledge_along(const StateFamily& fam, const std::vector<Name>& path,
                               KnowledgeState s) {
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    s = restrict_knowledge(fam.restrictions.at({path[i], path[i + 1]}), s);
  }
  return s;
}

std::string path_text(const std::vector<Name>& p) {
  std::string out;
  for (const auto& n : p) out += (out.empty() ? "" : "->") + n;
  return out;
}

void symbols(const Assertion& a, std::set<Name>& inds, std::set<Name>& concepts, std::set<Name>& roles) {
  inds.insert(a.individual);
  if (a.is_role()) {
    inds.insert(a.other);
    roles.insert(a.role);
  } else {
    collect_atoms(a.term, concepts);
    collect_roles(a.term, roles);
  }
}

void frame_assertions(const OracleFrame& f, std::vector<Assertion>& out) {
  for (const auto& [q, r] : f.answers) out.insert(out.end(), r.payload.begin(), r.payload.end());
  for (const auto& s : f.stages) frame_assertions(s, out);
}

std::vector<Assertion> object_assertions(const TapoObject& x) {
  std::vector<Assertion> out(x.state.abox.begin(), x.state.abox.end());
  for (const auto& [name, p] : x.pbox) {
    collect_assertions(p, out);
    std::set<GuardAtom> atoms;
    collect_guard_atoms(p, atoms);
    for (const auto& g : atoms) {
      if (g.is_assertion()) out.push_back(g.assertion);
    }
  }
  for (const auto& [name, f] : x.obox) frame_assertions(f, out);
  return out;
}

}  // namespace

std::string to_string(FunctorialityViolation::Kind k) {
  using K = FunctorialityViolation::Kind;
  switch (k) {
    case K::MissingRestriction: return "missing-restriction";
    case K::NotRefinement: return "not-refinement";
    case K::Identity: return "identity";
    case K::Composition: return "composition";
    case K::NotInjective: return "not-injective";
  }
  return "?";
}

ABox probe_domain(const StateFamily& fam, const Name& u) {
  std::set<Name> inds = fam.individuals, concepts = fam.concepts, roles = fam.roles;
  for (const auto& [ctx, x] : fam.states) {
    for (const auto& a : object_assertions(x)) symbols(a, inds, concepts, roles);
    for (const auto& ax : x.state.tbox) {
      collect_atoms(ax.lhs, concepts);
      collect_atoms(ax.rhs, concepts);
    }
  }
  ABox out;
  if (auto it = fam.states.find(u); it != fam.states.end()) {
    for (const auto& a : object_assertions(it->second)) {
      if (a.context == u) out.insert(a);
    }
  }
  for (const auto& [edge, r] : fam.restrictions) {
    if (edge.first != u) continue;
    for (const auto& [from, to] : r.overrides) out.insert(from);
    if (r.individuals) inds.insert(r.individuals->begin(), r.individuals->end());
    if (r.concepts) concepts.insert(r.concepts->begin(), r.concepts->end());
    if (r.roles) roles.insert(r.roles->begin(), r.roles->end());
  }
  for (const auto& a : inds) {
    for (const auto& c : concepts) out.insert(Assertion::member(a, Concept::atom(c), u));
    for (const auto& b : inds) {
      for (const auto& r : roles) out.insert(Assertion::related(a, b, r, u));
    }
  }
  return out;
}

FunctorialityReport check_functoriality(const StateFamily& fam) {
  using K = FunctorialityViolation::Kind;
  FunctorialityReport rep;
  for (const auto& [finer, coarser] : fam.poset.refinements()) {
    if (!fam.restrictions.count({coarser, finer})) {
      rep.violations.push_back({K::MissingRestriction, coarser, finer, "declared edge has no restriction"});
    }
  }
  std::map<Name, ABox> domains;
  auto domain = [&](const Name& u) -> const ABox& {
    auto it = domains.find(u);
    if (it == domains.end()) it = domains.emplace(u, probe_domain(fam, u)).first;
    return it->second;
  };
  for (const auto& [edge, r] : fam.restrictions) {
    const auto& [u, v] = edge;
    if (!fam.poset.contains(u) || !fam.poset.contains(v) || !fam.poset.leq(v, u)) {
      rep.violations.push_back({K::NotRefinement, u, v, "target does not refine source"});
      continue;
    }
    if (u == v) {
      for (const auto& a : domain(u)) {
        auto b = r.apply(a);
        if (!b || *b != a) {
          rep.violations.push_back({K::Identity, u, v, "moves '" + to_string(a) + "'"});
          break;
        }
      }
    }
    if (auto c = r.collision(domain(u))) {
      rep.violations.push_back({K::NotInjective, u, v,
                                "'" + to_string(c->first) + "' and '" + to_string(c->second) +
                                    "' share an image"});
    }
  }
  for (const auto& u : fam.poset.elements()) {
    for (const auto& w : fam.poset.down_set(u)) {
      if (w == u) continue;
      auto ps = fam.paths(u, w);
      ++rep.checked_pairs;
      for (std::size_t i = 1; i < ps.size(); ++i) {
        for (const auto& a : domain(u)) {
          auto x = restrict_along(fam, ps.front(), a);
          auto y = restrict_along(fam, ps[i], a);
          if (x == y) continue;
          auto show = [](const std::optional<Assertion>& o) { return o ? to_string(*o) : std::string("undefined"); };
          rep.violations.push_back({K::Composition, u, w,
                                    path_text(ps.front()) + " and " + path_text(ps[i]) + " disagree on '" +
                                        to_string(a) + "': " + show(x) + " vs " + show(y)});
          break;
        }
      }
    }
  }
  return rep;
}

std::string to_string(CompatStatus s) {
  switch (s) {
    case CompatStatus::Agree: return "agree";
    case CompatStatus::Disagree: return "disagree";
    case CompatStatus::Vacuous: return "vacuous";
    case CompatStatus::RestrictionFailed: return "restriction-failed";
  }
  return "?";
}

bool CompatReport::ok() const {
  return std::none_of(entries.begin(), entries.end(), [](const CompatEntry& e) {
    return e.status == CompatStatus::Disagree || e.status == CompatStatus::RestrictionFailed;
  });
}

CompatReport check_procedure_compat(const StateFamily& fam, const Name& program,
                                    const ProviderFactory& providers, std::size_t fuel) {
  CompatReport rep;
  for (const auto& [edge, r] : fam.restrictions) {
    const auto& [u, v] = edge;
    if (u == v) continue;
    auto it = fam.states.find(u);
    if (it == fam.states.end() || !it->second.pbox.count(program)) continue;
    const auto& x = it->second;
    CompatEntry e{u, v, program, CompatStatus::Agree, "", ""};
    Program restricted;
    try {
      restricted = restrict_program(x.pbox.at(program), r);
    } catch (const RestrictionFailure& f) {
      e.status = CompatStatus::RestrictionFailed;
      e.detail = f.in_program(program).what();
      rep.entries.push_back(e);
      continue;
    }
    auto left = eval_program(x.state, x.pbox.at(program), *providers(u), fuel);
    auto right = eval_program(restrict_knowledge(r, x.state), restricted, *providers(v), fuel);
    if (!left.is_final() || !right.is_final()) {
      e.status = CompatStatus::Vacuous;
      e.detail = "left " + describe(left) + ", right " + describe(right);
    } else {
      auto lhs = restrict_knowledge(r, left.state());
      if (!(lhs == right.state())) {
        e.status = CompatStatus::Disagree;
        e.detail = "restrict-after-run digest " + digest(lhs) + ", run-after-restrict digest " +
                   digest(right.state());
      }
    }
    rep.entries.push_back(e);
  }
  return rep;
}

namespace {

std::string diverging_gate(const OracleReport& a, const OracleReport& b) {
  if (a.response.has_value() != b.response.has_value()) return "answer";
  if (a.trust_gate != b.trust_gate) return "trust";
  if (a.policy_gate != b.policy_gate) return "policy";
  if (a.compat_gate != b.compat_gate) return "compat";
  return "payload";
}

}  // namespace

CompatReport check_oracle_compat(const StateFamily& fam, const Name& frame, std::size_t max_depth) {
  CompatReport rep;
  for (const auto& [edge, r] : fam.restrictions) {
    const auto& [u, v] = edge;
    auto ux = fam.states.find(u);
    if (ux == fam.states.end() || !ux->second.obox.count(frame)) continue;
    const auto& fu = ux->second.obox.at(frame);
    FrameMap fm;
    if (const auto* declared = frame_map(r, frame)) {
      fm = *declared;
    } else {
      fm.target_frame = frame;
    }
    auto vx = fam.states.find(v);
    if (vx == fam.states.end() || !vx->second.obox.count(fm.target_frame)) {
      throw ConfigError("restriction " + u + " -> " + v + " has no frame map for '" + frame + "'");
    }
    const auto& fv = vx->second.obox.at(fm.target_frame);
    auto restricted = restrict_knowledge(r, ux->second.state);
    for (const auto& [q, text] : fu.queries) {
      CompatEntry e{u, v, q, CompatStatus::Agree, "", ""};
      Name qv = fm.query(q);
      if (!fv.admissible(qv)) {
        e.status = CompatStatus::Vacuous;
        e.detail = "query '" + qv + "' is not admissible at " + v;
        rep.entries.push_back(e);
        continue;
      }
      auto left = oracle_transition(fu, ux->second.state, q, max_depth);
      auto right = oracle_transition(fv, restricted, qv, max_depth);
      auto lhs = restrict_knowledge(r, left.state);
      if (!(lhs == right.state)) {
        e.status = CompatStatus::Disagree;
        e.gate = diverging_gate(left.report, right.report);
        e.detail = std::string(left.report.accepted ? "accepted" : "held") + " at " + u + ", " +
                   (right.report.accepted ? "accepted" : "held") + " at " + v;
      }
      rep.entries.push_back(e);
    }
  }
  return rep;
}

namespace {

bool complementary(const Assertion& a, const Assertion& b) {
  if (!a.is_concept() || !b.is_concept() || a.individual != b.individual) return false;
  return (a.term.is(ConceptKind::Not) && a.term.body() == b.term) ||
         (b.term.is(ConceptKind::Not) && b.term.body() == a.term);
}

std::optional<Assertion> preimage(const StateFamily& fam, const std::vector<Name>& path,
                                  const ABox& local, const Assertion& image) {
  for (const auto& a : local) {
    if (restrict_along(fam, path, a) == image) return a;
  }
  return std::nullopt;
}

ABox abox_along(const StateFamily& fam, const std::vector<Name>& path, const ABox& abox) {
  ABox out;
  for (const auto& a : abox) {
    if (auto b = restrict_along(fam, path, a)) out.insert(*b);
  }
  return out;
}

}  // namespace

GlueResult glue(const StateFamily& fam, const Name& u, const std::set<Name>& cover) {
  std::map<Name, std::vector<Name>> to_member;
  for (const auto& v : cover) {
    if (!fam.poset.contains(v) || !fam.poset.leq(v, u)) {
      throw ContextError("cover member '" + v + "' does not refine '" + u + "'");
    }
    auto ps = fam.paths(u, v);
    if (ps.empty()) throw ContextError("no restriction path from '" + u + "' to '" + v + "'");
    if (!fam.states.count(v)) throw ContextError("no local state at '" + v + "'");
    to_member[v] = ps.front();
  }

  Glued glued;
  std::vector<Name> members(cover.begin(), cover.end());
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      const auto &v1 = members[i], &v2 = members[j];
      auto m = fam.poset.meet(v1, v2);
      auto p1 = m ? fam.paths(v1, *m) : std::vector<std::vector<Name>>{};
      auto p2 = m ? fam.paths(v2, *m) : std::vector<std::vector<Name>>{};
      if (!m || p1.empty() || p2.empty()) {
        glued.vacuous_pairs.push_back({v1, v2});
        continue;
      }
      const auto& a1 = fam.states.at(v1).state.abox;
      const auto& a2 = fam.states.at(v2).state.abox;
      auto l = abox_along(fam, p1.front(), a1);
      auto r = abox_along(fam, p2.front(), a2);
      if (l == r) continue;
      std::vector<Assertion> only_l, only_r;
      std::set_difference(l.begin(), l.end(), r.begin(), r.end(), std::back_inserter(only_l));
      std::set_difference(r.begin(), r.end(), l.begin(), l.end(), std::back_inserter(only_r));
      std::optional<Assertion> x = only_l.empty() ? std::nullopt : std::optional(only_l.front());
      std::optional<Assertion> y = only_r.empty() ? std::nullopt : std::optional(only_r.front());
      for (const auto& a : only_l) {
        for (const auto& b : only_r) {
          if (complementary(a, b)) {
            x = a;
            y = b;
          }
        }
      }
      Conflict c{v1, v2, std::nullopt, std::nullopt, "restrictions to " + *m + " disagree"};
      if (x) c.left_assertion = preimage(fam, p1.front(), a1, *x);
      if (y) c.right_assertion = preimage(fam, p2.front(), a2, *y);
      return GlueResult{c};
    }
  }

  ABox domain = probe_domain(fam, u);
  for (const auto& v : cover) {
    for (const auto& a : fam.states.at(v).state.abox) domain.insert(a.at(u));
  }
  ABox first, second;
  bool ambiguous = false;
  for (const auto& v : cover) {
    const auto& path = to_member.at(v);
    for (const auto& b : fam.states.at(v).state.abox) {
      std::vector<Assertion> pre;
      for (const auto& a : domain) {
        if (restrict_along(fam, path, a) == b) pre.push_back(a);
      }
      if (pre.empty()) return GlueResult{Conflict{v, v, std::nullopt, b, "no preimage at " + u}};
      first.insert(pre[0]);
      second.insert(pre.size() > 1 ? pre[1] : pre[0]);
      ambiguous = ambiguous || pre.size() > 1;
    }
  }
  if (ambiguous) return GlueResult{NotUnique{first, second, "ambiguous preimages"}};

  for (const auto& v : cover) {
    const auto& local = fam.states.at(v).state.abox;
    auto back = abox_along(fam, to_member.at(v), first);
    if (back != local) {
      std::optional<Assertion> extra;
      for (const auto& a : first) {
        auto b = restrict_along(fam, to_member.at(v), a);
        if (b && !local.count(*b)) extra = a;
      }
      return GlueResult{Conflict{v, v, extra, std::nullopt, "candidate does not restrict back"}};
    }
  }

  auto existing = fam.states.find(u);
  if (existing != fam.states.end() && existing->second.state.abox != first) {
    bool same = std::all_of(cover.begin(), cover.end(), [&](const Name& v) {
      return abox_along(fam, to_member.at(v), existing->second.state.abox) == fam.states.at(v).state.abox;
    });
    if (same) return GlueResult{NotUnique{first, existing->second.state.abox, "cover does not determine " + u}};
  }

  if (existing != fam.states.end()) {
    glued.object = existing->second;
  } else {
    glued.object.state.context = u;
    glued.object.state.tbox = fam.states.at(*cover.begin()).state.tbox;
  }
  glued.object.state.abox = first;
  return GlueResult{glued};
}

std::vector<std::set<Name>> covers(const StateFamily& fam, const Name& u, std::size_t size) {
  std::vector<Name> below;
  for (const auto& v : fam.poset.down_set(u)) {
    if (!fam.paths(u, v).empty()) below.push_back(v);
  }
  const auto& abox = fam.states.at(u).state.abox;
  std::vector<std::set<Name>> out;
  std::vector<std::size_t> pick;
  std::function<void(std::size_t)> rec = [&](std::size_t from) {
    if (pick.size() == size) {
      std::set<Name> c;
      for (auto i : pick) c.insert(below[i]);
      bool seen_all = std::all_of(abox.begin(), abox.end(), [&](const Assertion& a) {
        return std::any_of(c.begin(), c.end(), [&](const Name& v) {
          return restrict_along(fam, fam.paths(u, v).front(), a).has_value();
        });
      });
      if (seen_all) out.push_back(std::move(c));
      return;
    }
    for (std::size_t i = from; i < below.size(); ++i) {
      pick.push_back(i);
      rec(i + 1);
      pick.pop_back();
    }
  };
  rec(0);
  return out;
}

StateFamily restrict_family(const StateFamily& fam, const Name& u) {
  StateFamily out;
  out.poset = fam.poset;
  out.restrictions = fam.restrictions;
  out.individuals = fam.individuals;
  out.concepts = fam.concepts;
  out.roles = fam.roles;
  const auto& base = fam.states.at(u).state;
  for (const auto& v : fam.poset.down_set(u)) {
    auto ps = fam.paths(u, v);
    if (ps.empty()) continue;
    TapoObject x;
    x.state = knowledge_along(fam, ps.front(), base);
    out.states.emplace(v, std::move(x));
  }
  return out;
}

}  // namespace tapo
