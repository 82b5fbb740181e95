#include "tapo/restriction.hpp"

namespace tapo {

namespace {

Name lookup(const std::map<Name, Name>& m, const Name& key) {
  auto it = m.find(key);
  return it == m.end() ? key : it->second;
}

bool member(const std::optional<std::set<Name>>& visible, const Name& n) {
  return !visible || visible->count(n) > 0;
}

}  // namespace

Name FrameMap::query(const Name& q) const { return lookup(queries, q); }
Name FrameMap::level(const Name& l) const { return lookup(levels, l); }
Name FrameMap::response(const Name& r) const { return lookup(responses, r); }
Name FrameMap::certificate(const Name& c) const { return lookup(certificates, c); }

Restriction Restriction::identity(const Name& context) {
  Restriction r;
  r.source = context;
  r.target = context;
  return r;
}

bool Restriction::visible(const Concept& c) const {
  std::set<Name> atoms, used_roles;
  collect_atoms(c, atoms);
  collect_roles(c, used_roles);
  for (const auto& a : atoms) {
    if (!member(concepts, a)) return false;
  }
  for (const auto& r : used_roles) {
    if (!member(roles, r)) return false;
  }
  return true;
}

std::optional<Assertion> Restriction::apply(const Assertion& a) const {
  if (a.context != source) {
    throw ContextError("assertion '" + to_string(a) + "' is not over restriction source '" +
                       source + "'");
  }
  if (auto it = overrides.find(a); it != overrides.end()) return it->second;
  if (!member(individuals, a.individual)) return std::nullopt;
  if (a.is_role()) {
    if (!member(individuals, a.other) || !member(roles, a.role)) return std::nullopt;
  } else if (!visible(a.term)) {
    return std::nullopt;
  }
  return a.at(target);
}

std::optional<GuardAtom> Restriction::apply(const GuardAtom& a) const {
  if (a.is_assertion()) {
    auto mapped = apply(a.assertion);
    if (!mapped) return std::nullopt;
    return GuardAtom::of(*mapped);
  }
  if (!visible(a.sub) || !visible(a.super)) return std::nullopt;
  return a;
}

std::optional<std::pair<Assertion, Assertion>> Restriction::collision(const ABox& domain) const {
  std::map<Assertion, Assertion> image;
  for (const auto& a : domain) {
    if (a.context != source) continue;
    auto b = apply(a);
    if (!b) continue;
    auto [it, fresh] = image.emplace(*b, a);
    if (!fresh) return std::make_pair(it->second, a);
  }
  return std::nullopt;
}

}  // namespace tapo
