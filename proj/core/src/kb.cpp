#include "tapo/kb.hpp"

#include <algorithm>

#include "tapo/error.hpp"

namespace tapo {

void TapoObject::validate() const {
  state.validate();
  for (const auto& [name, prog] : pbox) {
    std::vector<Assertion> embedded;
    collect_assertions(prog, embedded);
    for (const auto& a : embedded) {
      if (a.context != state.context) {
        throw ContextError("program '" + name + "' at " + state.context + " mentions '" +
                           to_string(a) + "'");
      }
    }
    std::set<GuardAtom> atoms;
    collect_guard_atoms(prog, atoms);
    for (const auto& a : atoms) {
      if (a.is_assertion() && a.assertion.context != state.context) {
        throw ContextError("program '" + name + "' at " + state.context + " guards on '" +
                           to_string(a) + "'");
      }
    }
  }
  for (const auto& [name, frame] : obox) {
    if (frame.context != state.context) {
      throw ContextError("frame '" + name + "' is declared over '" + frame.context + "'");
    }
    frame.validate();
  }
}

const TapoObject& KnowledgeBase::object(const Name& context) const {
  auto it = std::find_if(objects.begin(), objects.end(),
                         [&](const TapoObject& x) { return x.context() == context; });
  if (it == objects.end()) throw ContextError("no object over context '" + context + "'");
  return *it;
}

TapoObject& KnowledgeBase::object(const Name& context) {
  return const_cast<TapoObject&>(std::as_const(*this).object(context));
}

const Restriction* KnowledgeBase::restriction(const Name& source, const Name& target) const {
  for (const auto& r : restrictions) {
    if (r.source == source && r.target == target) return &r;
  }
  return nullptr;
}

}  // namespace tapo
