#pragma once

#include <map>
#include <vector>

#include "tapo/obox.hpp"
#include "tapo/program.hpp"
#include "tapo/restriction.hpp"
#include "tapo/syntax.hpp"

namespace tapo {

// X_U = (state, named programs, named oracle frames) over one context.
struct TapoObject {
  KnowledgeState state;
  std::map<Name, Program> pbox;
  std::map<Name, OracleFrame> obox;

  const Name& context() const { return state.context; }

  // Programs and frames must stay inside the state's context. Throws
  // ContextError.
  void validate() const;

  friend bool operator==(const TapoObject&, const TapoObject&) = default;
};

struct KnowledgeBase {
  Signature signature;
  std::vector<TapoObject> objects;  // one per declared context, in name order
  std::vector<Restriction> restrictions;

  // Throws ContextError for undeclared contexts.
  const TapoObject& object(const Name& context) const;
  TapoObject& object(const Name& context);

  // Declared restriction along a refinement edge, if any.
  const Restriction* restriction(const Name& source, const Name& target) const;
};

}  // namespace tapo
