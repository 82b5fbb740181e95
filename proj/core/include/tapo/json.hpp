#pragma once

// JSON renderings of engine values. Assertions, concepts, guards and
// programs appear in their DSL text; states carry their digest.

#include <nlohmann/json.hpp>

#include "tapo/derivation.hpp"
#include "tapo/obox.hpp"
#include "tapo/presheaf.hpp"
#include "tapo/program.hpp"
#include "tapo/reasoner.hpp"

namespace tapo {

using Json = nlohmann::json;

Json to_json(const Assertion& a);
Json to_json(const ABox& abox);
Json to_json(const KnowledgeState& s);
Json to_json(const Saturation& sat);  // trace steps with premise indices
Json to_json(const ProofTree& t);
Json to_json(const CheckVerdict& v);
Json to_json(const Outcome& o);
Json to_json(const OracleReport& r);
Json to_json(const OracleFrame& f);  // display form: queries, levels, certificate kinds
Json to_json(const HarnessReport& r);
Json to_json(const FunctorialityReport& r);
Json to_json(const CompatReport& r);
Json to_json(const GlueResult& r);

}  // namespace tapo
