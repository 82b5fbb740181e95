#pragma once

// Text front end for the KB DSL. The grammar is in docs/grammar.ebnf.
// Every parser throws SyntaxError with a 1-based position for malformed
// input and UnknownNameError for identifiers missing from the signature.

#include <string_view>

#include "tapo/guard.hpp"
#include "tapo/kb.hpp"
#include "tapo/program.hpp"
#include "tapo/syntax.hpp"

namespace tapo {

Concept parse_concept(std::string_view text, const Signature& sig);
Assertion parse_assertion(std::string_view text, const Signature& sig);
TBoxAxiom parse_axiom(std::string_view text, const Signature& sig);
GuardExpr parse_guard(std::string_view text, const Signature& sig);
Program parse_program(std::string_view text, const Signature& sig);

// Also throws ConfigError for duplicate declarations and ContextError for
// dangling context references.
KnowledgeBase parse_kb(std::string_view text);

bool is_keyword(std::string_view word);

}  // namespace tapo
