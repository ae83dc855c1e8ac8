#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "lrbm/logic.hpp"
#include "lrbm/schema.hpp"

namespace lrbm {

// Text formats:
//   modes     mode: pred(+type, -type).
//   facts     pred(c1, c2, ..., cn).        % comment
//   clauses   head :- lit, \+ lit, \+ (lit, lit).
//             lit ∧ ¬lit ∧ ¬(lit ∧ lit) ⇒ head
// Identifiers starting with an upper-case letter or '_' are variables; anything
// else (lower case, digits, "quoted") is a constant. Argument types come from
// the predicate's mode declaration.

Schema parse_modes(std::string_view text);
std::string serialize_modes(const Schema& schema);

// Throws ParseError (with line) on malformed input, TypeError on undeclared
// predicates, arity mismatches and conflicting constant types.
KnowledgeBase parse_facts(std::string_view text, const Schema& schema);
std::string serialize_facts(const KnowledgeBase& kb);

// Ground atoms, one per statement.
std::vector<Atom> parse_atoms(std::string_view text, const Schema& schema);
std::string serialize_atoms(std::span<const Atom> atoms);

// A single atom; may contain variables. A trailing period is optional.
Atom parse_atom(std::string_view text, const Schema& schema);
Clause parse_clause(std::string_view text, const Schema& schema);

}  // namespace lrbm
