#pragma once

#include "gsn/dsl.hpp"

#include <string>

namespace gsn {

/// Graphviz rendering of the GSN symbol set: goals are boxes, strategies
/// parallelograms, solutions circles, contexts rounded boxes. Multiplicity,
/// optional and choice decorations become solid-dot, hollow-dot and diamond
/// edge tails; ACPs appear as a filled square in the edge label. Output is
/// byte-deterministic for identical input.
std::string to_dot(const dsl::Document &doc);

/// Canonical JSON schema:
///   {format_version: 1, modules: [{name, nodes, edges, choice_groups,
///    acps, public}]}
/// Deterministic field order and 2-space indentation.
std::string to_json(const dsl::Document &doc);

/// Strict inverse of to_json: rejects a missing or wrong format_version and
/// any unknown field at any level (throws Error).
dsl::Document document_from_json(const std::string &json_text);

} // namespace gsn
