#pragma once

#include <string>
#include <string_view>

#include "lrbm/boosting.hpp"

namespace lrbm {

inline constexpr int kModelFormatVersion = 1;

// JSON document with the format version, target head, mode declarations, psi0,
// training config and every tree as nested {test, true, false} / {leaf} nodes.
// Leaf parameters are written as [d, c, W, U0, U1] with round-trip precision,
// so parse_model(serialize_model(m)) re-serializes byte-identically.
std::string serialize_model(const BoostedModel& model);

// Throws ParseError on malformed documents or an unsupported version.
BoostedModel parse_model(std::string_view text);

void save_model(const BoostedModel& model, const std::string& path);
BoostedModel load_model(const std::string& path);

}  // namespace lrbm
