#pragma once

#include <string_view>

#include <nlohmann/json_fwd.hpp>

namespace isic {

// Minimal TOML reader covering what config files use: comments, [tables]
// (one level), key = value with basic strings, integers, floats, booleans,
// and single-line arrays of those. Returns the equivalent JSON object.
// Throws Error(Parse) with a line number for anything outside the subset.
nlohmann::json parse_toml_lite(std::string_view text);

}  // namespace isic
