#pragma once

#include <string_view>

namespace lagflow {

// Which invariant region a run lives in: two-convex (tracks log det S^[2]) or
// area-decreasing (tracks log det P^[2]).
enum class Flavor { two_convex, area_decreasing };

std::string_view to_string(Flavor f);
// Throws ConfigError for unknown names.
Flavor parse_flavor(std::string_view s);

}  // namespace lagflow
