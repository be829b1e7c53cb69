#pragma once

#include <string>
#include <string_view>

namespace lagflow {

// 17 significant digits, so strtod recovers the exact double. Non-finite
// values print as inf, -inf, nan.
std::string format_real(double x);

// Inverse of format_real; throws ConfigError on malformed input.
double parse_real(std::string_view text);

}  // namespace lagflow
