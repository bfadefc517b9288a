#pragma once

#include <string>
#include <string_view>

namespace mdcrbm {

std::string trim(std::string_view s);

// Shortest decimal that round-trips the exact double (std::to_chars).
std::string format_double(double v);

// Full-string parse; throws DataFormatError on trailing junk or empty input.
double parse_double(std::string_view s);

}  // namespace mdcrbm
