// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>

namespace unlidar {

/// Coordinates are serialized with 9 significant digits.
std::string format_coord(double v);

/// Timestamps use the shortest representation that round-trips exactly.
std::string format_time(double v);

/// Value of `v` after a write/read cycle through format_coord.
double quantize_coord(double v);

/// Strict full-field parse; returns false on trailing garbage, empty or
/// non-finite input.
bool parse_finite(std::string_view text, double& out);
bool parse_int(std::string_view text, int& out);

}  // namespace unlidar
