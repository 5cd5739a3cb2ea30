#pragma once

#include <string>
#include <string_view>

#include "mfid/core.hpp"

namespace mfid::io {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

/// Comma-separated doubles; throws std::runtime_error on malformed fields.
Vector parse_csv_doubles(std::string_view line);

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& content);

}  // namespace mfid::io
