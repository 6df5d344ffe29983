#pragma once

#include <span>
#include <string>

namespace cq {

/// Shortest round-trip decimal representation, locale independent.
std::string format_double(double v);

/// JSON-style numeric array: [a,b,c].
std::string format_json_array(std::span<const double> values);

/// Wraps a field in double quotes, escaping embedded quotes (RFC 4180).
std::string csv_quote(const std::string& field);

/// Writes `content` to `path`, throwing std::runtime_error with the path on failure.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace cq
