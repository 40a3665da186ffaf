#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace csib {

// Runtime contract check. Violations are programming or input errors and
// surface as exceptions so the CLI can report them with a clean exit code.
inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::runtime_error(msg);
}

inline bool is_finite(double x) { return std::isfinite(x); }

// Formats a double as decimal text with 17 significant digits, enough to
// round-trip an IEEE-754 double exactly through strtod.
std::string format_double(double x);

double parse_double(const std::string& s, const std::string& context);
long parse_long(const std::string& s, const std::string& context);

// Writes via a sibling temp file and renames into place, so a failed write
// never leaves a partial file at `path`.
void atomic_write_file(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace csib
