#pragma once

#include <charconv>
#include <ostream>
#include <string>
#include <vector>

namespace orbits {

/// Shortest round-trip decimal form of a double (17 significant digits at
/// most); keeps CSV/SVG output byte-deterministic.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// One CSV row, comma separated, LF terminated.
inline void write_csv_row(std::ostream& os, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) os << ',';
    os << cells[i];
  }
  os << '\n';
}

}  // namespace orbits
