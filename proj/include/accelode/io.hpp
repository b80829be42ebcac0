#pragma once

#include "accelode/analysis.hpp"
#include "accelode/geometry.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace accelode {

/// Shortest decimal string that round-trips to the same double.
inline std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  }
  return v;
}

/// Contour as CSV with header `q,p`, one vertex per row.
inline void write_contour_csv(std::ostream& os, const Contour& c) {
  os << "q,p\n";
  for (const Point2& v : c.vertices()) os << format_double(v.q) << ',' << format_double(v.p) << '\n';
}

/// Reads a `q,p` CSV (header optional) and validates the polygon.
inline Contour read_contour_csv(std::istream& is) {
  std::vector<Point2> v;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (line.empty() || line == "\r") continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("contour CSV: missing comma");
    if (first) {
      first = false;
      if (line.rfind("q,", 0) == 0) continue;
    }
    v.push_back({parse_double(std::string_view(line).substr(0, comma)),
                 parse_double(std::string_view(line).substr(comma + 1))});
  }
  return Contour::make(std::move(v));
}

/// Monitor rows `t_or_k,value,certified_bound`.
inline void write_monitor_csv(std::ostream& os, std::span<const LyapunovSample> samples) {
  os << "t_or_k,value,certified_bound\n";
  for (const LyapunovSample& s : samples) {
    os << format_double(s.t_or_k) << ',' << format_double(s.value) << ','
       << format_double(s.certified_bound) << '\n';
  }
}

}  // namespace accelode
