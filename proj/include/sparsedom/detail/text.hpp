#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <sstream>
#include <string>

#include "sparsedom/errors.hpp"

namespace sparsedom::detail {

/// Round-trip-exact decimal rendering of a double (shortest form that
/// re-parses to the same bits is not needed; 17 significant digits always
/// round-trips and keeps files byte-deterministic).
inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw ParseError("bad floating-point token '" + s + "'");
  return v;
}

inline std::int64_t parse_int(const std::string& s) {
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0')
    throw ParseError("bad integer token '" + s + "'");
  return v;
}

/// Reads one line and splits it on single spaces; throws on EOF.
inline std::vector<std::string> read_tokens(std::istream& is,
                                            const char* what) {
  std::string line;
  if (!std::getline(is, line))
    throw ParseError(std::string("unexpected end of file while reading ") + what);
  std::vector<std::string> tok;
  std::istringstream ls(line);
  std::string t;
  while (ls >> t) tok.push_back(t);
  return tok;
}

inline void expect(bool cond, const std::string& what) {
  if (!cond) throw ParseError(what);
}

}  // namespace sparsedom::detail
