#pragma once

#include <climits>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nel::detail {

// Splits on a single separator, keeping empty fields.
inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t next = s.find(sep, pos);
    if (next == std::string_view::npos) {
      out.push_back(s.substr(pos));
      return out;
    }
    out.push_back(s.substr(pos, next - pos));
    pos = next + 1;
  }
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

inline bool parse_long(std::string_view s, long& out) {
  if (s.empty()) return false;
  std::string buf(s);
  char* end = nullptr;
  long v = std::strtol(buf.c_str(), &end, 10);
  if (end != buf.c_str() + buf.size()) return false;
  out = v;
  return true;
}

inline bool parse_int(std::string_view s, int& out) {
  long v = 0;
  if (!parse_long(s, v)) return false;
  if (v < INT_MIN || v > INT_MAX) return false;
  out = static_cast<int>(v);
  return true;
}

inline bool parse_double(std::string_view s, double& out) {
  if (s.empty()) return false;
  std::string buf(s);
  char* end = nullptr;
  double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size()) return false;
  out = v;
  return true;
}

inline long require_long(std::string_view s, const std::string& what) {
  long v = 0;
  if (!parse_long(s, v)) {
    throw std::invalid_argument("bad integer for " + what + ": '" + std::string(s) + "'");
  }
  return v;
}

inline int require_int(std::string_view s, const std::string& what) {
  int v = 0;
  if (!parse_int(s, v)) {
    throw std::invalid_argument("bad integer for " + what + ": '" + std::string(s) + "'");
  }
  return v;
}

inline double require_double(std::string_view s, const std::string& what) {
  double v = 0.0;
  if (!parse_double(s, v)) {
    throw std::invalid_argument("bad number for " + what + ": '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace nel::detail
