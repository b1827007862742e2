#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

namespace surfclass {

// Exact rational scalar. Always in lowest terms with positive denominator
// (maintained by the backing type).
using Rat = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Three-valued verdict used wherever certainty cannot be guaranteed both ways.
enum class Ternary { Yes, No, Unknown };

inline const char* ternary_str(Ternary t) {
  switch (t) {
    case Ternary::Yes: return "yes";
    case Ternary::No: return "no";
    default: return "unknown";
  }
}

inline int sgn(const Rat& r) { return r.sign(); }

inline Rat rat_abs(const Rat& r) { return r < 0 ? Rat(-r) : r; }

// Parses "p/q" or "p". Rejects q == 0 and empty input.
inline std::optional<Rat> rat_parse(const std::string& s) {
  if (s.empty()) return std::nullopt;
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) {
      BigInt p(s);
      return Rat(p);
    }
    std::string ns = s.substr(0, slash), ds = s.substr(slash + 1);
    if (ns.empty() || ds.empty()) return std::nullopt;
    BigInt p(ns), q(ds);
    if (q == 0) return std::nullopt;
    return Rat(p, q);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

inline std::string rat_str(const Rat& r) {
  std::ostringstream os;
  if (denominator(r) == 1)
    os << numerator(r);
  else
    os << numerator(r) << '/' << denominator(r);
  return os.str();
}

struct Point2 {
  Rat x, y;
  friend bool operator==(const Point2& a, const Point2& b) { return a.x == b.x && a.y == b.y; }
  friend bool operator!=(const Point2& a, const Point2& b) { return !(a == b); }
  friend bool operator<(const Point2& a, const Point2& b) {
    if (a.x != b.x) return a.x < b.x;
    return a.y < b.y;
  }
};

inline Point2 operator+(const Point2& a, const Point2& b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(const Point2& a, const Point2& b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(const Rat& s, const Point2& p) { return {s * p.x, s * p.y}; }

inline Rat cross(const Point2& u, const Point2& v) { return u.x * v.y - u.y * v.x; }
inline Rat dot(const Point2& u, const Point2& v) { return u.x * v.x + u.y * v.y; }

// Squared Euclidean distance; exact.
inline Rat dist2(const Point2& a, const Point2& b) {
  Point2 d = b - a;
  return d.x * d.x + d.y * d.y;
}

inline Point2 midpoint(const Point2& a, const Point2& b) {
  return {(a.x + b.x) / 2, (a.y + b.y) / 2};
}

inline std::string point_str(const Point2& p) { return rat_str(p.x) + " " + rat_str(p.y); }

}  // namespace surfclass
