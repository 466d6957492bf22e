#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace scenario {

/// Closed interval with outward-rounded arithmetic: the result of any
/// binary64 evaluation over points in the operands lies inside the result.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  static Interval point(double x) { return {x, x}; }

  bool contains(double x) const { return lo <= x && x <= hi; }
  bool operator==(const Interval&) const = default;
};

namespace detail {
inline double down(double x) { return std::nextafter(x, -std::numeric_limits<double>::infinity()); }
inline double up(double x) { return std::nextafter(x, std::numeric_limits<double>::infinity()); }
}  // namespace detail

inline Interval operator+(const Interval& a, const Interval& b) {
  return {detail::down(a.lo + b.lo), detail::up(a.hi + b.hi)};
}

inline Interval operator-(const Interval& a) { return {-a.hi, -a.lo}; }

inline Interval operator-(const Interval& a, const Interval& b) {
  return {detail::down(a.lo - b.hi), detail::up(a.hi - b.lo)};
}

inline Interval operator*(const Interval& a, const Interval& b) {
  const double p[] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
  double lo = p[0];
  double hi = p[0];
  for (double v : p) {
    // 0 * inf never arises: ranges are finite.
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {detail::down(lo), detail::up(hi)};
}

}  // namespace scenario
