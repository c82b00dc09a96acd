#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "multires/errors.hpp"
#include "multires/vec.hpp"

namespace multires {

// Closed interval with outward-rounded arithmetic. Endpoints are widened by
// one ulp after each operation, which over-approximates the exact real
// result without touching the FPU rounding mode.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  Interval() = default;
  Interval(double point) : lo(point), hi(point) {}
  Interval(double l, double h) : lo(l), hi(h) {}

  bool contains(double x) const { return lo <= x && x <= hi; }
  double width() const { return hi - lo; }
};

namespace detail {
inline double down(double x) {
  return std::nextafter(x, -std::numeric_limits<double>::infinity());
}
inline double up(double x) {
  return std::nextafter(x, std::numeric_limits<double>::infinity());
}
}  // namespace detail

inline Interval widen(double lo, double hi) {
  return {detail::down(lo), detail::up(hi)};
}

inline Interval operator+(Interval a, Interval b) {
  return widen(a.lo + b.lo, a.hi + b.hi);
}

inline Interval operator-(Interval a, Interval b) {
  return widen(a.lo - b.hi, a.hi - b.lo);
}

inline Interval operator-(Interval a) { return {-a.hi, -a.lo}; }

inline Interval operator*(Interval a, Interval b) {
  const double p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
  return widen(std::min(std::min(p1, p2), std::min(p3, p4)),
               std::max(std::max(p1, p2), std::max(p3, p4)));
}

inline Interval operator/(Interval a, Interval b) {
  if (b.lo <= 0.0 && b.hi >= 0.0)
    throw EvaluationError("interval division: divisor straddles zero");
  const double q1 = a.lo / b.lo, q2 = a.lo / b.hi, q3 = a.hi / b.lo, q4 = a.hi / b.hi;
  return widen(std::min(std::min(q1, q2), std::min(q3, q4)),
               std::max(std::max(q1, q2), std::max(q3, q4)));
}

inline Interval iv_abs(Interval a) {
  if (a.lo >= 0.0) return a;
  if (a.hi <= 0.0) return {-a.hi, -a.lo};
  return {0.0, std::max(-a.lo, a.hi)};
}

// x^k for a scalar endpoint, outward rounded via repeated interval squaring
inline Interval iv_pow_point(double x, int k) {
  Interval acc(1.0, 1.0);
  Interval base(x, x);
  while (k > 0) {
    if (k & 1) acc = acc * base;
    base = base * base;
    k >>= 1;
  }
  return acc;
}

// monotonicity-aware integer power
inline Interval iv_pow(Interval a, int k) {
  if (k < 0) throw EvaluationError("interval power: negative exponent");
  if (k == 0) return {1.0, 1.0};
  if (k % 2 == 1 || a.lo >= 0.0)
    return {iv_pow_point(a.lo, k).lo, iv_pow_point(a.hi, k).hi};
  if (a.hi <= 0.0) return {iv_pow_point(a.hi, k).lo, iv_pow_point(a.lo, k).hi};
  // even power straddling zero
  const double m = std::max(-a.lo, a.hi);
  return {0.0, iv_pow_point(m, k).hi};
}

inline Interval hull(Interval a, Interval b) {
  return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

using IBox = std::vector<Interval>;

inline IBox to_ibox(const Box& b) {
  IBox out(b.lo.size());
  for (std::size_t i = 0; i < b.lo.size(); ++i) out[i] = {b.lo[i], b.hi[i]};
  return out;
}

}  // namespace multires
