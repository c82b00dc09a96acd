#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace multires {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double dot(const double* a, const double* b, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

inline double dist2(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

inline double sqdist(const double* a, const double* b, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline double sqdist(const Vec& a, const Vec& b) {
  return sqdist(a.data(), b.data(), static_cast<int>(a.size()));
}

// axis-aligned box, lo[i] <= x[i] <= hi[i]
struct Box {
  Vec lo, hi;

  int dim() const { return static_cast<int>(lo.size()); }

  bool contains(const Vec& x, double tol) const {
    for (std::size_t i = 0; i < lo.size(); ++i)
      if (x[i] < lo[i] - tol || x[i] > hi[i] + tol) return false;
    return true;
  }

  double width(int axis) const { return hi[axis] - lo[axis]; }

  int widest_axis() const {
    int best = 0;
    for (int i = 1; i < dim(); ++i)
      if (width(i) > width(best)) best = i;
    return best;
  }

  double max_width() const { return width(widest_axis()); }

  Vec midpoint() const {
    Vec m(lo.size());
    for (std::size_t i = 0; i < lo.size(); ++i) m[i] = 0.5 * (lo[i] + hi[i]);
    return m;
  }

  double diameter() const {
    double s = 0.0;
    for (std::size_t i = 0; i < lo.size(); ++i) {
      const double d = hi[i] - lo[i];
      s += d * d;
    }
    return std::sqrt(s);
  }
};

}  // namespace multires
