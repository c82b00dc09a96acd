#include "multires/linprog.hpp"

#include <cmath>
#include <limits>

#include "multires/errors.hpp"

namespace multires {

void LpProblem::add_row(Vec a, double b) {
  rows.push_back(std::move(a));
  rhs.push_back(b);
}

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-9;

// dense tableau with Bland's rule; free variables are split as x = u - w
struct Tableau {
  int m, ncol;
  std::vector<Vec> t;  // m rows, ncol columns + rhs at [ncol]
  Vec obj;             // reduced objective row, value at [ncol] (negated z)
  std::vector<int> basis;
  std::vector<char> allowed;

  Tableau(int rows, int cols) : m(rows), ncol(cols) {
    t.assign(m, Vec(ncol + 1, 0.0));
    obj.assign(ncol + 1, 0.0);
    basis.assign(m, -1);
    allowed.assign(ncol, 1);
  }

  void pivot(int r, int c) {
    const double p = t[r][c];
    for (int j = 0; j <= ncol; ++j) t[r][j] /= p;
    for (int i = 0; i < m; ++i) {
      if (i == r) continue;
      const double f = t[i][c];
      if (f == 0.0) continue;
      for (int j = 0; j <= ncol; ++j) t[i][j] -= f * t[r][j];
      t[i][c] = 0.0;
    }
    const double f = obj[c];
    if (f != 0.0) {
      for (int j = 0; j <= ncol; ++j) obj[j] -= f * t[r][j];
      obj[c] = 0.0;
    }
    basis[r] = c;
  }

  // maximize; obj holds -c reduced by the current basis
  LpStatus run() {
    const long max_iters = 200 + 50L * (m + ncol);
    for (long iter = 0; iter < max_iters; ++iter) {
      int enter = -1;
      for (int j = 0; j < ncol; ++j) {
        if (allowed[j] && obj[j] < -kCostTol) {
          enter = j;
          break;  // Bland: smallest eligible index
        }
      }
      if (enter < 0) return LpStatus::Optimal;
      int leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < m; ++i) {
        if (t[i][enter] <= kPivotTol) continue;
        const double ratio = t[i][ncol] / t[i][enter];
        if (leave < 0 || ratio < best - 1e-12) {
          best = ratio;
          leave = i;
        } else if (ratio <= best + 1e-12 && basis[i] < basis[leave]) {
          if (ratio < best) best = ratio;
          leave = i;  // degenerate tie: smallest basic index
        }
      }
      if (leave < 0) return LpStatus::Unbounded;
      pivot(leave, enter);
    }
    throw SolverError("simplex hit the iteration cap");
  }
};

}  // namespace

LpResult lp_solve(const LpProblem& p) {
  const int n = p.nvars;
  const int m = static_cast<int>(p.rows.size());
  const int nv = 2 * n;  // split free variables
  int nart = 0;
  for (double b : p.rhs)
    if (b < 0.0) ++nart;

  const int ncol = nv + m + nart;
  Tableau tab(m, ncol);

  int art = nv + m;
  for (int i = 0; i < m; ++i) {
    const double sign = p.rhs[i] < 0.0 ? -1.0 : 1.0;
    for (int j = 0; j < n; ++j) {
      tab.t[i][j] = sign * p.rows[i][j];
      tab.t[i][n + j] = -sign * p.rows[i][j];
    }
    tab.t[i][nv + i] = sign;  // slack
    tab.t[i][ncol] = sign * p.rhs[i];
    if (sign < 0.0) {
      tab.t[i][art] = 1.0;
      tab.basis[i] = art++;
    } else {
      tab.basis[i] = nv + i;
    }
  }

  if (nart > 0) {
    // phase 1: minimize the artificial sum
    for (int j = nv + m; j < ncol; ++j) tab.obj[j] = 1.0;
    for (int i = 0; i < m; ++i)
      if (tab.basis[i] >= nv + m)
        for (int j = 0; j <= ncol; ++j) tab.obj[j] -= tab.t[i][j];
    LpStatus st = tab.run();
    if (st == LpStatus::Unbounded) throw SolverError("phase 1 unbounded");
    if (tab.obj[ncol] < -1e-7) return {LpStatus::Infeasible, 0.0, {}};
    // drive leftover artificials out of the basis where possible
    for (int i = 0; i < m; ++i) {
      if (tab.basis[i] < nv + m) continue;
      int c = -1;
      for (int j = 0; j < nv + m; ++j)
        if (std::fabs(tab.t[i][j]) > kPivotTol) {
          c = j;
          break;
        }
      if (c >= 0) tab.pivot(i, c);
    }
    for (int j = nv + m; j < ncol; ++j) tab.allowed[j] = 0;
  }

  // phase 2
  for (int j = 0; j <= ncol; ++j) tab.obj[j] = 0.0;
  for (int j = 0; j < n; ++j) {
    tab.obj[j] = -p.c[j];
    tab.obj[n + j] = p.c[j];
  }
  for (int i = 0; i < m; ++i) {
    const int bj = tab.basis[i];
    const double f = tab.obj[bj];
    if (f != 0.0) {
      for (int j = 0; j <= ncol; ++j) tab.obj[j] -= f * tab.t[i][j];
      tab.obj[bj] = 0.0;
    }
  }
  LpStatus st = tab.run();
  if (st == LpStatus::Unbounded) return {LpStatus::Unbounded, 0.0, {}};

  LpResult res;
  res.status = LpStatus::Optimal;
  Vec z(nv, 0.0);
  for (int i = 0; i < m; ++i)
    if (tab.basis[i] < nv) z[tab.basis[i]] = tab.t[i][ncol];
  res.x.resize(n);
  for (int j = 0; j < n; ++j) res.x[j] = z[j] - z[n + j];
  res.objective = tab.obj[ncol];
  return res;
}

}  // namespace multires
