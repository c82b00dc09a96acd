#include "multires/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "multires/errors.hpp"

namespace multires {

void HPolytope::add_row(const Vec& normal, double offset) {
  if (static_cast<int>(normal.size()) != dim)
    throw GeometryError("row dimension mismatch");
  A.insert(A.end(), normal.begin(), normal.end());
  b.push_back(offset);
}

void HPolytope::add_box(const Box& box) {
  if (box.dim() != dim) throw GeometryError("box dimension mismatch");
  Vec n(dim, 0.0);
  for (int i = 0; i < dim; ++i) {
    n[i] = 1.0;
    add_row(n, box.hi[i]);
    n[i] = -1.0;
    add_row(n, -box.lo[i]);
    n[i] = 0.0;
  }
}

bool contains(const HPolytope& p, const Vec& x, double tol) {
  for (int r = 0; r < p.rows(); ++r)
    if (dot(p.row(r), x.data(), p.dim) > p.b[r] + tol) return false;
  return true;
}

double ScaledCell::rhs(int r) const {
  return theta * slack[r] + dot(base.row(r), anchor.data(), base.dim);
}

static ScaledCell scale_impl(const HPolytope& cell, const Vec& anchor, double theta, bool strict) {
  if (theta <= 0.0) throw GeometryError("scale factor must be positive");
  if (static_cast<int>(anchor.size()) != cell.dim)
    throw GeometryError("anchor dimension mismatch");
  ScaledCell c;
  c.base = cell;
  c.anchor = anchor;
  c.theta = theta;
  c.slack.resize(cell.rows());
  for (int r = 0; r < cell.rows(); ++r) {
    double s = cell.b[r] - dot(cell.row(r), anchor.data(), cell.dim);
    if (strict) {
      if (s <= 0.0) throw AnchorNotInteriorError("anchor lies on or outside facet " + std::to_string(r));
    } else {
      if (s < -kMembershipTol) throw AnchorNotInteriorError("anchor outside facet " + std::to_string(r));
      s = std::max(s, 0.0);
    }
    c.slack[r] = s;
  }
  return c;
}

ScaledCell scale(const HPolytope& cell, const Vec& anchor, double theta) {
  return scale_impl(cell, anchor, theta, true);
}

ScaledCell scale_relaxed(const HPolytope& cell, const Vec& anchor, double theta) {
  return scale_impl(cell, anchor, theta, false);
}

bool contains(const ScaledCell& c, const Vec& x, double tol) {
  return max_residual(c, x) <= tol;
}

double max_residual(const ScaledCell& c, const Vec& x) {
  double worst = -std::numeric_limits<double>::infinity();
  const int n = c.base.dim;
  for (int r = 0; r < c.base.rows(); ++r) {
    const double* a = c.base.row(r);
    double lhs = 0.0;
    for (int i = 0; i < n; ++i) lhs += a[i] * (x[i] - c.anchor[i]);
    worst = std::max(worst, lhs - c.theta * c.slack[r]);
  }
  return worst;
}

SupportResult support_max(const HPolytope& p, const Vec& dir) {
  LpProblem lp;
  lp.nvars = p.dim;
  lp.c = dir;
  lp.rows.reserve(p.rows());
  for (int r = 0; r < p.rows(); ++r) {
    lp.rows.emplace_back(p.row(r), p.row(r) + p.dim);
    lp.rhs.push_back(p.b[r]);
  }
  LpResult res = lp_solve(lp);
  if (res.status == LpStatus::Infeasible) throw EmptyPolytopeError("support query on an empty polytope");
  if (res.status == LpStatus::Unbounded) throw GeometryError("support query unbounded");
  return {res.objective, res.x};
}

Box bounding_box(const HPolytope& p) {
  Box box;
  box.lo.resize(p.dim);
  box.hi.resize(p.dim);
  Vec dir(p.dim, 0.0);
  for (int i = 0; i < p.dim; ++i) {
    dir[i] = 1.0;
    box.hi[i] = support_max(p, dir).value;
    dir[i] = -1.0;
    box.lo[i] = -support_max(p, dir).value;
    dir[i] = 0.0;
  }
  return box;
}

Box bounding_box(const ScaledCell& c) {
  // the scaled cell is exactly the anchored dilation of the base cell
  Box base = bounding_box(c.base);
  Box out = base;
  for (int i = 0; i < c.base.dim; ++i) {
    out.lo[i] = c.anchor[i] + c.theta * (base.lo[i] - c.anchor[i]);
    out.hi[i] = c.anchor[i] + c.theta * (base.hi[i] - c.anchor[i]);
  }
  return out;
}

namespace {

// solve the dim x dim system formed by the selected rows; false if singular
bool solve_square(const HPolytope& p, const int* idx, int n, Vec& out) {
  double M[3][4];
  for (int i = 0; i < n; ++i) {
    const double* a = p.row(idx[i]);
    for (int j = 0; j < n; ++j) M[i][j] = a[j];
    M[i][n] = p.b[idx[i]];
  }
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int i = col + 1; i < n; ++i)
      if (std::fabs(M[i][col]) > std::fabs(M[piv][col])) piv = i;
    if (std::fabs(M[piv][col]) < 1e-10) return false;
    if (piv != col)
      for (int j = 0; j <= n; ++j) std::swap(M[piv][j], M[col][j]);
    for (int i = 0; i < n; ++i) {
      if (i == col) continue;
      const double f = M[i][col] / M[col][col];
      for (int j = col; j <= n; ++j) M[i][j] -= f * M[col][j];
    }
  }
  out.resize(n);
  for (int i = 0; i < n; ++i) out[i] = M[i][n] / M[i][i];
  return true;
}

}  // namespace

std::vector<Vec> enumerate_vertices(const HPolytope& p) {
  const int n = p.dim;
  if (n > 3) throw UnsupportedDimensionError("vertex enumeration supports up to three dimensions");
  const int m = p.rows();
  std::vector<Vec> verts;
  constexpr double kVertexTol = 1e-7;

  if (n == 1) {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (int r = 0; r < m; ++r) {
      const double a = p.row(r)[0];
      if (a > 1e-12) hi = std::min(hi, p.b[r] / a);
      else if (a < -1e-12) lo = std::max(lo, p.b[r] / a);
      else if (p.b[r] < -kVertexTol) return {};
    }
    if (!std::isfinite(lo) || !std::isfinite(hi)) throw GeometryError("unbounded interval");
    if (lo > hi + kVertexTol) return {};
    verts.push_back({lo});
    if (hi - lo > 1e-12) verts.push_back({hi});
    return verts;
  }

  auto consider = [&](const int* idx) {
    Vec x;
    if (!solve_square(p, idx, n, x)) return;
    if (!contains(p, x, kVertexTol)) return;
    for (const Vec& v : verts)
      if (sqdist(v, x) < 1e-18) return;
    verts.push_back(std::move(x));
  };

  int idx[3];
  if (n == 2) {
    for (idx[0] = 0; idx[0] < m; ++idx[0])
      for (idx[1] = idx[0] + 1; idx[1] < m; ++idx[1]) consider(idx);
  } else {
    for (idx[0] = 0; idx[0] < m; ++idx[0])
      for (idx[1] = idx[0] + 1; idx[1] < m; ++idx[1])
        for (idx[2] = idx[1] + 1; idx[2] < m; ++idx[2]) consider(idx);
  }
  return verts;
}

double max_anchor_distance(const HPolytope& p, const Vec& anchor) {
  if (p.dim <= 3) {
    std::vector<Vec> verts = enumerate_vertices(p);
    if (verts.empty()) throw EmptyPolytopeError("cell has no vertices");
    double best = 0.0;
    for (const Vec& v : verts) best = std::max(best, std::sqrt(sqdist(v, anchor)));
    return best;
  }
  // farthest-corner bound from the bounding box; certified overestimate
  Box box = bounding_box(p);
  double s = 0.0;
  for (int i = 0; i < p.dim; ++i) {
    const double d = std::max(box.hi[i] - anchor[i], anchor[i] - box.lo[i]);
    s += d * d;
  }
  return std::sqrt(s);
}

Vec chebyshev_center(const HPolytope& p) {
  const int n = p.dim;
  LpProblem lp;
  lp.nvars = n + 1;
  lp.c.assign(n + 1, 0.0);
  lp.c[n] = 1.0;
  for (int r = 0; r < p.rows(); ++r) {
    Vec row(p.row(r), p.row(r) + n);
    row.push_back(norm2(row));
    lp.add_row(std::move(row), p.b[r]);
  }
  // keep the radius variable bounded even for degenerate inputs
  Vec cap(n + 1, 0.0);
  cap[n] = -1.0;
  lp.add_row(cap, 0.0);
  LpResult res = lp_solve(lp);
  if (res.status == LpStatus::Infeasible) throw EmptyPolytopeError("chebyshev center of an empty polytope");
  if (res.status == LpStatus::Unbounded) throw GeometryError("chebyshev center unbounded");
  if (res.objective <= 0.0) throw GeometryError("polytope has empty interior");
  return Vec(res.x.begin(), res.x.begin() + n);
}

std::vector<HPolytope> voronoi_cells(const std::vector<Vec>& anchors, const Box& domain) {
  const int k = static_cast<int>(anchors.size());
  const int n = domain.dim();
  if (k == 0) throw GeometryError("no anchors");
  std::vector<HPolytope> cells(k);
  for (int i = 0; i < k; ++i) {
    HPolytope& c = cells[i];
    c.dim = n;
    c.add_box(domain);
    Vec a(n);
    for (int j = 0; j < k; ++j) {
      if (j == i) continue;
      double d2 = sqdist(anchors[j], anchors[i]);
      if (d2 < 1e-24) throw GeometryError("coincident anchors " + std::to_string(i) + " and " + std::to_string(j));
      const double d = std::sqrt(d2);
      double mid = 0.0;
      for (int t = 0; t < n; ++t) {
        a[t] = (anchors[j][t] - anchors[i][t]) / d;
        mid += a[t] * 0.5 * (anchors[i][t] + anchors[j][t]);
      }
      c.add_row(a, mid);
    }
  }
  return cells;
}

HPolytope prune_redundant(const HPolytope& cell, const Vec& anchor) {
  const int n = cell.dim;
  const int m = cell.rows();
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  Vec slack(m);
  for (int r = 0; r < m; ++r) slack[r] = cell.b[r] - dot(cell.row(r), anchor.data(), n);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return slack[a] < slack[b]; });

  HPolytope kept;
  kept.dim = n;
  double radius = std::numeric_limits<double>::infinity();

  auto update_radius = [&]() {
    double s = 0.0;
    Vec dir(n, 0.0);
    for (int i = 0; i < n; ++i) {
      double lo, hi;
      dir[i] = 1.0;
      LpProblem up;
      up.nvars = n;
      up.c = dir;
      for (int r = 0; r < kept.rows(); ++r) up.add_row(Vec(kept.row(r), kept.row(r) + n), kept.b[r]);
      LpResult rh = lp_solve(up);
      if (rh.status != LpStatus::Optimal) return;  // still unbounded
      hi = rh.objective;
      dir[i] = -1.0;
      up.c = dir;
      LpResult rl = lp_solve(up);
      if (rl.status != LpStatus::Optimal) return;
      lo = -rl.objective;
      dir[i] = 0.0;
      const double d = std::max(hi - anchor[i], anchor[i] - lo);
      s += d * d;
    }
    radius = std::sqrt(std::max(s, 0.0));
  };

  for (int oi = 0; oi < m; ++oi) {
    const int r = order[oi];
    // every remaining halfspace contains the ball enclosing the kept set
    if (slack[r] >= radius) break;
    bool keep = true;
    if (kept.rows() > 0) {
      LpProblem lp;
      lp.nvars = n;
      lp.c.assign(cell.row(r), cell.row(r) + n);
      for (int q = 0; q < kept.rows(); ++q) lp.add_row(Vec(kept.row(q), kept.row(q) + n), kept.b[q]);
      LpResult res = lp_solve(lp);
      if (res.status == LpStatus::Infeasible) throw EmptyPolytopeError("pruning an empty cell");
      if (res.status == LpStatus::Optimal && res.objective <= cell.b[r] + 1e-10) keep = false;
    }
    if (keep) {
      kept.add_row(Vec(cell.row(r), cell.row(r) + n), cell.b[r]);
      update_radius();
    }
  }
  return kept;
}

std::vector<HPolytope> voronoi_cells_pruned(const std::vector<Vec>& anchors, const Box& domain) {
  std::vector<HPolytope> cells = voronoi_cells(anchors, domain);
  const int k = static_cast<int>(cells.size());
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < k; ++i) cells[i] = prune_redundant(cells[i], anchors[i]);
  return cells;
}

SplitResult split_cell(const HPolytope& cell, const Vec& anchor) {
  const int n = cell.dim;
  Box box = bounding_box(cell);
  int axis = box.widest_axis();
  if (box.width(axis) <= 1e-12) throw SplitError("cell too thin to split");

  SplitResult out;
  out.cell_lo = cell;
  out.cell_hi = cell;
  Vec e(n, 0.0);
  e[axis] = 1.0;
  out.cell_lo.add_row(e, anchor[axis]);
  e[axis] = -1.0;
  out.cell_hi.add_row(e, -anchor[axis]);
  try {
    out.anchor_lo = chebyshev_center(out.cell_lo);
    out.anchor_hi = chebyshev_center(out.cell_hi);
  } catch (const GeometryError& err) {
    throw SplitError(std::string("degenerate split: ") + err.what());
  }
  return out;
}

}  // namespace multires
