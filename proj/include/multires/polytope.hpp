#pragma once

#include <utility>
#include <vector>

#include "multires/linprog.hpp"
#include "multires/vec.hpp"

namespace multires {

// absolute tolerance on facet residuals for membership tests
inline constexpr double kMembershipTol = 1e-9;
// a certified counterexample must violate a target facet by at least this
inline constexpr double kViolationMargin = 1e-7;

// intersection of halfspaces row(r).x <= b[r], rows stored flat row-major
struct HPolytope {
  int dim = 0;
  std::vector<double> A;
  std::vector<double> b;

  int rows() const { return static_cast<int>(b.size()); }
  const double* row(int r) const { return A.data() + static_cast<std::size_t>(r) * dim; }
  void add_row(const Vec& normal, double offset);
  void add_box(const Box& box);
};

bool contains(const HPolytope& p, const Vec& x, double tol = kMembershipTol);

// cell dilated about its anchor: A (x - anchor) <= theta * (b - A anchor)
struct ScaledCell {
  HPolytope base;
  Vec anchor;
  double theta = 1.0;
  Vec slack;  // b - A*anchor, componentwise > 0 for interior anchors

  // rhs of row r in absolute coordinates: A x <= theta*slack + A*anchor
  double rhs(int r) const;
};

// requires the anchor strictly interior (every slack component positive)
ScaledCell scale(const HPolytope& cell, const Vec& anchor, double theta);
// anchored dilation without the interiority requirement (boundary anchors
// freeze their zero-slack rows); used by the uniform-grid baseline
ScaledCell scale_relaxed(const HPolytope& cell, const Vec& anchor, double theta);

bool contains(const ScaledCell& c, const Vec& x, double tol = kMembershipTol);
// max over rows of A(x-anchor) - theta*slack; <= 0 means inside
double max_residual(const ScaledCell& c, const Vec& x);

// max of dir.x over the polytope, with a maximizer
struct SupportResult {
  double value = 0.0;
  Vec arg;
};
SupportResult support_max(const HPolytope& p, const Vec& dir);

Box bounding_box(const HPolytope& p);
Box bounding_box(const ScaledCell& c);

// exact for dim <= 3 via vertex enumeration
std::vector<Vec> enumerate_vertices(const HPolytope& p);

// gamma = max distance from the anchor to the cell; exact for dim <= 3,
// a certified upper bound (<= sqrt(n) overestimate) above
double max_anchor_distance(const HPolytope& p, const Vec& anchor);

// center of the largest inscribed ball
Vec chebyshev_center(const HPolytope& p);

// Voronoi cells of the anchors clipped to the domain box; each cell keeps
// all k-1 bisector rows plus the 2n box rows, normals normalized to unit
std::vector<HPolytope> voronoi_cells(const std::vector<Vec>& anchors, const Box& domain);

// drops rows whose removal leaves the feasible set unchanged
HPolytope prune_redundant(const HPolytope& cell, const Vec& anchor);

// Voronoi cells with the pruning pass applied per cell
std::vector<HPolytope> voronoi_cells_pruned(const std::vector<Vec>& anchors, const Box& domain);

// bisects by the hyperplane through the anchor orthogonal to the longest
// bounding-box axis; returns the two halves with Chebyshev-center anchors
struct SplitResult {
  HPolytope cell_lo, cell_hi;
  Vec anchor_lo, anchor_hi;
};
SplitResult split_cell(const HPolytope& cell, const Vec& anchor);

}  // namespace multires
