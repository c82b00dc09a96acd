#include "multires/mesh.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "multires/errors.hpp"

namespace multires {

Mesh make_mesh(std::vector<Vec> anchors, std::vector<HPolytope> cells, const Box& domain) {
  if (anchors.size() != cells.size()) throw GeometryError("anchor/cell count mismatch");
  if (anchors.empty()) throw GeometryError("empty mesh");
  Mesh mesh;
  mesh.domain = domain;
  mesh.anchors = std::move(anchors);
  mesh.cells = std::move(cells);
  const int k = mesh.size();
  mesh.slack.resize(k);
  mesh.gamma.resize(k);
  mesh.cell_bbox.resize(k);
  for (int i = 0; i < k; ++i) {
    const HPolytope& c = mesh.cells[i];
    const Vec& a = mesh.anchors[i];
    if (static_cast<int>(a.size()) != domain.dim() || c.dim != domain.dim())
      throw GeometryError("mesh dimension mismatch");
    Vec s(c.rows());
    for (int r = 0; r < c.rows(); ++r) {
      s[r] = c.b[r] - dot(c.row(r), a.data(), c.dim);
      if (s[r] <= 0.0)
        throw AnchorNotInteriorError("anchor " + std::to_string(i) + " not interior to its cell");
    }
    mesh.slack[i] = std::move(s);
    mesh.gamma[i] = max_anchor_distance(c, a);
    mesh.cell_bbox[i] = bounding_box(c);
  }
  return mesh;
}

int quantize(const Mesh& mesh, const Vec& x, double tol) {
  if (!mesh.domain.contains(x, tol)) throw DomainError("point outside the domain");
  int best = -1;
  double best_res = std::numeric_limits<double>::infinity();
  for (int i = 0; i < mesh.size(); ++i) {
    const HPolytope& c = mesh.cells[i];
    double res = -std::numeric_limits<double>::infinity();
    for (int r = 0; r < c.rows(); ++r) {
      res = std::max(res, dot(c.row(r), x.data(), c.dim) - c.b[r]);
      if (res > tol) break;
    }
    if (res <= tol) return i;  // cells scanned in index order: lowest wins ties
    if (res < best_res) {
      best_res = res;
      best = i;
    }
  }
  // cells cover the domain up to roundoff; take the least-violated cell
  if (best >= 0 && best_res <= 1e-6) return best;
  throw GeometryError("point not covered by any cell");
}

int nearest_anchor(const Mesh& mesh, const Vec& x) {
  int best = 0;
  double bd = sqdist(mesh.anchors[0], x);
  for (int i = 1; i < mesh.size(); ++i) {
    const double d = sqdist(mesh.anchors[i], x);
    if (d < bd) {
      bd = d;
      best = i;
    }
  }
  return best;
}

std::vector<int> quantize_all_serial(const Mesh& mesh, const std::vector<Vec>& xs) {
  std::vector<int> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = quantize(mesh, xs[i]);
  return out;
}

std::vector<int> quantize_all(const Mesh& mesh, const std::vector<Vec>& xs) {
  const int n = static_cast<int>(xs.size());
  std::vector<int> out(xs.size());
  bool failed = false;
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    try {
      out[i] = quantize(mesh, xs[i]);
    } catch (const std::runtime_error&) {
#pragma omp critical
      failed = true;
    }
  }
  if (failed) throw GeometryError("batch quantization hit an uncovered point");
  return out;
}

}  // namespace multires
