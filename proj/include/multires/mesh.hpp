#pragma once

#include <vector>

#include "multires/polytope.hpp"
#include "multires/vec.hpp"

namespace multires {

// finite list of (anchor, cell) pairs partitioning the domain
struct Mesh {
  Box domain;
  std::vector<Vec> anchors;
  std::vector<HPolytope> cells;
  std::vector<Vec> slack;      // per cell, b - A*anchor
  std::vector<double> gamma;   // max anchor-to-cell distance
  std::vector<Box> cell_bbox;

  int size() const { return static_cast<int>(anchors.size()); }
};

// computes slack/gamma/bboxes and validates anchors are interior
Mesh make_mesh(std::vector<Vec> anchors, std::vector<HPolytope> cells, const Box& domain);

// index of the cell containing x, boundary ties to the lowest index;
// x must lie in the domain
int quantize(const Mesh& mesh, const Vec& x, double tol = kMembershipTol);

// nearest-anchor index (lowest index on ties); defined for any point
int nearest_anchor(const Mesh& mesh, const Vec& x);

// quantize for a batch of points; parallel kernel with serial reference
std::vector<int> quantize_all(const Mesh& mesh, const std::vector<Vec>& xs);
std::vector<int> quantize_all_serial(const Mesh& mesh, const std::vector<Vec>& xs);

}  // namespace multires
