#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "multires/expr.hpp"
#include "multires/vec.hpp"

namespace multires {

// target resolution eps(x) > 0; constant, u*||x|| + v, or an expression
struct ResolutionSpec {
  enum class Form { Constant, AffineNorm, Expression };
  Form form = Form::Constant;
  double constant = 1.0;
  double u = 0.0, v = 0.0;
  ExprPtr expr;
  std::string expr_source;

  bool is_constant() const { return form == Form::Constant; }
};

double resolution_at(const ResolutionSpec& spec, const Vec& x);

// discrete-time system x+ = f(x) on a box domain
struct SystemModel {
  int dim = 0;
  Box domain;
  Box initial_set;  // defaults to domain
  ExpressionMap flow;

  Vec step(const Vec& x) const { return flow.evaluate(x); }
  bool affine() const { return flow.is_affine(); }
};

// validates shapes, finiteness of f on sampled points, eps > 0 on samples
void validate(const SystemModel& sys, const ResolutionSpec& spec);

// attracting fixed points of the flow inside the domain, located by orbit
// iteration from a coarse start grid.  A cell holding one of these points
// self-transitions forever, so its anchor is pinned there: with the anchor
// exactly at x* the self-edge is contractive and its scale bound stabilises
std::vector<Vec> attracting_fixed_points(const SystemModel& sys);

enum class Provenance : std::uint8_t { Seed, Counterexample };

struct TransitionDataset {
  int dim = 0;
  std::vector<Vec> x;
  std::vector<Vec> fx;
  std::vector<Provenance> tag;

  int size() const { return static_cast<int>(x.size()); }
  void append(const Vec& p, const Vec& image, Provenance t);
};

// n uniform i.i.d. points in the domain paired with exact images;
// deterministic given seed
TransitionDataset sample_dataset(const SystemModel& sys, int n, std::uint64_t seed);

std::string to_csv(const TransitionDataset& data);
TransitionDataset dataset_from_csv(const std::string& csv, int dim);

}  // namespace multires
