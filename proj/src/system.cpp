#include "multires/system.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <random>
#include <sstream>

#include "multires/errors.hpp"

namespace multires {

double resolution_at(const ResolutionSpec& spec, const Vec& x) {
  double eps;
  switch (spec.form) {
    case ResolutionSpec::Form::Constant: eps = spec.constant; break;
    case ResolutionSpec::Form::AffineNorm: eps = spec.u * norm2(x) + spec.v; break;
    default: eps = eval(*spec.expr, x); break;
  }
  if (!(eps > 0.0) || !std::isfinite(eps))
    throw SpecError("resolution must be positive and finite, got " + std::to_string(eps));
  return eps;
}

namespace {

// deterministic uniform double in [0,1), independent of libstdc++ internals
double next_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Vec sample_point(const Box& box, std::mt19937_64& rng) {
  Vec x(box.lo.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    x[i] = box.lo[i] + next_unit(rng) * (box.hi[i] - box.lo[i]);
  return x;
}

}  // namespace

void validate(const SystemModel& sys, const ResolutionSpec& spec) {
  if (sys.dim <= 0) throw SpecError("system dimension must be positive");
  if (static_cast<int>(sys.domain.lo.size()) != sys.dim ||
      static_cast<int>(sys.domain.hi.size()) != sys.dim)
    throw SpecError("domain box does not match the system dimension");
  for (int i = 0; i < sys.dim; ++i)
    if (!(sys.domain.lo[i] < sys.domain.hi[i]))
      throw SpecError("domain box is empty on axis " + std::to_string(i));
  if (sys.flow.in_dim != sys.dim || sys.flow.out_dim() != sys.dim)
    throw SpecError("flow must map the state space to itself");
  for (int i = 0; i < sys.dim; ++i) {
    if (!(sys.initial_set.lo[i] >= sys.domain.lo[i] - 1e-12 &&
          sys.initial_set.hi[i] <= sys.domain.hi[i] + 1e-12))
      throw SpecError("initial set must be contained in the domain");
  }

  // spot-check finiteness of the flow and positivity of the resolution
  std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
  for (int trial = 0; trial < 256; ++trial) {
    Vec x = trial == 0 ? sys.domain.lo : trial == 1 ? sys.domain.hi : sample_point(sys.domain, rng);
    Vec y = sys.flow.evaluate(x);
    for (double v : y)
      if (!std::isfinite(v)) throw EvaluationError("flow evaluates to a non-finite value");
    resolution_at(spec, x);
  }
}

std::vector<Vec> attracting_fixed_points(const SystemModel& sys) {
  const int n = sys.dim;
  double scale = 1.0;
  for (int d = 0; d < n; ++d) scale = std::max(scale, sys.domain.width(d));
  const double tol = 1e-12 * scale;

  // orbit iteration from a coarse start grid; divergent orbits are dropped
  std::vector<Vec> found;
  const int per_axis = n <= 2 ? 5 : 3;
  std::vector<int> idx(n, 0);
  while (true) {
    Vec x(n);
    for (int d = 0; d < n; ++d) {
      const double t = (idx[d] + 0.5) / per_axis;
      x[d] = sys.domain.lo[d] + t * sys.domain.width(d);
    }
    bool ok = false;
    for (int it = 0; it < 400; ++it) {
      Vec y = sys.step(x);
      double move = 0.0, mag = 0.0;
      for (int d = 0; d < n; ++d) {
        move = std::max(move, std::abs(y[d] - x[d]));
        mag = std::max(mag, std::abs(y[d]));
        if (!std::isfinite(y[d])) mag = std::numeric_limits<double>::infinity();
      }
      if (mag > 16.0 * scale || !std::isfinite(mag)) break;
      x = std::move(y);
      if (move <= tol) {
        ok = true;
        break;
      }
    }
    if (ok && sys.domain.contains(x, 0.0)) {
      bool dup = false;
      for (const Vec& p : found)
        if (sqdist(p, x) <= 1e-16 * scale * scale) dup = true;
      if (!dup) found.push_back(x);
    }
    int d = 0;
    while (d < n && ++idx[d] == per_axis) idx[d++] = 0;
    if (d == n) break;
  }
  return found;
}

void TransitionDataset::append(const Vec& p, const Vec& image, Provenance t) {
  x.push_back(p);
  fx.push_back(image);
  tag.push_back(t);
}

TransitionDataset sample_dataset(const SystemModel& sys, int n, std::uint64_t seed) {
  TransitionDataset data;
  data.dim = sys.dim;
  data.x.reserve(n);
  data.fx.reserve(n);
  std::mt19937_64 rng(seed);
  for (int i = 0; i < n; ++i) {
    Vec x = sample_point(sys.domain, rng);
    data.append(x, sys.step(x), Provenance::Seed);
  }
  return data;
}

std::string to_csv(const TransitionDataset& data) {
  std::string out;
  char buf[32];
  for (int i = 0; i < data.size(); ++i) {
    for (int d = 0; d < data.dim; ++d) {
      std::snprintf(buf, sizeof buf, "%.17g", data.x[i][d]);
      out += buf;
      out += ',';
    }
    for (int d = 0; d < data.dim; ++d) {
      std::snprintf(buf, sizeof buf, "%.17g", data.fx[i][d]);
      out += buf;
      out += d + 1 == data.dim ? '\n' : ',';
    }
  }
  return out;
}

TransitionDataset dataset_from_csv(const std::string& csv, int dim) {
  TransitionDataset data;
  data.dim = dim;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    Vec vals;
    std::string cell;
    while (std::getline(row, cell, ',')) vals.push_back(std::strtod(cell.c_str(), nullptr));
    if (static_cast<int>(vals.size()) != 2 * dim)
      throw SpecError("dataset row has wrong arity");
    data.append(Vec(vals.begin(), vals.begin() + dim), Vec(vals.begin() + dim, vals.end()),
                Provenance::Seed);
  }
  return data;
}

}  // namespace multires
