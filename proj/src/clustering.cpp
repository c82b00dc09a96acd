#include "multires/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "multires/errors.hpp"

namespace multires {

namespace {

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// sample an index proportionally to mass (caller guarantees total > 0)
int sample_index(const Vec& mass, double total, double u) {
  double target = u * total;
  double acc = 0.0;
  const int n = static_cast<int>(mass.size());
  for (int i = 0; i < n; ++i) {
    acc += mass[i];
    if (target < acc) return i;
  }
  return n - 1;
}

struct LloydRun {
  std::vector<Vec> centroids;
  std::vector<int> assign;
  double objective = 0.0;
  int iterations = 0;
};

double objective_of(const std::vector<Vec>& points, const Vec& weights,
                    const std::vector<Vec>& centroids, const std::vector<int>& assign) {
  double j = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i)
    j += weights[i] * sqdist(points[i], centroids[assign[i]]);
  return j;
}

LloydRun lloyd_run(const std::vector<Vec>& points, const Vec& weights, int k,
                   std::mt19937_64 rng, int max_iters) {
  const int n = static_cast<int>(points.size());
  const int dim = static_cast<int>(points[0].size());

  // k-means++ seeding, selection mass = weight * squared distance
  std::vector<int> chosen;
  std::vector<char> is_chosen(n, 0);
  Vec mass(weights);
  double total = 0.0;
  for (double w : mass) total += w;
  chosen.push_back(sample_index(mass, total, unit(rng)));
  is_chosen[chosen[0]] = 1;
  Vec d2(n);
  for (int i = 0; i < n; ++i) d2[i] = sqdist(points[i], points[chosen[0]]);
  while (static_cast<int>(chosen.size()) < k) {
    total = 0.0;
    for (int i = 0; i < n; ++i) {
      mass[i] = weights[i] * d2[i];
      total += mass[i];
    }
    int next = -1;
    if (total > 0.0) {
      next = sample_index(mass, total, unit(rng));
    } else {
      for (int i = 0; i < n; ++i)
        if (!is_chosen[i]) {
          next = i;
          break;
        }
      if (next < 0) next = chosen.back();  // all points coincide
    }
    chosen.push_back(next);
    is_chosen[next] = 1;
    for (int i = 0; i < n; ++i) d2[i] = std::min(d2[i], sqdist(points[i], points[next]));
  }

  LloydRun run;
  run.centroids.reserve(k);
  for (int c : chosen) run.centroids.push_back(points[c]);
  run.assign = kmeans_assign(points, run.centroids);
  run.objective = objective_of(points, weights, run.centroids, run.assign);

  for (int t = 1; t <= max_iters; ++t) {
    run.iterations = t;
    // weighted mean update, serial accumulation for reproducibility
    std::vector<Vec> sum(k, Vec(dim, 0.0));
    Vec wsum(k, 0.0);
    std::vector<int> count(k, 0);
    for (int i = 0; i < n; ++i) {
      const int a = run.assign[i];
      for (int d = 0; d < dim; ++d) sum[a][d] += weights[i] * points[i][d];
      wsum[a] += weights[i];
      ++count[a];
    }
    for (int c = 0; c < k; ++c)
      if (count[c] > 0)
        for (int d = 0; d < dim; ++d) run.centroids[c][d] = sum[c][d] / wsum[c];
    // re-seed empty clusters from the farthest point of a non-singleton cluster
    for (int c = 0; c < k; ++c) {
      if (count[c] > 0) continue;
      int far = -1;
      double far_mass = -1.0;
      for (int i = 0; i < n; ++i) {
        if (count[run.assign[i]] < 2) continue;
        const double m = weights[i] * sqdist(points[i], run.centroids[run.assign[i]]);
        if (m > far_mass) {
          far_mass = m;
          far = i;
        }
      }
      if (far < 0) continue;
      --count[run.assign[far]];
      run.centroids[c] = points[far];
      run.assign[far] = c;
      count[c] = 1;
    }
    std::vector<int> next = kmeans_assign(points, run.centroids);
    run.objective = objective_of(points, weights, run.centroids, next);
    if (next == run.assign) break;
    run.assign = std::move(next);
  }
  return run;
}

}  // namespace

std::vector<int> kmeans_assign_serial(const std::vector<Vec>& points,
                                      const std::vector<Vec>& centroids) {
  std::vector<int> assign(points.size());
  const int k = static_cast<int>(centroids.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    int best = 0;
    double bd = sqdist(points[i], centroids[0]);
    for (int c = 1; c < k; ++c) {
      const double d = sqdist(points[i], centroids[c]);
      if (d < bd) {
        bd = d;
        best = c;
      }
    }
    assign[i] = best;
  }
  return assign;
}

std::vector<int> kmeans_assign(const std::vector<Vec>& points, const std::vector<Vec>& centroids) {
  const int n = static_cast<int>(points.size());
  const int k = static_cast<int>(centroids.size());
  std::vector<int> assign(points.size());
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    int best = 0;
    double bd = sqdist(points[i], centroids[0]);
    for (int c = 1; c < k; ++c) {
      const double d = sqdist(points[i], centroids[c]);
      if (d < bd) {
        bd = d;
        best = c;
      }
    }
    assign[i] = best;
  }
  return assign;
}

KMeansResult weighted_kmeans(const std::vector<Vec>& points, const Vec& weights, int k,
                             std::uint64_t seed, const ClusteringConfig& cfg) {
  const int n = static_cast<int>(points.size());
  if (n == 0) throw ClusteringError("no points to cluster");
  if (k < 1 || k > n)
    throw ClusteringError("cluster count " + std::to_string(k) + " out of range for " +
                          std::to_string(n) + " points");
  if (static_cast<int>(weights.size()) != n) throw ClusteringError("weight count mismatch");
  for (double w : weights)
    if (!(w > 0.0) || !std::isfinite(w)) throw ClusteringError("weights must be positive and finite");

  const int restarts = std::max(1, cfg.restarts);
  std::vector<LloydRun> runs(restarts);
#pragma omp parallel for schedule(dynamic)
  for (int r = 0; r < restarts; ++r) {
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(r));
    runs[r] = lloyd_run(points, weights, k, rng, cfg.max_iters);
  }
  int best = 0;
  for (int r = 1; r < restarts; ++r)
    if (runs[r].objective < runs[best].objective) best = r;  // ties keep the lowest index

  KMeansResult res;
  res.centroids = std::move(runs[best].centroids);
  res.assign = std::move(runs[best].assign);
  res.objective = runs[best].objective;
  res.iterations = runs[best].iterations;
  return res;
}

MeshFromDataResult mesh_from_centroids(const std::vector<Vec>& centroids, const Box& domain,
                                       bool prune, double dedup_tol) {
  std::vector<Vec> kept;
  int merged = 0;
  for (const Vec& c : centroids) {
    bool dup = false;
    for (const Vec& k : kept)
      if (dist2(k, c) <= dedup_tol) {
        dup = true;
        break;
      }
    if (dup) {
      ++merged;
      continue;
    }
    Vec a = c;
    // nudge boundary anchors inward so every cell keeps an interior anchor
    for (int i = 0; i < domain.dim(); ++i) {
      const double margin = 1e-9 * std::max(domain.width(i), 1.0);
      a[i] = std::clamp(a[i], domain.lo[i] + margin, domain.hi[i] - margin);
    }
    kept.push_back(std::move(a));
  }
  if (kept.empty()) throw ClusteringError("all centroids merged away");
  std::vector<HPolytope> cells =
      prune ? voronoi_cells_pruned(kept, domain) : voronoi_cells(kept, domain);
  MeshFromDataResult out{make_mesh(std::move(kept), std::move(cells), domain), merged};
  return out;
}

MeshFromDataResult cluster_mesh(const SystemModel& sys, const ResolutionSpec& spec,
                                const TransitionDataset& data, int k, std::uint64_t seed,
                                const ClusteringConfig& cfg) {
  const int n = sys.dim;
  const int N = data.size();
  if (N == 0) throw ClusteringError("empty dataset");
  std::vector<Vec> z(N, Vec(2 * n));
  Vec w(N, 1.0);
  for (int i = 0; i < N; ++i) {
    for (int d = 0; d < n; ++d) {
      z[i][d] = data.x[i][d];
      z[i][n + d] = data.fx[i][d];
    }
    if (cfg.weight_mode == WeightMode::InverseResolution)
      w[i] = 1.0 / resolution_at(spec, data.x[i]);
  }
  KMeansResult km = weighted_kmeans(z, w, k, seed, cfg);
  std::vector<Vec> anchors;
  anchors.reserve(km.centroids.size());
  for (const Vec& c : km.centroids) anchors.emplace_back(c.begin(), c.begin() + n);
  // pin the site nearest each attracting fixed point onto it; a site at x*
  // makes the equilibrium cell's self-transition contractive about its anchor
  std::vector<char> pinned(anchors.size(), 0);
  for (const Vec& fp : attracting_fixed_points(sys)) {
    int best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < anchors.size(); ++i) {
      if (pinned[i]) continue;
      const double d = sqdist(anchors[i], fp);
      if (d < bd) {
        bd = d;
        best = static_cast<int>(i);
      }
    }
    if (best >= 0) {
      anchors[best] = fp;
      pinned[best] = 1;
    }
  }
  return mesh_from_centroids(anchors, sys.domain, true);
}

}  // namespace multires
