#pragma once

#include <cstdint>
#include <vector>

#include "multires/mesh.hpp"
#include "multires/system.hpp"

namespace multires {

enum class WeightMode { Uniform, InverseResolution };

struct ClusteringConfig {
  int max_iters = 100;
  int restarts = 5;
  WeightMode weight_mode = WeightMode::InverseResolution;
};

struct KMeansResult {
  std::vector<Vec> centroids;  // k points in the clustered space
  std::vector<int> assign;
  double objective = 0.0;  // weighted sum of squared distances
  int iterations = 0;
};

// weighted Lloyd iterations with k-means++ seeding and restarts; empty
// clusters are re-seeded from the farthest point
KMeansResult weighted_kmeans(const std::vector<Vec>& points, const Vec& weights, int k,
                             std::uint64_t seed, const ClusteringConfig& cfg);

// serial reference for the assignment step; the parallel version must match
std::vector<int> kmeans_assign(const std::vector<Vec>& points, const std::vector<Vec>& centroids);
std::vector<int> kmeans_assign_serial(const std::vector<Vec>& points,
                                      const std::vector<Vec>& centroids);

struct MeshFromDataResult {
  Mesh mesh;
  int merged = 0;  // anchors deduplicated within tolerance
};

// clusters [x, f(x)] pairs, projects centroids to the state space, and
// builds the pruned Voronoi mesh of the resulting anchors
MeshFromDataResult cluster_mesh(const SystemModel& sys, const ResolutionSpec& spec,
                                const TransitionDataset& data, int k, std::uint64_t seed,
                                const ClusteringConfig& cfg);

// Voronoi mesh of explicit centroids (deduplicated within tol)
MeshFromDataResult mesh_from_centroids(const std::vector<Vec>& centroids, const Box& domain,
                                       bool prune = true, double dedup_tol = 1e-6);

}  // namespace multires
