// Times the OpenMP kernels against their serial reference implementations
// and confirms the outputs are bitwise identical.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "multires/fixtures.hpp"
#include "multires/learner.hpp"

using namespace multires;

namespace {

using Clock = std::chrono::steady_clock;

template <typename Fn>
double best_of(int reps, Fn&& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = Clock::now();
    fn();
    best = std::min(best, std::chrono::duration<double>(Clock::now() - t0).count());
  }
  return best;
}

void report(const char* name, double serial, double parallel, bool match) {
  std::printf("%-18s serial %8.2f ms   parallel %8.2f ms   speedup %5.2fx   %s\n", name,
              serial * 1e3, parallel * 1e3, serial / parallel,
              match ? "outputs match" : "OUTPUT MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  int n = argc > 1 ? std::atoi(argv[1]) : 200000;
  int k = argc > 2 ? std::atoi(argv[2]) : 150;
  const int reps = 3;
  std::printf("kernel benchmark: n=%d points, k=%d states, best of %d\n\n", n, k, reps);

  const RunConfig cfg = config_rotation(k, n, 7);
  const TransitionDataset data = sample_dataset(cfg.system, n, 7);
  const Mesh mesh = cluster_mesh(cfg.system, cfg.resolution, data, k, 7, cfg.synthesis.clustering).mesh;
  const AbstractionGraph graph = build_abstraction(mesh, cfg.system, EscapePolicy::NearestAnchor);

  {
    std::vector<int> a, b;
    const double ts = best_of(reps, [&] { a = kmeans_assign_serial(data.x, mesh.anchors); });
    const double tp = best_of(reps, [&] { b = kmeans_assign(data.x, mesh.anchors); });
    report("kmeans_assign", ts, tp, a == b);
  }
  {
    std::vector<int> a, b;
    const double ts = best_of(reps, [&] { a = quantize_all_serial(mesh, data.x); });
    const double tp = best_of(reps, [&] { b = quantize_all(mesh, data.x); });
    report("quantize_all", ts, tp, a == b);
  }
  {
    const std::vector<double> theta(mesh.size(), 1.0);
    std::vector<double> a(mesh.size()), b(mesh.size());
    const double ts = best_of(reps, [&] {
      for (int i = 0; i < mesh.size(); ++i)
        a[i] = node_lower_bound_serial(mesh, graph, i, theta, data);
    });
    const double tp = best_of(reps, [&] {
      for (int i = 0; i < mesh.size(); ++i) b[i] = node_lower_bound(mesh, graph, i, theta, data);
    });
    report("node_lower_bound", ts, tp, a == b);
  }
  {
    RelationAssignment assignment;
    assignment.theta.assign(mesh.size(), 1.0);
    assignment.sample_theta = assignment.theta;
    assignment.cap = resolution_caps(mesh, cfg.resolution);
    assignment.status.assign(mesh.size(), SolveStatus::Solved);
    RelationVerdict a, b;
    const double ts = best_of(reps, [&] {
      a = verify_relation_serial(mesh, graph, assignment, cfg.system, cfg.synthesis.budget);
    });
    const double tp = best_of(reps, [&] {
      b = verify_relation(mesh, graph, assignment, cfg.system, cfg.synthesis.budget);
    });
    const bool match = a.kind == b.kind && a.edges_checked == b.edges_checked &&
                       a.boxes_used == b.boxes_used;
    report("verify_relation", ts, tp, match);
  }
  return 0;
}
