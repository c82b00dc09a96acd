#include "multires/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "multires/errors.hpp"
#include "multires/interval.hpp"
#include "multires/linprog.hpp"

namespace multires {

namespace {

// scaled source intersected with the domain, as plain halfspaces
HPolytope clipped_source(const VerificationTask& task, const Box& domain) {
  HPolytope s;
  s.dim = task.source.base.dim;
  for (int r = 0; r < task.source.base.rows(); ++r)
    s.add_row(Vec(task.source.base.row(r), task.source.base.row(r) + s.dim), task.source.rhs(r));
  s.add_box(domain);
  return s;
}

bool in_source(const VerificationTask& task, const Box& domain, const Vec& x, double tol) {
  return domain.contains(x, tol) && max_residual(task.source, x) <= tol;
}

// certified counterexample: inside the clipped source within membership
// tolerance, image violating the target by at least the margin
bool certify(const VerificationTask& task, const SystemModel& sys, const Vec& x,
             EdgeVerdict& verdict) {
  if (!in_source(task, sys.domain, x, kMembershipTol)) return false;
  const Vec fx = sys.step(x);
  if (max_residual(task.target, fx) < kViolationMargin) return false;
  verdict.kind = VerdictKind::CounterexampleFound;
  verdict.ctx = Counterexample{x, task.src, task.dst};
  return true;
}

double box_min_of_row(const double* a, double rhs, const Box& box) {
  double m = -rhs;
  for (int d = 0; d < box.dim(); ++d) m += a[d] * (a[d] > 0.0 ? box.lo[d] : box.hi[d]);
  return m;  // > 0 means the whole box misses the halfspace
}

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

VerificationTask make_task(const Mesh& mesh, const AbstractionGraph& g,
                           const RelationAssignment& assignment, int src) {
  const int dst = g.succ[src];
  if (dst < 0) throw GeometryError("state " + std::to_string(src) + " has no successor");
  VerificationTask task;
  task.src = src;
  task.dst = dst;
  // relaxed scaling keeps zero-slack facets pinned (uniform-grid boundary cells)
  task.source = scale_relaxed(mesh.cells[src], mesh.anchors[src], assignment.theta[src]);
  task.target = scale_relaxed(mesh.cells[dst], mesh.anchors[dst], assignment.theta[dst]);
  return task;
}

EdgeVerdict verify_edge_affine(const VerificationTask& task, const SystemModel& sys) {
  auto aff = sys.flow.as_affine();
  if (!aff) throw SpecError("affine verification on a non-affine flow");
  const auto& [M, c] = *aff;
  const int n = sys.dim;
  const HPolytope S = clipped_source(task, sys.domain);

  EdgeVerdict verdict;
  const HPolytope& T = task.target.base;
  for (int r = 0; r < T.rows(); ++r) {
    const double* a = T.row(r);
    // residual of the image along facet r is linear in x
    Vec dir(n, 0.0);
    double off = -task.target.theta * task.target.slack[r];
    for (int d = 0; d < n; ++d) {
      off += a[d] * (c[d] - task.target.anchor[d]);
      for (int e = 0; e < n; ++e) dir[e] += a[d] * M[d][e];
    }
    SupportResult sup = support_max(S, dir);
    if (sup.value + off <= kViolationMargin) continue;
    if (certify(task, sys, sup.arg, verdict)) return verdict;
  }
  return verdict;
}

EdgeVerdict verify_edge_bnb(const VerificationTask& task, const SystemModel& sys,
                            const VerifyBudget& budget) {
  const int n = sys.dim;
  EdgeVerdict verdict;

  Box root = bounding_box(task.source);
  for (int d = 0; d < n; ++d) {
    root.lo[d] = std::max(root.lo[d], sys.domain.lo[d]);
    root.hi[d] = std::min(root.hi[d], sys.domain.hi[d]);
    if (root.lo[d] > root.hi[d]) return verdict;  // source entirely outside
  }

  const HPolytope S = clipped_source(task, sys.domain);
  const double min_width = budget.min_width(sys.domain);
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL ^
                      (static_cast<std::uint64_t>(task.src) << 20) ^
                      static_cast<std::uint64_t>(task.dst));

  std::vector<Box> stack{root};
  while (!stack.empty()) {
    if (verdict.boxes_used >= budget.max_boxes) {
      verdict.unresolved += static_cast<long>(stack.size());
      break;
    }
    Box box = std::move(stack.back());
    stack.pop_back();
    ++verdict.boxes_used;

    // box provably misses the clipped source
    bool miss = false;
    for (int r = 0; r < S.rows() && !miss; ++r)
      if (box_min_of_row(S.row(r), S.b[r], box) > 0.0) miss = true;
    if (miss) continue;

    // image enclosure provably inside the scaled target
    IBox image = sys.flow.interval_evaluate(to_ibox(box));
    bool inside = true;
    const HPolytope& T = task.target.base;
    for (int r = 0; r < T.rows() && inside; ++r) {
      const double* a = T.row(r);
      double hi = -task.target.rhs(r);
      for (int d = 0; d < n; ++d) hi += a[d] * (a[d] > 0.0 ? image[d].hi : image[d].lo);
      if (hi > 0.0) inside = false;
    }
    if (inside) continue;

    // concrete candidates: midpoint, corners, then a deterministic scatter
    Vec x = box.midpoint();
    if (certify(task, sys, x, verdict)) return verdict;
    for (int corner = 0; corner < (1 << n); ++corner) {
      for (int d = 0; d < n; ++d) x[d] = (corner >> d) & 1 ? box.hi[d] : box.lo[d];
      if (certify(task, sys, x, verdict)) return verdict;
    }
    for (int t = 0; t < 16; ++t) {
      for (int d = 0; d < n; ++d) x[d] = box.lo[d] + unit(rng) * (box.hi[d] - box.lo[d]);
      if (certify(task, sys, x, verdict)) return verdict;
    }

    if (box.max_width() <= min_width) {
      ++verdict.unresolved;  // below the width floor with no decision
      continue;
    }
    const int axis = box.widest_axis();
    const double mid = 0.5 * (box.lo[axis] + box.hi[axis]);
    Box lo = box, hi = box;
    lo.hi[axis] = mid;
    hi.lo[axis] = mid;
    stack.push_back(std::move(hi));
    stack.push_back(std::move(lo));
  }

  if (verdict.unresolved > 0) verdict.kind = VerdictKind::Unknown;
  return verdict;
}

EdgeVerdict verify_edge(const VerificationTask& task, const SystemModel& sys,
                        const VerifyBudget& budget) {
  if (sys.flow.is_affine()) return verify_edge_affine(task, sys);
  return verify_edge_bnb(task, sys, budget);
}

namespace {

RelationVerdict verify_relation_impl(const Mesh& mesh, const AbstractionGraph& g,
                                     const RelationAssignment& assignment, const SystemModel& sys,
                                     const VerifyBudget& budget, bool parallel) {
  const int n = mesh.size();
  RelationVerdict out;
  long boxes = 0;
  long checked = 0;
  bool unknown = false;
  long best_rank = -1;
  std::optional<Counterexample> best_ctx;

  auto rank_of = [&](int i) {
    return static_cast<long>(g.scc_of[i]) * (n + 1) + i;  // topological, then index
  };

#pragma omp parallel for schedule(dynamic) reduction(+ : boxes, checked) \
    reduction(|| : unknown) if (parallel)
  for (int i = 0; i < n; ++i) {
    if (g.succ[i] < 0) continue;
    EdgeVerdict v = verify_edge(make_task(mesh, g, assignment, i), sys, budget);
    ++checked;
    boxes += v.boxes_used;
    if (v.kind == VerdictKind::Unknown) unknown = true;
    if (v.kind == VerdictKind::CounterexampleFound) {
#pragma omp critical
      {
        const long r = rank_of(i);
        if (best_rank < 0 || r < best_rank) {
          best_rank = r;
          best_ctx = v.ctx;
        }
      }
    }
  }

  out.edges_checked = checked;
  out.boxes_used = boxes;
  if (best_ctx) {
    out.kind = VerdictKind::CounterexampleFound;
    out.ctx = best_ctx;
  } else if (unknown) {
    out.kind = VerdictKind::Unknown;
  }
  return out;
}

}  // namespace

RelationVerdict verify_relation(const Mesh& mesh, const AbstractionGraph& g,
                                const RelationAssignment& assignment, const SystemModel& sys,
                                const VerifyBudget& budget) {
  return verify_relation_impl(mesh, g, assignment, sys, budget, true);
}

RelationVerdict verify_relation_serial(const Mesh& mesh, const AbstractionGraph& g,
                                       const RelationAssignment& assignment,
                                       const SystemModel& sys, const VerifyBudget& budget) {
  return verify_relation_impl(mesh, g, assignment, sys, budget, false);
}

}  // namespace multires
