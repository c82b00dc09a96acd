#pragma once

#include <optional>
#include <vector>

#include "multires/abstraction.hpp"
#include "multires/learner.hpp"
#include "multires/mesh.hpp"
#include "multires/system.hpp"

namespace multires {

struct VerifyBudget {
  long max_boxes = 100000;       // per edge
  double min_width_frac = 1e-4;  // of the domain diameter
  double min_width(const Box& domain) const { return min_width_frac * domain.diameter(); }
};

struct Counterexample {
  Vec x;
  int src = -1, dst = -1;
};

enum class VerdictKind { Verified, CounterexampleFound, Unknown };

struct EdgeVerdict {
  VerdictKind kind = VerdictKind::Verified;
  std::optional<Counterexample> ctx;
  long boxes_used = 0;
  long unresolved = 0;
};

// one transition-consistency obligation: f(source cap domain) subset target
struct VerificationTask {
  ScaledCell source;
  ScaledCell target;
  int src = -1, dst = -1;
};

VerificationTask make_task(const Mesh& mesh, const AbstractionGraph& g,
                           const RelationAssignment& assignment, int src);

// exact LP path for affine flows: per target facet, maximize the image
// residual over the source polytope
EdgeVerdict verify_edge_affine(const VerificationTask& task, const SystemModel& sys);

// interval branch-and-bound for general flows; width-bounded complete
EdgeVerdict verify_edge_bnb(const VerificationTask& task, const SystemModel& sys,
                            const VerifyBudget& budget);

EdgeVerdict verify_edge(const VerificationTask& task, const SystemModel& sys,
                        const VerifyBudget& budget);

struct RelationVerdict {
  VerdictKind kind = VerdictKind::Verified;
  std::optional<Counterexample> ctx;  // earliest in topological order
  long edges_checked = 0;
  long boxes_used = 0;
};

// checks every defined edge (succ >= 0); returns the topologically earliest
// counterexample so feedback lands on the first violated subproblem
RelationVerdict verify_relation(const Mesh& mesh, const AbstractionGraph& g,
                                const RelationAssignment& assignment, const SystemModel& sys,
                                const VerifyBudget& budget);
RelationVerdict verify_relation_serial(const Mesh& mesh, const AbstractionGraph& g,
                                       const RelationAssignment& assignment,
                                       const SystemModel& sys, const VerifyBudget& budget);

}  // namespace multires
