#pragma once

#include <vector>

#include "multires/abstraction.hpp"
#include "multires/mesh.hpp"
#include "multires/system.hpp"

namespace multires {

enum class SolveStatus { Pending, Solved, Infeasible };

// per-state scaling factors of the relation template; radius eps_i = theta_i * gamma_i
struct RelationAssignment {
  std::vector<double> theta;         // committed scale (includes any commit margin)
  std::vector<double> sample_theta;  // uncapped sample-driven optimum
  std::vector<double> cap;           // eps(anchor_i) / gamma_i
  std::vector<SolveStatus> status;

  int size() const { return static_cast<int>(theta.size()); }
  double radius(const Mesh& mesh, int i) const { return theta[i] * mesh.gamma[i]; }
};

std::vector<double> resolution_caps(const Mesh& mesh, const ResolutionSpec& spec);

// greatest lower bound on theta_i imposed by the dataset: for every sample
// inside a predecessor's scaled cell, every facet of cell i must admit the
// sample's image; closed-form running max, >= 1
double node_lower_bound(const Mesh& mesh, const AbstractionGraph& g, int i,
                        const std::vector<double>& theta, const TransitionDataset& data);
double node_lower_bound_serial(const Mesh& mesh, const AbstractionGraph& g, int i,
                               const std::vector<double>& theta, const TransitionDataset& data);

struct NodeSolve {
  double theta = 1.0;  // uncapped sample optimum
  bool feasible = true;
};

// theta_i* = max(1, sample bounds) against cap_i
NodeSolve solve_node(const Mesh& mesh, const AbstractionGraph& g, int i,
                     const std::vector<double>& theta, const TransitionDataset& data, double cap);

struct SupernodeSolve {
  std::vector<double> theta;  // one per member of the supernode
  bool feasible = true;
};

// joint LP min sum theta over the cycle, intra-cycle antecedents taken at the
// current iterate and re-solved until the sample activation set stabilizes
SupernodeSolve solve_supernode(const Mesh& mesh, const AbstractionGraph& g,
                               const std::vector<int>& members, std::vector<double>& theta,
                               const TransitionDataset& data, const std::vector<double>& caps,
                               bool capped);

struct PrecheckReport {
  std::vector<double> lower_bound;  // uncapped cascade theta' (1.0 where blocked)
  std::vector<int> infeasible;      // states with theta' * gamma > eps(anchor)
  std::vector<char> blocked;        // downstream of an infeasible state; not solved
};

// sample-only topological solve (no verifier); certified-infeasible states
// must be refined before any verification is attempted. States downstream of
// an infeasible state are skipped: their bounds would hinge on a scale no
// admissible assignment commits, so they are re-examined after refinement
PrecheckReport precheck(const Mesh& mesh, const AbstractionGraph& g,
                        const TransitionDataset& data, const ResolutionSpec& spec);

// rebuilds every constraint at the solved assignment and solves one joint LP
// over all states; equals the cascade solution at a verified fixpoint
std::vector<double> one_shot_solve(const Mesh& mesh, const AbstractionGraph& g,
                                   const RelationAssignment& assignment,
                                   const TransitionDataset& data);

}  // namespace multires
