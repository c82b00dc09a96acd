#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "multires/clustering.hpp"
#include "multires/verifier.hpp"

namespace multires {

struct SynthesisConfig {
  int k_init = 50;
  int samples = 5000;
  std::uint64_t seed = 1;
  int max_high_iters = 8;
  int max_low_iters = 50;  // counterexample rounds per supernode
  VerifyBudget budget;
  ClusteringConfig clustering;
  // relative commit margin for branch-and-bound-verified (non-affine) systems
  double nonlinear_margin = 0.01;
};

struct RoundLog {
  int states = 0;
  int solved = 0;
  std::vector<int> failed;
  std::vector<int> split;
  int counterexamples = 0;
  bool precheck_round = false;  // refinement triggered before verification
  bool reclustered = false;     // mesh rebuilt from the dataset at higher k
  double seconds = 0.0;
};

struct Trace {
  std::vector<RoundLog> rounds;
  int high_iterations = 0;
  int refinements = 0;
  double seconds = 0.0;
};

struct LowLevelOutcome {
  RelationAssignment assignment;
  std::vector<int> failed;  // states whose own solve failed or went undecided
  int counterexamples = 0;
  // constraints grew after the state was finalized; re-solve it next round
  std::vector<char> dirty;
};

// learner/verifier loop over supernodes in topological order; counterexamples
// are appended to the dataset and the supernode re-solved
LowLevelOutcome low_level_loop(const Mesh& mesh, const AbstractionGraph& g,
                               TransitionDataset& data, const ResolutionSpec& spec,
                               const SystemModel& sys, const SynthesisConfig& cfg,
                               const RelationAssignment* warm = nullptr,
                               const std::vector<char>* resubmit = nullptr);

struct RefineResult {
  Mesh mesh;
  std::vector<int> old_to_new;    // index of the surviving/first-child cell
  std::vector<char> is_new_cell;  // true for children of split cells
};

// splits the cells of every listed state and all their ancestors
RefineResult refine(const Mesh& mesh, const AbstractionGraph& g, const std::vector<int>& failed);

// splits exactly the masked cells (one bisection each), then rebuilds the
// partition as the Voronoi diagram of the surviving sites.
// pins: anchors that must survive splitting (attracting fixed points); the
// child cell holding a pin keeps it as anchor instead of its Chebyshev center.
// data (+ spec weights): sites near a split are relaxed to local data
// centroids so the densified neighbourhood settles into round cells instead
// of slivers pinched between old and new sites
RefineResult refine_cells(const Mesh& mesh, const std::vector<char>& to_split,
                          const std::vector<Vec>* pins = nullptr,
                          const TransitionDataset* data = nullptr,
                          const ResolutionSpec* spec = nullptr);

// refinement set for a failed state set: each failed cell is split alone.
// Splitting the failed cell both halves its radius and reroutes offending
// inflow to nearer targets. Cells pinned to an attracting fixed point are
// never split -- they must stay large enough to absorb their neighbours'
// images -- so their failures escalate to the feeding cells instead
std::vector<char> refinement_mask(const AbstractionGraph& g, const std::vector<int>& failed,
                                  const std::vector<char>* pinned = nullptr);

struct SynthesisResult {
  bool verified = false;
  Mesh mesh;
  AbstractionGraph graph;
  RelationAssignment assignment;
  std::vector<double> precheck_lb;  // theta' * gamma per state, the sample bound
  Trace trace;
  TransitionDataset data;
};

SynthesisResult synthesize(const SystemModel& sys, const ResolutionSpec& spec,
                           const SynthesisConfig& cfg);

struct BaselineGrid {
  Mesh mesh;
  AbstractionGraph graph;
  RelationAssignment assignment;
  long lattice_count = 0;
  long cell_count = 0;
};

// uniform lattice with spacing 2*eta/sqrt(n) and per-cell ball radius eps
BaselineGrid uniform_grid_baseline(const SystemModel& sys, double eps, double eta);

}  // namespace multires
