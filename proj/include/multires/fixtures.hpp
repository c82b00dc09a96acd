#pragma once

#include <string>
#include <vector>

#include "multires/cegis.hpp"
#include "multires/io.hpp"

namespace multires {

// hand-built multi-resolution abstractions with known structure
struct HandFixture {
  std::string name;
  SystemModel sys;
  ResolutionSpec spec;
  Mesh mesh;
  AbstractionGraph graph;
  RelationAssignment assignment;
};

// doubling map on [1,16], constant resolution 1, 16 states in 4 tiers
HandFixture fixture_doubling16();
// doubling map on [1,16], affine-in-norm resolution, 8 states (coarse tiers merged)
HandFixture fixture_doubling8();
// doubling map truncated to [1,96], resolution x/3, geometric 7-state chain
HandFixture fixture_chain7();

// planar contraction-rotation 0.4*[[1,-1],[1,1]] on [-1,1]^2
RunConfig config_rotation(int k, int samples, std::uint64_t seed);
// exactly discretized two-dimensional stable linear system on [-1,1]^2
RunConfig config_linear2d(int k, int samples, std::uint64_t seed);
// quadratic map (0.5x, 0.5y + 0.5x^2) on [-0.5,3]x[-0.5,5]
RunConfig config_quadratic(int k, int samples, std::uint64_t seed);
// piecewise map (0.8x, 3.2y^3 / 0.8y) split at |y| = 0.5 on [-1,1]^2
RunConfig config_piecewise(int k, int samples, std::uint64_t seed);
// rotation system with a constant resolution row (state-count scaling study)
RunConfig config_const_resolution(double eps, int k, std::uint64_t seed);

struct BenchRow {
  std::string name;
  std::string verdict;
  long states = 0;
  long baseline_states = 0;  // 0 when not applicable
  int refinements = 0;
  double seconds = 0.0;
  std::vector<std::string> checks;  // "ok: ..." / "FAIL: ..."
  bool pass = true;
};

struct BenchReport {
  std::string suite;
  std::vector<BenchRow> rows;
  bool all_pass = true;

  std::string render_markdown() const;
  std::string render_json() const;
};

// suites: examples, section7, table1
BenchReport run_benchmarks(const std::string& suite);

}  // namespace multires
