#pragma once

#include <vector>

#include "multires/vec.hpp"

namespace multires {

// maximize c.x subject to A x <= b over x free (internally split into
// nonnegative parts); dense two-phase simplex sized for small problems
struct LpProblem {
  int nvars = 0;
  Vec c;
  std::vector<Vec> rows;
  Vec rhs;

  void add_row(Vec a, double b);
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
  Vec x;
};

LpResult lp_solve(const LpProblem& p);

}  // namespace multires
