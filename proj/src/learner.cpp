#include "multires/learner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "multires/errors.hpp"
#include "multires/linprog.hpp"

namespace multires {

namespace {

constexpr double kFeasTol = 1e-12;

// x lies in cell j scaled by theta_j (cheap sphere reject first)
bool activates(const Mesh& mesh, int j, double theta_j, const Vec& x) {
  const double reach = theta_j * mesh.gamma[j] + 1e-6;
  if (sqdist(x, mesh.anchors[j]) > reach * reach) return false;
  const HPolytope& c = mesh.cells[j];
  const Vec& anchor = mesh.anchors[j];
  const Vec& slack = mesh.slack[j];
  for (int r = 0; r < c.rows(); ++r) {
    const double* a = c.row(r);
    double lhs = 0.0;
    for (int d = 0; d < c.dim; ++d) lhs += a[d] * (x[d] - anchor[d]);
    if (lhs - theta_j * slack[r] > kMembershipTol) return false;
  }
  return true;
}

// smallest scaling of cell i that admits the point fx
double admit_bound(const Mesh& mesh, int i, const Vec& fx) {
  const HPolytope& c = mesh.cells[i];
  const Vec& anchor = mesh.anchors[i];
  const Vec& slack = mesh.slack[i];
  double bound = 0.0;
  for (int r = 0; r < c.rows(); ++r) {
    const double* a = c.row(r);
    double lhs = 0.0;
    for (int d = 0; d < c.dim; ++d) lhs += a[d] * (fx[d] - anchor[d]);
    if (slack[r] > 0.0)
      bound = std::max(bound, lhs / slack[r]);
    else if (lhs > kMembershipTol)  // pinned facet: no scaling admits the point
      bound = std::numeric_limits<double>::infinity();
  }
  return bound;
}

}  // namespace

std::vector<double> resolution_caps(const Mesh& mesh, const ResolutionSpec& spec) {
  std::vector<double> caps(mesh.size());
  for (int i = 0; i < mesh.size(); ++i)
    caps[i] = resolution_at(spec, mesh.anchors[i]) / mesh.gamma[i];
  return caps;
}

double node_lower_bound_serial(const Mesh& mesh, const AbstractionGraph& g, int i,
                               const std::vector<double>& theta, const TransitionDataset& data) {
  double bound = 1.0;
  const int N = data.size();
  for (int j : g.pred[i]) {
    const double tj = theta[j];
    for (int s = 0; s < N; ++s)
      if (activates(mesh, j, tj, data.x[s])) bound = std::max(bound, admit_bound(mesh, i, data.fx[s]));
  }
  return bound;
}

double node_lower_bound(const Mesh& mesh, const AbstractionGraph& g, int i,
                        const std::vector<double>& theta, const TransitionDataset& data) {
  double bound = 1.0;
  const int N = data.size();
  for (int j : g.pred[i]) {
    const double tj = theta[j];
    double local = 1.0;
#pragma omp parallel for schedule(static) reduction(max : local)
    for (int s = 0; s < N; ++s)
      if (activates(mesh, j, tj, data.x[s])) local = std::max(local, admit_bound(mesh, i, data.fx[s]));
    bound = std::max(bound, local);
  }
  return bound;
}

NodeSolve solve_node(const Mesh& mesh, const AbstractionGraph& g, int i,
                     const std::vector<double>& theta, const TransitionDataset& data, double cap) {
  NodeSolve out;
  out.theta = node_lower_bound(mesh, g, i, theta, data);
  out.feasible = out.theta <= cap + kFeasTol;
  return out;
}

SupernodeSolve solve_supernode(const Mesh& mesh, const AbstractionGraph& g,
                               const std::vector<int>& members, std::vector<double>& theta,
                               const TransitionDataset& data, const std::vector<double>& caps,
                               bool capped) {
  const int k = static_cast<int>(members.size());
  std::vector<double> nb(k);
  const int max_outer = 64 + data.size();
  bool stable = false;
  for (int iter = 0; iter < max_outer && !stable; ++iter) {
    // intra-cycle antecedents enter at the current iterate; bounds only grow
    for (int mi = 0; mi < k; ++mi)
      nb[mi] = node_lower_bound(mesh, g, members[mi], theta, data);
    stable = true;
    for (int mi = 0; mi < k; ++mi) {
      if (nb[mi] != theta[members[mi]]) stable = false;
      theta[members[mi]] = nb[mi];
    }
  }
  if (!stable) throw SolverError("supernode solve did not reach a sample fixpoint");

  SupernodeSolve out;
  out.theta.resize(k);
  out.feasible = true;
  for (int mi = 0; mi < k; ++mi) {
    out.theta[mi] = theta[members[mi]];
    if (capped && out.theta[mi] > caps[members[mi]] + kFeasTol) out.feasible = false;
  }

  if (!capped || out.feasible) {
    // joint minimization over the supernode; every constraint is a bound on a
    // single variable, so the vertex must match the running-max solution
    LpProblem lp;
    lp.nvars = k;
    lp.c.assign(k, -1.0);
    for (int mi = 0; mi < k; ++mi) {
      Vec row(k, 0.0);
      row[mi] = -1.0;
      lp.add_row(row, -nb[mi]);
      if (capped) {
        row[mi] = 1.0;
        lp.add_row(row, caps[members[mi]]);
      }
    }
    LpResult res = lp_solve(lp);
    double sum = 0.0;
    for (double t : out.theta) sum += t;
    if (res.status != LpStatus::Optimal || std::fabs(-res.objective - sum) > 1e-7 * (1.0 + sum))
      throw SolverError("supernode linear program disagrees with the cascade solution");
  }
  return out;
}

PrecheckReport precheck(const Mesh& mesh, const AbstractionGraph& g, const TransitionDataset& data,
                        const ResolutionSpec& spec) {
  const int n = mesh.size();
  std::vector<double> theta(n, 1.0);
  std::vector<double> caps = resolution_caps(mesh, spec);
  PrecheckReport rep;
  rep.lower_bound.assign(n, 1.0);
  rep.blocked.assign(n, 0);
  std::vector<char> failed(n, 0);
  for (const std::vector<int>& members : topological_supernode_order(g)) {
    // an antecedent past its cap is split before this state is solved for
    // real; any bound cascaded from it would hinge on a scale no admissible
    // assignment commits, so the state is left for the refined mesh
    bool is_blocked = false;
    for (int m : members)
      for (int j : g.pred[m])
        if (rep.blocked[j] || failed[j]) is_blocked = true;
    if (is_blocked) {
      for (int m : members) rep.blocked[m] = 1;
      continue;
    }
    if (members.size() == 1 && !g.scc_cyclic[g.scc_of[members[0]]]) {
      const int i = members[0];
      theta[i] = node_lower_bound(mesh, g, i, theta, data);
    } else {
      solve_supernode(mesh, g, members, theta, data, caps, false);
    }
    for (int m : members) {
      rep.lower_bound[m] = theta[m];
      if (theta[m] > caps[m] + kFeasTol) {
        rep.infeasible.push_back(m);
        failed[m] = 1;
      }
    }
  }
  std::sort(rep.infeasible.begin(), rep.infeasible.end());
  return rep;
}

std::vector<double> one_shot_solve(const Mesh& mesh, const AbstractionGraph& g,
                                   const RelationAssignment& assignment,
                                   const TransitionDataset& data) {
  const int n = mesh.size();
  LpProblem lp;
  lp.nvars = n;
  lp.c.assign(n, -1.0);
  for (int i = 0; i < n; ++i) {
    const double b = node_lower_bound(mesh, g, i, assignment.theta, data);
    Vec row(n, 0.0);
    row[i] = -1.0;
    lp.add_row(row, -b);
  }
  LpResult res = lp_solve(lp);
  if (res.status != LpStatus::Optimal) throw SolverError("joint relation program did not solve");
  return res.x;
}

}  // namespace multires
