#include "multires/cegis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "multires/clustering.hpp"
#include "multires/errors.hpp"

namespace multires {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// x lies in cell j scaled by the committed factor
bool activates_committed(const Mesh& mesh, int j, double theta_j, const Vec& x) {
  const double reach = theta_j * mesh.gamma[j] + 1e-6;
  if (sqdist(x, mesh.anchors[j]) > reach * reach) return false;
  const HPolytope& c = mesh.cells[j];
  for (int r = 0; r < c.rows(); ++r) {
    const double* a = c.row(r);
    double lhs = 0.0;
    for (int d = 0; d < c.dim; ++d) lhs += a[d] * (x[d] - mesh.anchors[j][d]);
    if (lhs - theta_j * mesh.slack[j][r] > kMembershipTol) return false;
  }
  return true;
}

}  // namespace

LowLevelOutcome low_level_loop(const Mesh& mesh, const AbstractionGraph& g,
                               TransitionDataset& data, const ResolutionSpec& spec,
                               const SystemModel& sys, const SynthesisConfig& cfg,
                               const RelationAssignment* warm,
                               const std::vector<char>* resubmit) {
  const int n = mesh.size();
  const bool affine = sys.flow.is_affine();

  LowLevelOutcome out;
  RelationAssignment& asg = out.assignment;
  asg.theta.assign(n, 1.0);
  asg.sample_theta.assign(n, 1.0);
  asg.cap = resolution_caps(mesh, spec);
  asg.status.assign(n, SolveStatus::Pending);
  out.dirty.assign(n, 0);

  // skip-control: a state is processed when dirty, cold-started either way
  std::vector<char> dirty(n, 1);
  if (warm != nullptr) {
    if (resubmit != nullptr) dirty = *resubmit;
    for (int i = 0; i < n; ++i) {
      if (dirty[i]) continue;  // resubmitted states restart from scratch
      asg.theta[i] = warm->theta[i];
      asg.sample_theta[i] = warm->sample_theta[i];
      asg.status[i] = warm->status[i];
    }
  }
  std::vector<double> entry_theta = asg.theta;
  std::vector<char> blocked(n, 0);

  auto commit = [&](int i) {
    const double lfp = asg.sample_theta[i];
    asg.theta[i] = affine ? lfp : std::min(asg.cap[i], lfp * (1.0 + cfg.nonlinear_margin));
  };

  // topological pass; counterexamples re-solve the current supernode only
  for (const std::vector<int>& members : topological_supernode_order(g)) {
    bool any_dirty = false, all_solved = true, is_blocked = false;
    for (int m : members) {
      if (dirty[m]) any_dirty = true;
      if (asg.status[m] != SolveStatus::Solved) all_solved = false;
      for (int j : g.pred[m])
        if (blocked[j] || asg.status[j] == SolveStatus::Infeasible) is_blocked = true;
    }
    if (!any_dirty && all_solved) continue;  // untouched since last verification
    if (is_blocked) {
      // an antecedent failed; this region is re-solved after refinement
      for (int m : members) {
        blocked[m] = 1;
        asg.status[m] = SolveStatus::Pending;
      }
      continue;
    }

    const bool cyclic = g.scc_cyclic[g.scc_of[members[0]]];
    bool done = false;
    for (int round = 0; round <= cfg.max_low_iters && !done; ++round) {
      // solve from the stored sample optimum (never above the new fixpoint)
      for (int m : members) asg.theta[m] = asg.sample_theta[m];
      bool feasible = true;
      if (cyclic) {
        SupernodeSolve s = solve_supernode(mesh, g, members, asg.theta, data, asg.cap, true);
        feasible = s.feasible;
      } else {
        NodeSolve s = solve_node(mesh, g, members[0], asg.theta, data, asg.cap[members[0]]);
        asg.theta[members[0]] = s.theta;
        feasible = s.feasible;
      }
      for (int m : members) asg.sample_theta[m] = asg.theta[m];

      if (!feasible) {
        for (int m : members) {
          asg.status[m] = SolveStatus::Infeasible;
          out.failed.push_back(m);
        }
        break;
      }
      for (int m : members) commit(m);

      if (round == cfg.max_low_iters) {
        // counterexample budget exhausted without a verified solve
        for (int m : members) {
          asg.status[m] = SolveStatus::Infeasible;
          out.failed.push_back(m);
        }
        break;
      }

      // verify every edge entering the supernode at the committed scales
      bool retry = false, undecided = false;
      for (std::size_t mi = 0; mi < members.size() && !retry && !undecided; ++mi) {
        const int i = members[mi];
        for (int j : g.pred[i]) {
          if (asg.status[j] == SolveStatus::Infeasible) continue;  // source will split
          EdgeVerdict v = verify_edge(make_task(mesh, g, asg, j), sys, cfg.budget);
          if (v.kind == VerdictKind::Unknown) {
            undecided = true;
            break;
          }
          if (v.kind == VerdictKind::CounterexampleFound) {
            const Vec& x = v.ctx->x;
            data.append(x, sys.step(x), Provenance::Counterexample);
            ++out.counterexamples;
            // the new sample may bind states finalized earlier in the pass
            for (int jj = 0; jj < n; ++jj) {
              if (g.succ[jj] < 0) continue;
              if (asg.status[g.succ[jj]] == SolveStatus::Solved &&
                  activates_committed(mesh, jj, asg.theta[jj], x))
                out.dirty[g.succ[jj]] = 1;
            }
            retry = true;
            break;
          }
        }
      }
      if (undecided) {
        for (int m : members) {
          asg.status[m] = SolveStatus::Infeasible;
          out.failed.push_back(m);
        }
        break;
      }
      if (!retry) {
        for (int m : members) asg.status[m] = SolveStatus::Solved;
        done = true;
      }
    }

    for (int m : members)
      if (g.succ[m] >= 0 && asg.theta[m] != entry_theta[m]) dirty[g.succ[m]] = 1;
  }

  std::sort(out.failed.begin(), out.failed.end());
  return out;
}

RefineResult refine(const Mesh& mesh, const AbstractionGraph& g, const std::vector<int>& failed) {
  return refine_cells(mesh, ancestor_closure(g, failed));
}

std::vector<char> refinement_mask(const AbstractionGraph& g, const std::vector<int>& failed,
                                  const std::vector<char>* pinned) {
  const int n = static_cast<int>(g.succ.size());
  std::vector<char> mask(n, 0);
  const auto is_pinned = [&](int i) { return pinned != nullptr && (*pinned)[i]; };
  for (int i : failed) {
    // splitting the failed cell reroutes the offending inflow: each child
    // site lands at the local mass of landing points, so images that used to
    // need a far reach quantize to a nearer target.  The ancestor cone is
    // never taken -- under contractive dynamics it is most of the mesh and
    // splitting it doubles the state count per round
    if (!is_pinned(i)) mask[i] = 1;
    // a pinned cell sits on an attracting fixed point; it absorbs every
    // nearby image as long as it stays large, so its failures are always
    // inflow problems and the split goes to the feeding cells instead
    if (is_pinned(i))
      for (int j : g.pred[i])
        if (j != i && !is_pinned(j)) mask[j] = 1;
  }
  return mask;
}

namespace {

// depth of x inside the cell: min euclidean facet clearance (negative outside)
double interior_depth(const HPolytope& c, const Vec& x) {
  double depth = std::numeric_limits<double>::infinity();
  for (int r = 0; r < c.rows(); ++r) {
    const double* a = c.row(r);
    double lhs = 0.0, nrm = 0.0;
    for (int d = 0; d < c.dim; ++d) {
      lhs += a[d] * x[d];
      nrm += a[d] * a[d];
    }
    depth = std::min(depth, (c.b[r] - lhs) / std::sqrt(nrm));
  }
  return depth;
}

}  // namespace

namespace {

// local centroidal relaxation around the split locations: sites near a split
// are pulled to the resolution-weighted mean of the data they quantize.  A
// split alone leaves the two children pinched against each other while they
// still extend toward the untouched neighbours; a few Lloyd iterations let
// the whole neighbourhood re-equilibrate into round cells, whose facet
// slacks track euclidean distances, instead of accumulating slivers at the
// density interface.  Pinned sites and sites far from every split stay put
void relax_sites(std::vector<Vec>& sites, const std::vector<char>& relax,
                 const TransitionDataset& data, const ResolutionSpec* spec, const Box& domain,
                 int iters) {
  const int dim = domain.dim();
  const int k = static_cast<int>(sites.size());
  Vec w(data.x.size(), 1.0);
  if (spec != nullptr)
    for (std::size_t p = 0; p < data.x.size(); ++p) w[p] = 1.0 / resolution_at(*spec, data.x[p]);
  for (int it = 0; it < iters; ++it) {
    const std::vector<int> assign = kmeans_assign(data.x, sites);
    std::vector<Vec> sum(k, Vec(dim, 0.0));
    Vec wsum(k, 0.0);
    std::vector<int> count(k, 0);
    for (std::size_t p = 0; p < data.x.size(); ++p) {
      const int a = assign[p];
      if (!relax[a]) continue;
      for (int d = 0; d < dim; ++d) sum[a][d] += w[p] * data.x[p][d];
      wsum[a] += w[p];
      ++count[a];
    }
    for (int c = 0; c < k; ++c) {
      if (!relax[c] || count[c] < 4) continue;
      for (int d = 0; d < dim; ++d) {
        const double margin = 1e-9 * std::max(domain.width(d), 1.0);
        sites[c][d] =
            std::clamp(sum[c][d] / wsum[c], domain.lo[d] + margin, domain.hi[d] - margin);
      }
    }
  }
}

}  // namespace

RefineResult refine_cells(const Mesh& mesh, const std::vector<char>& to_split,
                          const std::vector<Vec>* pins, const TransitionDataset* data,
                          const ResolutionSpec* spec) {
  RefineResult out;
  out.old_to_new.resize(mesh.size());
  std::vector<Vec> sites;
  std::vector<char> near_split;            // relaxation set, grown below
  std::vector<std::pair<Vec, double>> hot;  // split anchors with their radii
  for (int i = 0; i < mesh.size(); ++i) {
    out.old_to_new[i] = static_cast<int>(sites.size());
    bool split_ok = false;
    if (to_split[i]) {
      // a pinned anchor (attracting fixed point) must stay a site, and the
      // bisection plane must not graze it: otherwise the equilibrium cell
      // loses its contraction point and its self-edge scale diverges again
      const Vec* pin = nullptr;
      const double w = mesh.cell_bbox[i].width(mesh.cell_bbox[i].widest_axis());
      if (pins != nullptr)
        for (const Vec& p : *pins)
          if (interior_depth(mesh.cells[i], p) > 1e-9 * w) pin = &p;
      Vec pivot = mesh.anchors[i];
      if (pin != nullptr) {
        const int axis = mesh.cell_bbox[i].widest_axis();
        const double lo = mesh.cell_bbox[i].lo[axis], wa = mesh.cell_bbox[i].width(axis);
        for (double t : {0.5, 0.3, 0.7})
          if (std::abs((*pin)[axis] - (lo + t * wa)) >= 0.1 * wa) {
            pivot[axis] = lo + t * wa;
            break;
          }
      }
      try {
        SplitResult s = split_cell(mesh.cells[i], pivot);
        Vec site_lo = std::move(s.anchor_lo), site_hi = std::move(s.anchor_hi);
        if (pin != nullptr) {
          if (interior_depth(s.cell_lo, *pin) > 0.0) site_lo = *pin;
          if (interior_depth(s.cell_hi, *pin) > 0.0) site_hi = *pin;
        }
        hot.emplace_back(mesh.anchors[i], mesh.gamma[i]);
        sites.push_back(std::move(site_lo));
        sites.push_back(std::move(site_hi));
        out.is_new_cell.push_back(1);
        out.is_new_cell.push_back(1);
        split_ok = true;
      } catch (const SplitError&) {
        split_ok = false;  // cell too thin; keep it and let the round report
      }
    }
    if (!split_ok) {
      sites.push_back(mesh.anchors[i]);
      out.is_new_cell.push_back(0);
    }
  }
  if (data != nullptr && !hot.empty()) {
    near_split.assign(sites.size(), 0);
    for (std::size_t c = 0; c < sites.size(); ++c) {
      bool is_pin = false;
      if (pins != nullptr)
        for (const Vec& p : *pins)
          if (sqdist(sites[c], p) <= 1e-24) is_pin = true;
      if (is_pin) continue;
      for (const auto& [center, radius] : hot)
        if (sqdist(sites[c], center) <= 6.25 * radius * radius) near_split[c] = 1;
    }
    relax_sites(sites, near_split, *data, spec, mesh.domain, 3);
  }
  // the mesh stays the Voronoi diagram of its sites: each split retires one
  // site for the two sub-region sites and the partition is rebuilt around
  // them.  Bisected half-cells kept as-is would accumulate high aspect
  // ratios, and the facet-unit scale a thin cell needs to admit a point
  // grows with that aspect -- re-tessellating keeps cells round and anchors
  // central, so scale requirements track euclidean distances
  std::vector<HPolytope> cells = voronoi_cells_pruned(sites, mesh.domain);
  out.mesh = make_mesh(std::move(sites), std::move(cells), mesh.domain);
  return out;
}

namespace {

// map an assignment onto the refined mesh; children and re-listed states are
// cold, retained states keep their solved values
struct RemappedState {
  RelationAssignment warm;
  std::vector<char> resubmit;
};

RemappedState remap_after_refine(const RefineResult& rr, const AbstractionGraph& new_g,
                                 const LowLevelOutcome& prev, const Mesh& old_mesh,
                                 const Mesh& new_mesh, const ResolutionSpec& spec) {
  const int n_old = static_cast<int>(rr.old_to_new.size());
  const int n_new = new_mesh.size();
  RemappedState out;
  out.warm.theta.assign(n_new, 1.0);
  out.warm.sample_theta.assign(n_new, 1.0);
  out.warm.cap = resolution_caps(new_mesh, spec);
  out.warm.status.assign(n_new, SolveStatus::Pending);

  std::vector<int> seeds;
  for (int i = 0; i < n_old; ++i) {
    const int ni = rr.old_to_new[i];
    if (rr.is_new_cell[ni]) {
      seeds.push_back(ni);
      seeds.push_back(ni + 1);
      continue;
    }
    out.warm.theta[ni] = prev.assignment.theta[i];
    out.warm.sample_theta[ni] = prev.assignment.sample_theta[i];
    out.warm.status[ni] = prev.assignment.status[i];
    // re-tessellation shifts the facets of cells adjacent to a split; a
    // changed radius flags the shape change and voids the stored solve
    const bool shifted = std::abs(new_mesh.gamma[ni] - old_mesh.gamma[i]) > 1e-12;
    if (shifted) out.warm.status[ni] = SolveStatus::Pending;
    if (shifted || prev.dirty[i] || prev.assignment.status[i] != SolveStatus::Solved)
      seeds.push_back(ni);
  }
  out.resubmit = descendant_closure(new_g, seeds);
  return out;
}

// flag the states whose anchor sits on an attracting fixed point
std::vector<char> pinned_states(const Mesh& mesh, const std::vector<Vec>& pins) {
  std::vector<char> flags(mesh.size(), 0);
  if (pins.empty()) return flags;
  double scale = 1.0;
  for (int d = 0; d < mesh.domain.dim(); ++d) scale = std::max(scale, mesh.domain.width(d));
  const double tol2 = 1e-16 * scale * scale;
  for (int i = 0; i < mesh.size(); ++i)
    for (const Vec& p : pins)
      if (sqdist(mesh.anchors[i], p) <= tol2) flags[i] = 1;
  return flags;
}

}  // namespace

SynthesisResult synthesize(const SystemModel& sys, const ResolutionSpec& spec,
                           const SynthesisConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  validate(sys, spec);

  SynthesisResult res;
  res.data = sample_dataset(sys, cfg.samples, cfg.seed);
  res.mesh = cluster_mesh(sys, spec, res.data, cfg.k_init, cfg.seed, cfg.clustering).mesh;
  res.graph = build_abstraction(res.mesh, sys, EscapePolicy::NearestAnchor);
  const std::vector<Vec> pins = attracting_fixed_points(sys);
  std::vector<char> pinned = pinned_states(res.mesh, pins);

  RelationAssignment warm;
  std::vector<char> resubmit;
  bool have_warm = false;

  // sample-only refinement rounds are pre-processing within one high-level
  // iteration; they never touch the verifier and are bounded separately
  constexpr int kMaxPrecheckRounds = 64;

  for (int iter = 0; iter < cfg.max_high_iters; ++iter) {
    res.trace.high_iterations = iter + 1;

    // cull sample-certified infeasibility to a fixpoint before verifier work.
    // Local surgery handles isolated failures; when the failure set refuses
    // to clear for several consecutive rounds, the binding constraints are
    // chained through predecessor reaches that no single split reduces, so
    // the mesh is rebuilt by clustering the current dataset (counterexamples
    // included, which draws states toward the hard regions) at a higher k
    constexpr int kStallRounds = 8;
    bool sample_feasible = false;
    for (int pr = 0; pr < kMaxPrecheckRounds; ++pr) {
      const auto pre_t0 = std::chrono::steady_clock::now();
      PrecheckReport pre = precheck(res.mesh, res.graph, res.data, spec);
      if (pre.infeasible.empty()) {
        sample_feasible = true;
        break;
      }
      RoundLog log;
      log.states = res.mesh.size();
      log.failed = pre.infeasible;
      log.precheck_round = true;
      if ((pr + 1) % kStallRounds == 0) {
        const int k_next =
            std::min(res.mesh.size() + std::max(res.mesh.size() / 10, 4), res.data.size());
        const std::uint64_t reseed =
            cfg.seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(res.trace.refinements + 1);
        res.mesh = cluster_mesh(sys, spec, res.data, k_next, reseed, cfg.clustering).mesh;
        log.reclustered = true;
      } else {
        RefineResult rr = refine_cells(
            res.mesh, refinement_mask(res.graph, pre.infeasible, &pinned), &pins, &res.data, &spec);
        for (int i = 0; i < static_cast<int>(rr.old_to_new.size()); ++i)
          if (rr.is_new_cell[rr.old_to_new[i]]) log.split.push_back(i);
        res.mesh = std::move(rr.mesh);
      }
      ++res.trace.refinements;
      res.graph = build_abstraction(res.mesh, sys, EscapePolicy::NearestAnchor);
      pinned = pinned_states(res.mesh, pins);
      have_warm = false;  // sample bounds shifted everywhere; restart cold
      log.seconds = seconds_since(pre_t0);
      res.trace.rounds.push_back(std::move(log));
    }
    if (!sample_feasible) break;  // refinement budget exhausted on sample data

    const auto round_t0 = std::chrono::steady_clock::now();
    LowLevelOutcome out = low_level_loop(res.mesh, res.graph, res.data, spec, sys, cfg,
                                         have_warm ? &warm : nullptr,
                                         have_warm ? &resubmit : nullptr);
    RoundLog log;
    log.states = res.mesh.size();
    log.counterexamples = out.counterexamples;
    log.failed = out.failed;
    for (int i = 0; i < res.mesh.size(); ++i)
      if (out.assignment.status[i] == SolveStatus::Solved) ++log.solved;

    if (out.failed.empty()) {
      // authoritative full pass over every edge at the committed scales
      RelationVerdict full = verify_relation(res.mesh, res.graph, out.assignment, sys, cfg.budget);
      if (full.kind == VerdictKind::Verified) {
        res.verified = true;
        res.assignment = std::move(out.assignment);
        log.seconds = seconds_since(round_t0);
        res.trace.rounds.push_back(std::move(log));
        break;
      }
      if (full.kind == VerdictKind::CounterexampleFound) {
        const Vec& x = full.ctx->x;
        res.data.append(x, sys.step(x), Provenance::Counterexample);
        ++log.counterexamples;
        for (int j = 0; j < res.mesh.size(); ++j)
          if (res.graph.succ[j] >= 0 &&
              activates_committed(res.mesh, j, out.assignment.theta[j], x))
            out.dirty[res.graph.succ[j]] = 1;
        std::vector<int> seeds;
        for (int i = 0; i < res.mesh.size(); ++i)
          if (out.dirty[i]) seeds.push_back(i);
        resubmit = descendant_closure(res.graph, seeds);
        warm = out.assignment;
        have_warm = true;
        res.assignment = std::move(out.assignment);
        log.seconds = seconds_since(round_t0);
        res.trace.rounds.push_back(std::move(log));
        continue;
      }
      // width or box budget exhausted on some edge: report honestly
      res.assignment = std::move(out.assignment);
      log.seconds = seconds_since(round_t0);
      res.trace.rounds.push_back(std::move(log));
      break;
    }

    RefineResult rr = refine_cells(
        res.mesh, refinement_mask(res.graph, out.failed, &pinned), &pins, &res.data, &spec);
    for (int i = 0; i < static_cast<int>(rr.old_to_new.size()); ++i)
      if (rr.is_new_cell[rr.old_to_new[i]]) log.split.push_back(i);
    ++res.trace.refinements;
    Mesh new_mesh = std::move(rr.mesh);
    AbstractionGraph new_g = build_abstraction(new_mesh, sys, EscapePolicy::NearestAnchor);
    pinned = pinned_states(new_mesh, pins);
    RemappedState rm = remap_after_refine(rr, new_g, out, res.mesh, new_mesh, spec);
    warm = std::move(rm.warm);
    resubmit = std::move(rm.resubmit);
    have_warm = true;
    res.mesh = std::move(new_mesh);
    res.graph = std::move(new_g);
    res.assignment = std::move(out.assignment);
    log.seconds = seconds_since(round_t0);
    res.trace.rounds.push_back(std::move(log));
  }

  if (res.assignment.size() != res.mesh.size()) {
    // every round ended in a precheck refinement; no solve was committed
    res.assignment.theta.assign(res.mesh.size(), 1.0);
    res.assignment.sample_theta.assign(res.mesh.size(), 1.0);
    res.assignment.cap = resolution_caps(res.mesh, spec);
    res.assignment.status.assign(res.mesh.size(), SolveStatus::Pending);
  }
  PrecheckReport pre = precheck(res.mesh, res.graph, res.data, spec);
  res.precheck_lb.resize(res.mesh.size());
  for (int i = 0; i < res.mesh.size(); ++i)
    res.precheck_lb[i] = pre.lower_bound[i] * res.mesh.gamma[i];
  res.trace.seconds = seconds_since(t0);
  return res;
}

BaselineGrid uniform_grid_baseline(const SystemModel& sys, double eps, double eta) {
  const int n = sys.dim;
  if (!(eps > 0.0) || !(eta > 0.0)) throw SpecError("baseline radii must be positive");
  if (eta > eps) throw SpecError("grid precision must not exceed the target radius");
  const double s = 2.0 * eta / std::sqrt(static_cast<double>(n));

  BaselineGrid out;
  std::vector<int> counts(n);
  out.lattice_count = 1;
  out.cell_count = 1;
  for (int d = 0; d < n; ++d) {
    const double w = sys.domain.width(d);
    counts[d] = static_cast<int>(std::floor(w / s + 1e-9)) + 1;
    out.lattice_count *= counts[d];
    out.cell_count *= counts[d] - 1;
  }

  std::vector<Vec> anchors;
  std::vector<int> idx(n, 0);
  for (;;) {
    Vec a(n);
    for (int d = 0; d < n; ++d)
      a[d] = std::min(sys.domain.lo[d] + idx[d] * s, sys.domain.hi[d]);
    anchors.push_back(std::move(a));
    int d = 0;
    while (d < n && ++idx[d] == counts[d]) idx[d++] = 0;
    if (d == n) break;
  }

  Mesh mesh;
  mesh.domain = sys.domain;
  const int k = static_cast<int>(anchors.size());
  mesh.anchors = std::move(anchors);
  mesh.cells.resize(k);
  mesh.slack.resize(k);
  mesh.gamma.resize(k);
  mesh.cell_bbox.resize(k);
  for (int i = 0; i < k; ++i) {
    Box cell;
    cell.lo.resize(n);
    cell.hi.resize(n);
    double g2 = 0.0;
    for (int d = 0; d < n; ++d) {
      cell.lo[d] = std::max(sys.domain.lo[d], mesh.anchors[i][d] - 0.5 * s);
      cell.hi[d] = std::min(sys.domain.hi[d], mesh.anchors[i][d] + 0.5 * s);
      const double reach = std::max(cell.hi[d] - mesh.anchors[i][d], mesh.anchors[i][d] - cell.lo[d]);
      g2 += reach * reach;
    }
    mesh.cells[i].dim = n;
    mesh.cells[i].add_box(cell);
    mesh.cell_bbox[i] = cell;
    mesh.gamma[i] = std::sqrt(g2);
    Vec slack(mesh.cells[i].rows());
    for (int r = 0; r < mesh.cells[i].rows(); ++r)
      slack[r] = std::max(0.0, mesh.cells[i].b[r] -
                                   dot(mesh.cells[i].row(r), mesh.anchors[i].data(), n));
    mesh.slack[i] = std::move(slack);
  }

  out.graph = build_abstraction(mesh, sys, EscapePolicy::NearestAnchor);
  out.assignment.theta.resize(k);
  out.assignment.sample_theta.assign(k, 1.0);
  out.assignment.cap.resize(k);
  out.assignment.status.assign(k, SolveStatus::Pending);
  for (int i = 0; i < k; ++i) {
    out.assignment.theta[i] = eps / mesh.gamma[i];
    out.assignment.cap[i] = eps / mesh.gamma[i];
  }
  out.mesh = std::move(mesh);
  return out;
}

}  // namespace multires
