#include "multires/fixtures.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <utility>

#include "json.hpp"
#include "multires/learner.hpp"

namespace multires {

namespace {

HPolytope interval_cell(double lo, double hi) {
  HPolytope p;
  p.dim = 1;
  p.add_row({1.0}, hi);
  p.add_row({-1.0}, -lo);
  return p;
}

SystemModel doubling_system(double lo, double hi) {
  SystemModel sys;
  sys.dim = 1;
  sys.domain = Box{{lo}, {hi}};
  sys.initial_set = sys.domain;
  sys.flow = parse_map({"2*x"}, 1);
  return sys;
}

RelationAssignment unit_assignment(const Mesh& mesh, const ResolutionSpec& spec) {
  RelationAssignment a;
  const int n = mesh.size();
  a.theta.assign(n, 1.0);
  a.sample_theta.assign(n, 1.0);
  a.cap = resolution_caps(mesh, spec);
  a.status.assign(n, SolveStatus::Solved);
  return a;
}

HandFixture assemble(std::string name, SystemModel sys, ResolutionSpec spec,
                     std::vector<Vec> anchors, std::vector<HPolytope> cells,
                     std::vector<int> succ) {
  HandFixture f;
  f.name = std::move(name);
  f.sys = std::move(sys);
  f.spec = std::move(spec);
  f.mesh = make_mesh(std::move(anchors), std::move(cells), f.sys.domain);
  f.graph = graph_from_successors(std::move(succ));
  f.assignment = unit_assignment(f.mesh, f.spec);
  return f;
}

}  // namespace

// Four tiers of four cells each; every cell's image under x -> 2x is exactly
// the matching cell one tier up, so theta = 1 is consistent and tight. The
// top tier leaves the domain and has no successors.
HandFixture fixture_doubling16() {
  std::vector<Vec> anchors;
  std::vector<HPolytope> cells;
  std::vector<int> succ;
  for (int tier = 0; tier < 4; ++tier) {
    const double w = 0.25 * (1 << tier);  // cell width per tier
    const double base = 1 << tier;        // tier spans [2^t, 2^{t+1}]
    for (int j = 0; j < 4; ++j) {
      const double lo = base + j * w;
      anchors.push_back({lo + 0.5 * w});
      cells.push_back(interval_cell(lo, lo + w));
      succ.push_back(tier < 3 ? 4 * (tier + 1) + j : -1);
    }
  }
  ResolutionSpec spec;
  spec.form = ResolutionSpec::Form::Constant;
  spec.constant = 1.0;
  return assemble("doubling16", doubling_system(1.0, 16.0), spec, std::move(anchors),
                  std::move(cells), std::move(succ));
}

// Same dynamics with the coarse half of each tier merged into one wide cell,
// which the affine resolution profile permits: eight states instead of
// sixteen. Images again land exactly on target cells.
HandFixture fixture_doubling8() {
  std::vector<Vec> anchors = {{1.125}, {1.625}, {2.25}, {3.25}, {4.5}, {6.5}, {9.0}, {13.0}};
  std::vector<HPolytope> cells;
  const double edges[8][2] = {{1.0, 1.25}, {1.25, 2.0}, {2.0, 2.5}, {2.5, 4.0},
                              {4.0, 5.0},  {5.0, 8.0},  {8.0, 10.0}, {10.0, 16.0}};
  for (const auto& e : edges) cells.push_back(interval_cell(e[0], e[1]));
  std::vector<int> succ = {2, 3, 4, 5, 6, 7, -1, -1};

  ResolutionSpec spec;
  spec.form = ResolutionSpec::Form::AffineNorm;
  spec.u = 2.5 / 12.0;       // eps(x) = u|x| + v through eps(13) = 3
  spec.v = 0.5 - spec.u;     // and eps(1) = 0.5
  return assemble("doubling8", doubling_system(1.0, 16.0), spec, std::move(anchors),
                  std::move(cells), std::move(succ));
}

// Geometric chain: anchors 1.5 * 2^i with cells [2^i, 2^{i+1}]. The resolution
// eps(x) = x/3 scales with the state, so a single chain covers [1, 96] with
// seven states; the last cell extends past the domain and is successor-free.
HandFixture fixture_chain7() {
  std::vector<Vec> anchors;
  std::vector<HPolytope> cells;
  std::vector<int> succ;
  for (int i = 0; i < 7; ++i) {
    const double lo = double(1 << i);
    anchors.push_back({1.5 * lo});
    cells.push_back(interval_cell(lo, 2.0 * lo));
    succ.push_back(i < 6 ? i + 1 : -1);
  }
  ResolutionSpec spec;
  spec.form = ResolutionSpec::Form::Expression;
  spec.expr_source = "x/3";
  spec.expr = parse_expr(spec.expr_source, 1);
  return assemble("chain7", doubling_system(1.0, 96.0), spec, std::move(anchors),
                  std::move(cells), std::move(succ));
}

// ---------------------------------------------------------------------------
// benchmark configurations

namespace {

RunConfig planar_config(std::vector<std::string> flow, Box domain, ResolutionSpec spec, int k,
                        int samples, std::uint64_t seed) {
  RunConfig cfg;
  cfg.system.dim = 2;
  cfg.system.domain = std::move(domain);
  cfg.system.initial_set = cfg.system.domain;
  cfg.system.flow = parse_map(flow, 2);
  cfg.resolution = std::move(spec);
  cfg.synthesis.k_init = k;
  cfg.synthesis.samples = samples;
  cfg.synthesis.seed = seed;
  return cfg;
}

ResolutionSpec affine_norm_spec(double u, double v) {
  ResolutionSpec spec;
  spec.form = ResolutionSpec::Form::AffineNorm;
  spec.u = u;
  spec.v = v;
  return spec;
}

const std::vector<std::string> kRotationFlow = {"0.4*(x - y)", "0.4*(x + y)"};

}  // namespace

RunConfig config_rotation(int k, int samples, std::uint64_t seed) {
  return planar_config(kRotationFlow, Box{{-1, -1}, {1, 1}}, affine_norm_spec(0.3, 0.5), k,
                       samples, seed);
}

// One-step matrix of the continuous-time system [[-7,1],[8,-10]] sampled at
// dt = 0.05 (entries of the matrix exponential, full precision).
RunConfig config_linear2d(int k, int samples, std::uint64_t seed) {
  ResolutionSpec spec;
  spec.form = ResolutionSpec::Form::Constant;
  spec.constant = 0.5;
  return planar_config({"0.71140652593594844*x + 0.032828275326780572*y",
                        "0.26262620261424457*x + 0.61292169995560675*y"},
                       Box{{-1, -1}, {1, 1}}, spec, k, samples, seed);
}

RunConfig config_quadratic(int k, int samples, std::uint64_t seed) {
  return planar_config({"0.5*x", "0.5*y + 0.5*x^2"}, Box{{-0.5, -0.5}, {3, 5}},
                       affine_norm_spec(0.3, 0.5), k, samples, seed);
}

RunConfig config_piecewise(int k, int samples, std::uint64_t seed) {
  return planar_config({"0.8*x", "piecewise(abs(y) < 0.5, 3.2*y^3, 0.8*y)"},
                       Box{{-1, -1}, {1, 1}}, affine_norm_spec(0.3, 0.5), k, samples, seed);
}

RunConfig config_const_resolution(double eps, int k, std::uint64_t seed) {
  ResolutionSpec spec;
  spec.form = ResolutionSpec::Form::Constant;
  spec.constant = eps;
  return planar_config(kRotationFlow, Box{{-1, -1}, {1, 1}}, spec, k, 5000, seed);
}

// ---------------------------------------------------------------------------
// benchmark runner

namespace {

struct CheckList {
  std::vector<std::string> out;
  bool pass = true;

  void check(bool ok, const std::string& what) {
    out.push_back((ok ? "ok: " : "FAIL: ") + what);
    pass = pass && ok;
  }
};

const char* verdict_name(VerdictKind k) {
  switch (k) {
    case VerdictKind::Verified: return "verified";
    case VerdictKind::CounterexampleFound: return "counterexample";
    default: return "unknown";
  }
}

// max over states of achieved radius / specified resolution
double worst_resolution_ratio(const Mesh& mesh, const RelationAssignment& a,
                              const ResolutionSpec& spec) {
  double worst = 0.0;
  for (int i = 0; i < mesh.size(); ++i)
    worst = std::max(worst, a.radius(mesh, i) / resolution_at(spec, mesh.anchors[i]));
  return worst;
}

BenchRow fixture_row(const HandFixture& f) {
  BenchRow row;
  row.name = f.name;
  row.states = f.mesh.size();

  const auto t0 = std::chrono::steady_clock::now();
  const RelationVerdict verdict =
      verify_relation(f.mesh, f.graph, f.assignment, f.sys, VerifyBudget{});
  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  row.verdict = verdict_name(verdict.kind);

  CheckList cl;
  cl.check(verdict.kind == VerdictKind::Verified, "hand relation verifies");
  bool caps_ok = true, cover_ok = true;
  for (int i = 0; i < f.mesh.size(); ++i) {
    caps_ok = caps_ok && f.assignment.theta[i] <= f.assignment.cap[i] * (1.0 + 1e-12) + 1e-12;
    cover_ok = cover_ok && f.assignment.theta[i] >= 1.0;
  }
  cl.check(cover_ok, "coverage: theta >= 1 at every state");
  cl.check(caps_ok, "resolution: theta within cap at every state");
  cl.check(worst_resolution_ratio(f.mesh, f.assignment, f.spec) <= 1.0 + 1e-9,
           "achieved radius within specified resolution");
  cl.check(row.seconds < 1.0, "verification under one second");
  row.checks = cl.out;
  row.pass = cl.pass;
  return row;
}

using ExtraChecks = std::function<void(const SynthesisResult&, CheckList&)>;

BenchRow synthesis_row(const std::string& name, const RunConfig& cfg, const ExtraChecks& extra) {
  BenchRow row;
  row.name = name;
  const SynthesisResult res = synthesize(cfg.system, cfg.resolution, cfg.synthesis);
  row.states = res.mesh.size();
  row.refinements = res.trace.refinements;
  row.seconds = res.trace.seconds;
  row.verdict = res.verified ? "verified" : "exhausted";

  CheckList cl;
  cl.check(res.verified, "synthesis verified");
  if (res.verified)
    cl.check(worst_resolution_ratio(res.mesh, res.assignment, cfg.resolution) <= 1.0 + 1e-9,
             "achieved radius within specified resolution at every state");
  if (extra) extra(res, cl);
  row.checks = cl.out;
  row.pass = cl.pass;
  return row;
}

BenchReport examples_suite() {
  BenchReport report;
  report.suite = "examples";
  report.rows.push_back(fixture_row(fixture_doubling16()));
  report.rows.push_back(fixture_row(fixture_doubling8()));
  report.rows.push_back(fixture_row(fixture_chain7()));
  return report;
}

BenchReport section7_suite() {
  BenchReport report;
  report.suite = "section7";

  report.rows.push_back(synthesis_row(
      "rotation-affine-norm", config_rotation(30, 5000, 1),
      [](const SynthesisResult& res, CheckList& cl) {
        cl.check(res.trace.seconds <= 60.0, "completes within 60 s");
        cl.check(res.trace.high_iterations <= 2, "at most two outer iterations");
      }));

  {
    const RunConfig cfg = config_linear2d(150, 5000, 1);
    BenchRow row = synthesis_row(
        "linear2d-const-0.5", cfg, [&cfg](const SynthesisResult& res, CheckList& cl) {
          cl.check(res.mesh.size() <= 350, "at most 350 states");
          if (res.verified)
            cl.check(worst_resolution_ratio(res.mesh, res.assignment, cfg.resolution) <= 0.8,
                     "worst-case achieved resolution at most 0.8 of the target");
        });
    const BaselineGrid grid =
        uniform_grid_baseline(cfg.system, 0.5, std::sqrt(2.0) / 20.0);
    row.baseline_states = grid.cell_count;
    CheckList cl;
    cl.check(grid.lattice_count == 441 && grid.cell_count == 400,
             "uniform baseline lattice/cell counts are 441/400");
    cl.check(row.states < grid.cell_count, "fewer states than the uniform baseline");
    for (auto& line : cl.out) row.checks.push_back(line);
    row.pass = row.pass && cl.pass;
    report.rows.push_back(std::move(row));
  }

  report.rows.push_back(synthesis_row(
      "quadratic-non-contractive", config_quadratic(300, 10000, 1),
      [](const SynthesisResult& res, CheckList& cl) {
        cl.check(res.trace.refinements >= 1, "at least one refinement round");
        cl.check(res.mesh.size() <= 720, "at most 720 states");
      }));

  report.rows.push_back(synthesis_row(
      "piecewise-nondifferentiable", config_piecewise(300, 5000, 1),
      [](const SynthesisResult& res, CheckList& cl) {
        cl.check(res.trace.seconds <= 600.0, "completes within 10 minutes");
      }));
  return report;
}

BenchReport table1_suite() {
  BenchReport report;
  report.suite = "table1";
  const double eps[3] = {0.3, 0.2, 0.1};
  const int k_init[3] = {100, 180, 1200};
  const long bound[3] = {304, 406, 2862};
  long prev = 0;
  for (int i = 0; i < 3; ++i) {
    char name[64];
    std::snprintf(name, sizeof name, "const-eps-%.1f", eps[i]);
    BenchRow row = synthesis_row(
        name, config_const_resolution(eps[i], k_init[i], 1),
        [&](const SynthesisResult& res, CheckList& cl) {
          char what[96];
          std::snprintf(what, sizeof what, "at most %ld states", bound[i]);
          cl.check(res.mesh.size() <= bound[i], what);
          if (i > 0)
            cl.check(res.mesh.size() >= prev,
                     "state count does not shrink as the resolution tightens");
          if (eps[i] == 0.1) cl.check(res.trace.seconds <= 600.0, "completes within 10 minutes");
        });
    prev = row.states;
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace

BenchReport run_benchmarks(const std::string& suite) {
  BenchReport report;
  if (suite == "examples")
    report = examples_suite();
  else if (suite == "section7")
    report = section7_suite();
  else if (suite == "table1")
    report = table1_suite();
  else
    throw ConfigError("unknown benchmark suite '" + suite +
                      "' (expected examples, section7, or table1)");
  report.all_pass = true;
  for (const auto& row : report.rows) report.all_pass = report.all_pass && row.pass;
  return report;
}

std::string BenchReport::render_markdown() const {
  std::string out = "# Benchmark suite: " + suite + "\n\n";
  out += "| fixture | verdict | states | baseline | refinements | seconds | pass |\n";
  out += "|---|---|---|---|---|---|---|\n";
  char buf[256];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof buf, "| %s | %s | %ld | %s | %d | %.2f | %s |\n", row.name.c_str(),
                  row.verdict.c_str(), row.states,
                  row.baseline_states > 0 ? std::to_string(row.baseline_states).c_str() : "-",
                  row.refinements, row.seconds, row.pass ? "yes" : "NO");
    out += buf;
  }
  for (const auto& row : rows) {
    out += "\n## " + row.name + "\n";
    for (const auto& line : row.checks) out += "- " + line + "\n";
  }
  out += all_pass ? "\nAll checks passed.\n" : "\nSome checks FAILED.\n";
  return out;
}

std::string BenchReport::render_json() const {
  nlohmann::json j;
  j["suite"] = suite;
  j["all_pass"] = all_pass;
  j["rows"] = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json r;
    r["name"] = row.name;
    r["verdict"] = row.verdict;
    r["states"] = row.states;
    r["baseline_states"] = row.baseline_states;
    r["refinements"] = row.refinements;
    r["seconds"] = row.seconds;
    r["checks"] = row.checks;
    r["pass"] = row.pass;
    j["rows"].push_back(std::move(r));
  }
  return j.dump(2);
}

}  // namespace multires
