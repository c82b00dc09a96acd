#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <string>

#include "CLI11.hpp"
#include "multires/errors.hpp"
#include "multires/fixtures.hpp"
#include "multires/io.hpp"
#include "multires/learner.hpp"

namespace {

using namespace multires;

constexpr int kExitVerified = 0;
constexpr int kExitExhausted = 2;
constexpr int kExitConfigError = 3;

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << text;
}

void print_round(int idx, const RoundLog& log) {
  std::printf("round %2d: states=%-5d solved=%-5d failed=%-4zu split=%-4zu ctx=%-4d %s(%.2fs)\n",
              idx, log.states, log.solved, log.failed.size(), log.split.size(),
              log.counterexamples, log.precheck_round ? "precheck " : "", log.seconds);
}

int run_synthesize(const std::string& config_path, int seed_override, int k_override,
                   int n_override, const std::string& out_dir) {
  RunConfig cfg = load_config_file(config_path);
  if (seed_override >= 0) cfg.synthesis.seed = static_cast<std::uint64_t>(seed_override);
  if (k_override > 0) cfg.synthesis.k_init = k_override;
  if (n_override > 0) cfg.synthesis.samples = n_override;

  SynthesisResult result = synthesize(cfg.system, cfg.resolution, cfg.synthesis);
  for (std::size_t i = 0; i < result.trace.rounds.size(); ++i)
    print_round(static_cast<int>(i), result.trace.rounds[i]);
  std::printf("%s: %d states, %d refinement(s), %.2fs total\n",
              result.verified ? "VERIFIED" : "EXHAUSTED", result.mesh.size(),
              result.trace.refinements, result.trace.seconds);

  if (!out_dir.empty()) {
    write_result_dir(out_dir, cfg, result);
    std::printf("wrote %s/{config.json,mesh.json,relation.json,resolution.csv,graph.dot,trace.json}\n",
                out_dir.c_str());
  }
  return result.verified ? kExitVerified : kExitExhausted;
}

int run_verify(const std::string& dir) {
  LoadedResult loaded = load_result_dir(dir);
  RelationVerdict verdict = verify_relation(loaded.mesh, loaded.graph, loaded.assignment,
                                            loaded.config.system, loaded.config.synthesis.budget);
  std::printf("checked %ld edge(s), %ld box(es)\n", verdict.edges_checked, verdict.boxes_used);
  switch (verdict.kind) {
    case VerdictKind::Verified:
      std::printf("VERIFIED\n");
      return kExitVerified;
    case VerdictKind::CounterexampleFound: {
      const Counterexample& c = *verdict.ctx;
      std::string pt;
      for (double v : c.x) pt += (pt.empty() ? "" : ", ") + std::to_string(v);
      std::printf("COUNTEREXAMPLE at edge %d -> %d, x = (%s)\n", c.src, c.dst, pt.c_str());
      return kExitExhausted;
    }
    default:
      std::printf("UNKNOWN (budget exhausted)\n");
      return kExitExhausted;
  }
}

int run_baseline(const std::string& config_path, double eta, double epsilon, bool verify,
                 const std::string& out_dir) {
  RunConfig cfg = load_config_file(config_path);
  double eps = epsilon;
  if (eps <= 0.0) {
    if (cfg.resolution.form != ResolutionSpec::Form::Constant)
      throw ConfigError("--epsilon is required unless the config resolution is constant");
    eps = cfg.resolution.constant;
  }
  BaselineGrid grid = uniform_grid_baseline(cfg.system, eps, eta);
  const double spacing = 2.0 * eta / std::sqrt(static_cast<double>(cfg.system.dim));
  std::printf("uniform grid: spacing=%.6g lattice=%ld cells=%ld\n", spacing, grid.lattice_count,
              grid.cell_count);

  int code = kExitVerified;
  if (verify) {
    RelationVerdict verdict = verify_relation(grid.mesh, grid.graph, grid.assignment, cfg.system,
                                              cfg.synthesis.budget);
    std::printf("baseline relation: %s\n",
                verdict.kind == VerdictKind::Verified
                    ? "VERIFIED"
                    : (verdict.kind == VerdictKind::Unknown ? "UNKNOWN" : "COUNTEREXAMPLE"));
    if (verdict.kind != VerdictKind::Verified) code = kExitExhausted;
  }
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    write_text(out_dir + "/mesh.json", mesh_to_json(grid.mesh, &grid.assignment));
    write_text(out_dir + "/relation.json",
               relation_to_json(grid.graph, grid.assignment, grid.mesh, false));
    std::printf("wrote %s/{mesh.json,relation.json}\n", out_dir.c_str());
  }
  return code;
}

int run_bench(const std::string& suite, const std::string& format, const std::string& out_path) {
  BenchReport report = run_benchmarks(suite);
  const std::string text = format == "json" ? report.render_json() : report.render_markdown();
  if (out_path.empty())
    std::printf("%s", text.c_str());
  else
    write_text(out_path, text);
  return report.all_pass ? 0 : 1;
}

int run_export(const std::string& dir, bool dot, bool csv, bool json) {
  LoadedResult loaded = load_result_dir(dir);
  if (dot) {
    std::printf("%s", graph_to_dot(loaded.mesh, loaded.graph, loaded.assignment).c_str());
  } else if (csv) {
    // the stored precheck bound is not reconstructible here; emit the mesh bound
    std::vector<double> lb(loaded.mesh.size());
    for (int i = 0; i < loaded.mesh.size(); ++i) lb[i] = loaded.mesh.gamma[i];
    std::printf("%s", resolution_csv(loaded.mesh, loaded.assignment, lb,
                                     loaded.config.resolution)
                          .c_str());
  } else if (json) {
    std::printf("%s\n", adjacency_json(loaded.graph).c_str());
  } else {
    throw ConfigError("export: pass one of --dot, --csv, --json");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-resolution abstraction synthesis"};
  app.require_subcommand(1);

  std::string config_path, result_dir, out_dir, suite, report_format = "md", out_path;
  int seed = -1, k = 0, n = 0;
  double eta = 0.0, epsilon = 0.0;
  bool do_verify = false, want_dot = false, want_csv = false, want_json = false;

  auto* synth = app.add_subcommand("synthesize", "synthesize an abstraction from a config");
  synth->add_option("config", config_path, "JSON configuration file")->required();
  synth->add_option("--seed", seed, "override the sampling/clustering seed");
  synth->add_option("--k", k, "override the initial number of abstract states");
  synth->add_option("--n", n, "override the number of sampled transitions");
  synth->add_option("--out", out_dir, "directory for result artifacts");

  auto* verify = app.add_subcommand("verify", "re-verify a serialized result directory");
  verify->add_option("result-dir", result_dir, "directory written by synthesize --out")
      ->required();

  auto* baseline = app.add_subcommand("baseline-grid", "uniform lattice abstraction");
  baseline->add_option("config", config_path, "JSON configuration file")->required();
  baseline->add_option("--eta", eta, "lattice precision parameter")->required();
  baseline->add_option("--epsilon", epsilon, "target resolution (defaults to the config constant)");
  baseline->add_flag("--verify", do_verify, "verify the baseline relation");
  baseline->add_option("--out", out_dir, "directory for mesh/relation JSON");

  auto* bench = app.add_subcommand("bench", "run a benchmark suite");
  bench->add_option("suite", suite, "examples | section7 | table1")->required();
  bench->add_option("--report", report_format, "md | json")
      ->check(CLI::IsMember({"md", "json"}));
  bench->add_option("--out", out_path, "write the report to a file");

  auto* exp = app.add_subcommand("export", "print artifacts from a result directory");
  exp->add_option("result-dir", result_dir, "directory written by synthesize --out")->required();
  exp->add_flag("--dot", want_dot, "graph in DOT format");
  exp->add_flag("--csv", want_csv, "per-state resolution table");
  exp->add_flag("--json", want_json, "adjacency structure as JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) return run_synthesize(config_path, seed, k, n, out_dir);
    if (verify->parsed()) return run_verify(result_dir);
    if (baseline->parsed()) return run_baseline(config_path, eta, epsilon, do_verify, out_dir);
    if (bench->parsed()) return run_bench(suite, report_format, out_path);
    if (exp->parsed()) return run_export(result_dir, want_dot, want_csv, want_json);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfigError;
  } catch (const SpecError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
