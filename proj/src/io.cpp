#include "multires/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "multires/errors.hpp"

namespace multires {

using nlohmann::json;

namespace {

const json& require(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object() || !j.contains(key))
    throw ConfigError("missing key '" + (path.empty() ? key : path + "." + key) + "'");
  return j.at(key);
}

Box box_from_json(const json& j, const std::string& path) {
  const json& lo = require(j, "lo", path);
  const json& hi = require(j, "hi", path);
  if (!lo.is_array() || !hi.is_array() || lo.size() != hi.size() || lo.empty())
    throw ConfigError("'" + path + "' needs equal-length lo/hi arrays");
  Box b;
  b.lo = lo.get<Vec>();
  b.hi = hi.get<Vec>();
  for (std::size_t i = 0; i < b.lo.size(); ++i)
    if (!(b.lo[i] < b.hi[i]))
      throw ConfigError("'" + path + "' has lo >= hi at axis " + std::to_string(i));
  return b;
}

json box_to_json(const Box& b) { return json{{"lo", b.lo}, {"hi", b.hi}}; }

std::string status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Solved: return "solved";
    case SolveStatus::Infeasible: return "infeasible";
    default: return "pending";
  }
}

SolveStatus status_from_name(const std::string& s) {
  if (s == "solved") return SolveStatus::Solved;
  if (s == "infeasible") return SolveStatus::Infeasible;
  if (s == "pending") return SolveStatus::Pending;
  throw ConfigError("unknown solve status '" + s + "'");
}

json assignment_to_json(const RelationAssignment& a) {
  json j;
  j["theta"] = a.theta;
  j["sample_theta"] = a.sample_theta;
  j["cap"] = a.cap;
  json st = json::array();
  for (SolveStatus s : a.status) st.push_back(status_name(s));
  j["status"] = std::move(st);
  return j;
}

RelationAssignment assignment_from_json(const json& j, const std::string& path) {
  RelationAssignment a;
  a.theta = require(j, "theta", path).get<std::vector<double>>();
  a.sample_theta = require(j, "sample_theta", path).get<std::vector<double>>();
  a.cap = require(j, "cap", path).get<std::vector<double>>();
  for (const json& s : require(j, "status", path)) a.status.push_back(status_from_name(s));
  const std::size_t n = a.theta.size();
  if (a.sample_theta.size() != n || a.cap.size() != n || a.status.size() != n)
    throw ConfigError("'" + path + "' arrays disagree in length");
  return a;
}

json parse_text(const std::string& text, const char* what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ConfigError(std::string("malformed JSON in ") + what);
  return j;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << text;
}

}  // namespace

RunConfig load_config(const std::string& json_text) {
  const json j = parse_text(json_text, "config");
  RunConfig cfg;

  const json& sys = require(j, "system", "");
  const json& dimj = require(sys, "dim", "system");
  if (!dimj.is_number_integer() || dimj.get<int>() < 1 || dimj.get<int>() > 8)
    throw ConfigError("'system.dim' must be an integer in [1, 8]");
  cfg.system.dim = dimj.get<int>();
  cfg.system.domain = box_from_json(require(sys, "domain", "system"), "system.domain");
  if (cfg.system.domain.dim() != cfg.system.dim)
    throw ConfigError("'system.domain' does not match system.dim");
  cfg.system.initial_set = sys.contains("initial_set")
                               ? box_from_json(sys.at("initial_set"), "system.initial_set")
                               : cfg.system.domain;
  const json& flow = require(sys, "flow", "system");
  if (!flow.is_array() || static_cast<int>(flow.size()) != cfg.system.dim)
    throw ConfigError("'system.flow' must list one expression per dimension");
  std::vector<std::string> exprs;
  for (const json& e : flow) exprs.push_back(e.get<std::string>());
  try {
    cfg.system.flow = parse_map(exprs, cfg.system.dim);
  } catch (const SpecError& e) {
    throw ConfigError(std::string("'system.flow': ") + e.what());
  }

  const json& res = require(j, "resolution", "");
  const std::string form = require(res, "form", "resolution").get<std::string>();
  if (form == "constant") {
    cfg.resolution.form = ResolutionSpec::Form::Constant;
    cfg.resolution.constant = require(res, "value", "resolution").get<double>();
  } else if (form == "affine_norm") {
    cfg.resolution.form = ResolutionSpec::Form::AffineNorm;
    cfg.resolution.u = require(res, "u", "resolution").get<double>();
    cfg.resolution.v = require(res, "v", "resolution").get<double>();
  } else if (form == "expression") {
    cfg.resolution.form = ResolutionSpec::Form::Expression;
    cfg.resolution.expr_source = require(res, "expr", "resolution").get<std::string>();
    try {
      cfg.resolution.expr = parse_expr(cfg.resolution.expr_source, cfg.system.dim);
    } catch (const SpecError& e) {
      throw ConfigError(std::string("'resolution.expr': ") + e.what());
    }
  } else {
    throw ConfigError("'resolution.form' must be constant, affine_norm, or expression");
  }

  if (j.contains("synthesis")) {
    const json& s = j.at("synthesis");
    SynthesisConfig& sc = cfg.synthesis;
    sc.k_init = s.value("k_init", sc.k_init);
    sc.samples = s.value("samples", sc.samples);
    sc.seed = s.value("seed", sc.seed);
    sc.max_high_iters = s.value("max_high_iters", sc.max_high_iters);
    sc.max_low_iters = s.value("max_low_iters", sc.max_low_iters);
    sc.nonlinear_margin = s.value("nonlinear_margin", sc.nonlinear_margin);
    if (s.contains("budget")) {
      const json& b = s.at("budget");
      sc.budget.max_boxes = b.value("max_boxes", sc.budget.max_boxes);
      sc.budget.min_width_frac = b.value("min_width_frac", sc.budget.min_width_frac);
    }
    if (s.contains("clustering")) {
      const json& c = s.at("clustering");
      sc.clustering.max_iters = c.value("max_iters", sc.clustering.max_iters);
      sc.clustering.restarts = c.value("restarts", sc.clustering.restarts);
      if (c.contains("weight_mode")) {
        const std::string m = c.at("weight_mode").get<std::string>();
        if (m == "uniform") sc.clustering.weight_mode = WeightMode::Uniform;
        else if (m == "inverse_resolution") sc.clustering.weight_mode = WeightMode::InverseResolution;
        else throw ConfigError("'synthesis.clustering.weight_mode' must be uniform or inverse_resolution");
      }
    }
    if (sc.k_init < 1) throw ConfigError("'synthesis.k_init' must be positive");
    if (sc.samples < 1) throw ConfigError("'synthesis.samples' must be positive");
  }
  return cfg;
}

RunConfig load_config_file(const std::string& path) { return load_config(read_file(path)); }

std::string save_config(const RunConfig& cfg) {
  json j;
  j["system"]["dim"] = cfg.system.dim;
  j["system"]["domain"] = box_to_json(cfg.system.domain);
  j["system"]["initial_set"] = box_to_json(cfg.system.initial_set);
  j["system"]["flow"] = cfg.system.flow.sources;
  switch (cfg.resolution.form) {
    case ResolutionSpec::Form::Constant:
      j["resolution"] = {{"form", "constant"}, {"value", cfg.resolution.constant}};
      break;
    case ResolutionSpec::Form::AffineNorm:
      j["resolution"] = {{"form", "affine_norm"}, {"u", cfg.resolution.u}, {"v", cfg.resolution.v}};
      break;
    case ResolutionSpec::Form::Expression:
      j["resolution"] = {{"form", "expression"}, {"expr", cfg.resolution.expr_source}};
      break;
  }
  const SynthesisConfig& sc = cfg.synthesis;
  j["synthesis"] = {
      {"k_init", sc.k_init},
      {"samples", sc.samples},
      {"seed", sc.seed},
      {"max_high_iters", sc.max_high_iters},
      {"max_low_iters", sc.max_low_iters},
      {"nonlinear_margin", sc.nonlinear_margin},
      {"budget", {{"max_boxes", sc.budget.max_boxes}, {"min_width_frac", sc.budget.min_width_frac}}},
      {"clustering",
       {{"max_iters", sc.clustering.max_iters},
        {"restarts", sc.clustering.restarts},
        {"weight_mode", sc.clustering.weight_mode == WeightMode::Uniform ? "uniform"
                                                                         : "inverse_resolution"}}}};
  return j.dump(2) + "\n";
}

std::string mesh_to_json(const Mesh& mesh, const RelationAssignment* assignment) {
  json j;
  j["dim"] = mesh.domain.dim();
  j["domain"] = box_to_json(mesh.domain);
  j["anchors"] = mesh.anchors;
  json cells = json::array();
  for (int i = 0; i < mesh.size(); ++i) {
    const HPolytope& c = mesh.cells[i];
    json rows = json::array();
    for (int r = 0; r < c.rows(); ++r) rows.push_back(Vec(c.row(r), c.row(r) + c.dim));
    cells.push_back(json{{"A", std::move(rows)}, {"b", c.b}});
  }
  j["cells"] = std::move(cells);
  j["slack"] = mesh.slack;
  j["gamma"] = mesh.gamma;
  json bboxes = json::array();
  for (const Box& b : mesh.cell_bbox) bboxes.push_back(box_to_json(b));
  j["cell_bbox"] = std::move(bboxes);
  if (assignment != nullptr) j["assignment"] = assignment_to_json(*assignment);
  return j.dump(2) + "\n";
}

Mesh mesh_from_json(const std::string& text) {
  const json j = parse_text(text, "mesh");
  Mesh mesh;
  mesh.domain = box_from_json(require(j, "domain", "mesh"), "mesh.domain");
  const int dim = require(j, "dim", "mesh").get<int>();
  if (dim != mesh.domain.dim()) throw ConfigError("'mesh.dim' disagrees with the domain");
  for (const json& a : require(j, "anchors", "mesh")) mesh.anchors.push_back(a.get<Vec>());
  for (const json& c : require(j, "cells", "mesh")) {
    HPolytope p;
    p.dim = dim;
    const json& rows = require(c, "A", "mesh.cells");
    for (const json& r : rows) {
      Vec row = r.get<Vec>();
      if (static_cast<int>(row.size()) != dim) throw ConfigError("cell row has wrong dimension");
      p.A.insert(p.A.end(), row.begin(), row.end());
    }
    p.b = require(c, "b", "mesh.cells").get<std::vector<double>>();
    if (p.b.size() != rows.size()) throw ConfigError("cell A/b row counts disagree");
    mesh.cells.push_back(std::move(p));
  }
  for (const json& s : require(j, "slack", "mesh")) mesh.slack.push_back(s.get<Vec>());
  mesh.gamma = require(j, "gamma", "mesh").get<std::vector<double>>();
  for (const json& b : require(j, "cell_bbox", "mesh"))
    mesh.cell_bbox.push_back(box_from_json(b, "mesh.cell_bbox"));
  const std::size_t k = mesh.anchors.size();
  if (mesh.cells.size() != k || mesh.slack.size() != k || mesh.gamma.size() != k ||
      mesh.cell_bbox.size() != k || k == 0)
    throw ConfigError("mesh arrays disagree in length");
  return mesh;
}

std::string relation_to_json(const AbstractionGraph& g, const RelationAssignment& assignment,
                             const Mesh& mesh, bool verified) {
  json j;
  j["verified"] = verified;
  j["succ"] = g.succ;
  j["assignment"] = assignment_to_json(assignment);
  Vec radius(assignment.size());
  for (int i = 0; i < assignment.size(); ++i) radius[i] = assignment.radius(mesh, i);
  j["radius"] = std::move(radius);
  json esc = json::array();
  for (char e : g.escaped) esc.push_back(static_cast<bool>(e));
  j["escaped"] = std::move(esc);
  return j.dump(2) + "\n";
}

RelationFile relation_from_json(const std::string& text) {
  const json j = parse_text(text, "relation");
  RelationFile f;
  f.verified = require(j, "verified", "relation").get<bool>();
  f.succ = require(j, "succ", "relation").get<std::vector<int>>();
  f.assignment = assignment_from_json(require(j, "assignment", "relation"), "relation.assignment");
  if (static_cast<int>(f.succ.size()) != f.assignment.size())
    throw ConfigError("'relation' succ/assignment lengths disagree");
  return f;
}

std::string trace_to_json(const Trace& trace) {
  json j;
  j["high_iterations"] = trace.high_iterations;
  j["refinements"] = trace.refinements;
  j["seconds"] = trace.seconds;
  json rounds = json::array();
  for (const RoundLog& r : trace.rounds) {
    rounds.push_back(json{{"states", r.states},
                          {"solved", r.solved},
                          {"failed", r.failed},
                          {"split", r.split},
                          {"counterexamples", r.counterexamples},
                          {"precheck_round", r.precheck_round},
                          {"seconds", r.seconds}});
  }
  j["rounds"] = std::move(rounds);
  return j.dump(2) + "\n";
}

std::string resolution_csv(const Mesh& mesh, const RelationAssignment& assignment,
                           const std::vector<double>& precheck_lb, const ResolutionSpec& spec) {
  std::string out = "state,anchor_norm,gamma,precheck_lb,achieved_radius,specified_resolution\n";
  char buf[256];
  for (int i = 0; i < mesh.size(); ++i) {
    const double lb = i < static_cast<int>(precheck_lb.size()) ? precheck_lb[i] : 0.0;
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", i,
                  norm2(mesh.anchors[i]), mesh.gamma[i], lb, assignment.radius(mesh, i),
                  resolution_at(spec, mesh.anchors[i]));
    out += buf;
  }
  return out;
}

std::string graph_to_dot(const Mesh& mesh, const AbstractionGraph& g,
                         const RelationAssignment& assignment) {
  std::ostringstream out;
  out << "digraph abstraction {\n  node [shape=circle, style=filled];\n";
  char buf[160];
  for (int i = 0; i < g.size(); ++i) {
    const char* color = "lightgray";
    if (assignment.status[i] == SolveStatus::Solved) color = "palegreen";
    else if (assignment.status[i] == SolveStatus::Infeasible) color = "lightcoral";
    std::snprintf(buf, sizeof buf, "  s%d [label=\"%d\\nr=%.3g\", fillcolor=%s];\n", i, i,
                  assignment.radius(mesh, i), color);
    out << buf;
  }
  for (int i = 0; i < g.size(); ++i)
    if (g.succ[i] >= 0) out << "  s" << i << " -> s" << g.succ[i] << ";\n";
  out << "}\n";
  return out.str();
}

std::string adjacency_json(const AbstractionGraph& g) {
  json j;
  j["succ"] = g.succ;
  j["pred"] = g.pred;
  json sccs = json::array();
  for (const auto& s : g.sccs) sccs.push_back(s);
  j["supernodes"] = std::move(sccs);
  return j.dump(2) + "\n";
}

void write_result_dir(const std::string& dir, const RunConfig& cfg, const SynthesisResult& result) {
  std::filesystem::create_directories(dir);
  const auto path = [&](const char* name) { return (std::filesystem::path(dir) / name).string(); };
  write_file(path("config.json"), save_config(cfg));
  write_file(path("mesh.json"), mesh_to_json(result.mesh, &result.assignment));
  write_file(path("relation.json"),
             relation_to_json(result.graph, result.assignment, result.mesh, result.verified));
  write_file(path("resolution.csv"),
             resolution_csv(result.mesh, result.assignment, result.precheck_lb, cfg.resolution));
  write_file(path("graph.dot"), graph_to_dot(result.mesh, result.graph, result.assignment));
  write_file(path("trace.json"), trace_to_json(result.trace));
}

LoadedResult load_result_dir(const std::string& dir) {
  const auto path = [&](const char* name) { return (std::filesystem::path(dir) / name).string(); };
  LoadedResult out;
  out.config = load_config_file(path("config.json"));
  out.mesh = mesh_from_json(read_file(path("mesh.json")));
  RelationFile rel = relation_from_json(read_file(path("relation.json")));
  if (static_cast<int>(rel.succ.size()) != out.mesh.size())
    throw ConfigError("relation does not match the mesh size");
  out.graph = graph_from_successors(rel.succ);
  out.assignment = std::move(rel.assignment);
  out.verified = rel.verified;
  return out;
}

}  // namespace multires
