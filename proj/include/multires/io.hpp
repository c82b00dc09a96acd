#pragma once

#include <string>

#include "multires/cegis.hpp"
#include "multires/system.hpp"

namespace multires {

struct RunConfig {
  SystemModel system;
  ResolutionSpec resolution;
  SynthesisConfig synthesis;
};

RunConfig load_config(const std::string& json_text);
RunConfig load_config_file(const std::string& path);
std::string save_config(const RunConfig& cfg);

std::string mesh_to_json(const Mesh& mesh, const RelationAssignment* assignment = nullptr);
Mesh mesh_from_json(const std::string& text);

std::string relation_to_json(const AbstractionGraph& g, const RelationAssignment& assignment,
                             const Mesh& mesh, bool verified);
struct RelationFile {
  std::vector<int> succ;
  RelationAssignment assignment;
  bool verified = false;
};
RelationFile relation_from_json(const std::string& text);

std::string trace_to_json(const Trace& trace);

// columns: state, anchor norm, gamma, precheck lower bound, achieved radius,
// specified resolution
std::string resolution_csv(const Mesh& mesh, const RelationAssignment& assignment,
                           const std::vector<double>& precheck_lb, const ResolutionSpec& spec);

std::string graph_to_dot(const Mesh& mesh, const AbstractionGraph& g,
                         const RelationAssignment& assignment);
std::string adjacency_json(const AbstractionGraph& g);

// writes config.json, mesh.json, relation.json, resolution.csv, graph.dot,
// trace.json into dir
void write_result_dir(const std::string& dir, const RunConfig& cfg, const SynthesisResult& result);

struct LoadedResult {
  RunConfig config;
  Mesh mesh;
  AbstractionGraph graph;
  RelationAssignment assignment;
  bool verified = false;
};
LoadedResult load_result_dir(const std::string& dir);

}  // namespace multires
