#pragma once

#include <vector>

#include "multires/mesh.hpp"
#include "multires/system.hpp"

namespace multires {

// what to do when an anchor image leaves the domain box
enum class EscapePolicy { Error, NearestAnchor };

// deterministic finite abstraction: state i steps to succ[i]
struct AbstractionGraph {
  std::vector<int> succ;  // -1 marks a truncated state with no successor
  std::vector<std::vector<int>> pred;
  std::vector<std::vector<int>> sccs;  // condensation in topological order
  std::vector<int> scc_of;
  std::vector<char> scc_cyclic;  // supernode contains an edge
  std::vector<char> escaped;     // image left the domain (NearestAnchor policy)

  int size() const { return static_cast<int>(succ.size()); }
};

AbstractionGraph build_abstraction(const Mesh& mesh, const SystemModel& sys,
                                   EscapePolicy policy = EscapePolicy::Error);

// graph from an explicit successor map (hand fixtures, deserialization)
AbstractionGraph graph_from_successors(std::vector<int> succ);

// states with a path to i / reachable from i (paths of length >= 1)
std::vector<int> ancestors(const AbstractionGraph& g, int i);
std::vector<int> descendants(const AbstractionGraph& g, int i);
std::vector<char> ancestor_closure(const AbstractionGraph& g, const std::vector<int>& seeds);
std::vector<char> descendant_closure(const AbstractionGraph& g, const std::vector<int>& seeds);

// supernodes ordered so every supernode follows all its predecessors
const std::vector<std::vector<int>>& topological_supernode_order(const AbstractionGraph& g);

}  // namespace multires
