#include "multires/abstraction.hpp"

#include <algorithm>

#include "multires/errors.hpp"

namespace multires {

namespace {

// iterative Tarjan; emits strongly connected components sinks-first
std::vector<std::vector<int>> tarjan_sccs(const std::vector<int>& succ) {
  const int n = static_cast<int>(succ.size());
  std::vector<int> idx(n, -1), low(n, 0);
  std::vector<char> onstack(n, 0);
  std::vector<int> stack;
  std::vector<std::vector<int>> out;
  int counter = 0;

  struct Frame {
    int v;
    int ci;
  };
  std::vector<Frame> frames;

  for (int root = 0; root < n; ++root) {
    if (idx[root] >= 0) continue;
    frames.push_back({root, 0});
    while (!frames.empty()) {
      Frame& f = frames.back();
      const int v = f.v;
      if (f.ci == 0) {
        idx[v] = low[v] = counter++;
        stack.push_back(v);
        onstack[v] = 1;
      }
      bool descended = false;
      if (f.ci == 0 && succ[v] >= 0) {
        f.ci = 1;
        const int w = succ[v];
        if (idx[w] < 0) {
          frames.push_back({w, 0});
          descended = true;
        } else if (onstack[w]) {
          low[v] = std::min(low[v], idx[w]);
        }
      } else {
        f.ci = 1;
      }
      if (descended) continue;
      if (low[v] == idx[v]) {
        std::vector<int> comp;
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          onstack[w] = 0;
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        out.push_back(std::move(comp));
      }
      frames.pop_back();
      if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
    }
  }
  return out;
}

}  // namespace

AbstractionGraph graph_from_successors(std::vector<int> succ) {
  AbstractionGraph g;
  const int n = static_cast<int>(succ.size());
  g.succ = std::move(succ);
  g.pred.assign(n, {});
  g.escaped.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    const int s = g.succ[i];
    if (s < -1 || s >= n) throw GeometryError("successor index out of range");
    if (s >= 0) g.pred[s].push_back(i);
  }
  std::vector<std::vector<int>> rev = tarjan_sccs(g.succ);
  g.sccs.assign(rev.rbegin(), rev.rend());  // predecessors before successors
  g.scc_of.assign(n, -1);
  g.scc_cyclic.assign(g.sccs.size(), 0);
  for (std::size_t c = 0; c < g.sccs.size(); ++c) {
    for (int v : g.sccs[c]) g.scc_of[v] = static_cast<int>(c);
    g.scc_cyclic[c] = g.sccs[c].size() > 1 ||
                      (g.sccs[c].size() == 1 && g.succ[g.sccs[c][0]] == g.sccs[c][0]);
  }
  return g;
}

AbstractionGraph build_abstraction(const Mesh& mesh, const SystemModel& sys, EscapePolicy policy) {
  const int n = mesh.size();
  std::vector<int> succ(n, -1);
  std::vector<char> escaped(n, 0);
  for (int i = 0; i < n; ++i) {
    const Vec y = sys.step(mesh.anchors[i]);
    if (mesh.domain.contains(y, kMembershipTol)) {
      succ[i] = quantize(mesh, y);
    } else if (policy == EscapePolicy::NearestAnchor) {
      succ[i] = nearest_anchor(mesh, y);
      escaped[i] = 1;
    } else {
      throw DomainEscapeError("anchor image of state " + std::to_string(i) +
                              " leaves the domain");
    }
  }
  AbstractionGraph g = graph_from_successors(std::move(succ));
  g.escaped = std::move(escaped);
  return g;
}

std::vector<int> ancestors(const AbstractionGraph& g, int i) {
  std::vector<char> seen(g.size(), 0);
  std::vector<int> frontier = g.pred[i];
  std::vector<int> out;
  for (int v : frontier) seen[v] = 1;
  while (!frontier.empty()) {
    const int v = frontier.back();
    frontier.pop_back();
    out.push_back(v);
    for (int p : g.pred[v])
      if (!seen[p]) {
        seen[p] = 1;
        frontier.push_back(p);
      }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> descendants(const AbstractionGraph& g, int i) {
  std::vector<char> seen(g.size(), 0);
  std::vector<int> out;
  int w = g.succ[i];
  while (w >= 0 && !seen[w]) {
    seen[w] = 1;
    out.push_back(w);
    w = g.succ[w];
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<char> ancestor_closure(const AbstractionGraph& g, const std::vector<int>& seeds) {
  std::vector<char> mark(g.size(), 0);
  std::vector<int> frontier;
  for (int s : seeds)
    if (!mark[s]) {
      mark[s] = 1;
      frontier.push_back(s);
    }
  while (!frontier.empty()) {
    const int v = frontier.back();
    frontier.pop_back();
    for (int p : g.pred[v])
      if (!mark[p]) {
        mark[p] = 1;
        frontier.push_back(p);
      }
  }
  return mark;
}

std::vector<char> descendant_closure(const AbstractionGraph& g, const std::vector<int>& seeds) {
  std::vector<char> mark(g.size(), 0);
  for (int s : seeds) {
    int w = s;
    while (w >= 0 && !mark[w]) {
      mark[w] = 1;
      w = g.succ[w];
    }
  }
  return mark;
}

const std::vector<std::vector<int>>& topological_supernode_order(const AbstractionGraph& g) {
  return g.sccs;
}

}  // namespace multires
