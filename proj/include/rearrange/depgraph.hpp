#pragma once

#include <string>
#include <vector>

#include "rearrange/instance.hpp"
#include "rearrange/weighting.hpp"

namespace rearrange {

class Deadline;

/// Vertex-weighted digraph over objects. Arc i -> j means object i's goal
/// pose overlaps object j's start pose, so j must leave first.
class DependencyGraph {
 public:
  DependencyGraph() = default;
  /// Arc-free graph; throws std::invalid_argument on negative weights.
  explicit DependencyGraph(WeightVector weights);

  /// Self-arcs are ignored; duplicate arcs are collapsed.
  void add_arc(int from, int to);

  int size() const { return static_cast<int>(weights_.size()); }
  const WeightVector& weights() const { return weights_; }
  double weight(int v) const { return weights_[v]; }
  const std::vector<int>& successors(int v) const { return out_[v]; }
  bool has_arc(int from, int to) const;
  std::size_t arc_count() const;

 private:
  WeightVector weights_;
  std::vector<std::vector<int>> out_;
};

/// Builds the graph between two arrangements of the same objects.
DependencyGraph build_dependency_graph(const Instance& inst,
                                       const WeightVector& weights);

/// Strongly connected components in reverse topological order of the
/// condensation: every component appears after all components it points to,
/// so handling them in order never waits on a later one. Vertices inside a
/// component are ascending.
std::vector<std::vector<int>> strongly_connected_components(
    const DependencyGraph& g);

/// True if the graph restricted to vertices with keep[v] has no cycle.
bool is_acyclic(const DependencyGraph& g, const std::vector<bool>& keep);

/// Minimum-weight feedback vertex set, ascending. Solved exactly per strongly
/// connected component by branch and bound. Among optimal sets with positive
/// weights the lexicographically smallest is returned. Polls the deadline if
/// one is given.
std::vector<int> min_weight_fvs(const DependencyGraph& g,
                                const Deadline* deadline = nullptr);

double total_weight(const DependencyGraph& g, const std::vector<int>& vertices);

/// Graphviz dump; vertices are labelled "index:weight".
std::string to_dot(const DependencyGraph& g);

}  // namespace rearrange
