#include "rearrange/depgraph.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "rearrange/deadline.hpp"

namespace rearrange {

DependencyGraph::DependencyGraph(WeightVector weights)
    : weights_(std::move(weights)), out_(weights_.size()) {
  for (double w : weights_) {
    if (!(w >= 0.0)) throw std::invalid_argument("vertex weights must be >= 0");
  }
}

void DependencyGraph::add_arc(int from, int to) {
  if (from == to) return;
  auto& succ = out_.at(from);
  auto it = std::lower_bound(succ.begin(), succ.end(), to);
  if (it == succ.end() || *it != to) succ.insert(it, to);
}

bool DependencyGraph::has_arc(int from, int to) const {
  return std::binary_search(out_[from].begin(), out_[from].end(), to);
}

std::size_t DependencyGraph::arc_count() const {
  std::size_t m = 0;
  for (const auto& s : out_) m += s.size();
  return m;
}

DependencyGraph build_dependency_graph(const Instance& inst,
                                       const WeightVector& weights) {
  const int n = static_cast<int>(inst.size());
  if (static_cast<int>(weights.size()) != n) {
    throw std::invalid_argument("one weight per object required");
  }
  std::vector<PlacedShape> starts, goals;
  for (int i = 0; i < n; ++i) {
    starts.push_back(place(inst.objects[i].footprint, inst.start[i]));
    goals.push_back(place(inst.objects[i].footprint, inst.goal[i]));
  }
  DependencyGraph g(weights);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j && collide(goals[i], starts[j])) g.add_arc(i, j);
    }
  }
  return g;
}

std::vector<std::vector<int>> strongly_connected_components(
    const DependencyGraph& g) {
  // Iterative Tarjan; components come out sinks first.
  const int n = g.size();
  std::vector<int> index(n, -1), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<int> stack;
  std::vector<std::vector<int>> comps;
  int counter = 0;

  struct Frame {
    int v;
    std::size_t next;
  };
  std::vector<Frame> call;
  for (int root = 0; root < n; ++root) {
    if (index[root] >= 0) continue;
    call.push_back({root, 0});
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      const auto& succ = g.successors(f.v);
      if (f.next < succ.size()) {
        const int w = succ[f.next++];
        if (index[w] < 0) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      const int v = f.v;
      call.pop_back();
      if (!call.empty()) {
        low[call.back().v] = std::min(low[call.back().v], low[v]);
      }
      if (low[v] == index[v]) {
        std::vector<int> comp;
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp.push_back(w);
        } while (w != v);
        std::sort(comp.begin(), comp.end());
        comps.push_back(std::move(comp));
      }
    }
  }
  return comps;
}

bool is_acyclic(const DependencyGraph& g, const std::vector<bool>& keep) {
  const int n = g.size();
  std::vector<int> indegree(n, 0);
  for (int v = 0; v < n; ++v) {
    if (!keep[v]) continue;
    for (int w : g.successors(v)) {
      if (keep[w]) ++indegree[w];
    }
  }
  std::vector<int> ready;
  int alive = 0;
  for (int v = 0; v < n; ++v) {
    if (!keep[v]) continue;
    ++alive;
    if (indegree[v] == 0) ready.push_back(v);
  }
  int seen = 0;
  while (!ready.empty()) {
    const int v = ready.back();
    ready.pop_back();
    ++seen;
    for (int w : g.successors(v)) {
      if (keep[w] && --indegree[w] == 0) ready.push_back(w);
    }
  }
  return seen == alive;
}

namespace {

using Mask = std::uint64_t;

inline Mask bit(int v) { return Mask{1} << v; }

// Branch and bound over one strongly connected component, with vertices
// relabelled 0..k-1 in ascending global order. Vertices are decided in
// index order, removal first, so the first optimum found is the
// lexicographically smallest one.
class ComponentFvs {
 public:
  ComponentFvs(const DependencyGraph& g, const std::vector<int>& comp,
               const Deadline* deadline)
      : k_(static_cast<int>(comp.size())), deadline_(deadline) {
    if (k_ > 64) {
      throw std::length_error("feedback vertex set supports components of at "
                              "most 64 vertices");
    }
    std::vector<int> local(g.size(), -1);
    for (int i = 0; i < k_; ++i) local[comp[i]] = i;
    succ_.assign(k_, 0);
    weight_.resize(k_);
    for (int i = 0; i < k_; ++i) {
      weight_[i] = g.weight(comp[i]);
      for (int w : g.successors(comp[i])) {
        if (local[w] >= 0) succ_[i] |= bit(local[w]);
      }
    }
    double total = 0.0;
    for (double w : weight_) total += w;
    tol_ = 1e-12 * (1.0 + total);
  }

  Mask solve() {
    const Mask all = k_ == 64 ? ~Mask{0} : bit(k_) - 1;
    best_weight_ = std::numeric_limits<double>::infinity();
    best_ = all;
    search(0, 0, 0, 0.0, all);
    return best_;
  }

 private:
  Mask reach(Mask from, Mask alive) const {
    Mask seen = 0;
    Mask frontier = from & alive;
    while (frontier) {
      seen |= frontier;
      Mask next = 0;
      for (Mask f = frontier; f; f &= f - 1) next |= succ_[std::countr_zero(f)];
      frontier = next & alive & ~seen;
    }
    return seen;
  }

  bool on_cycle(int v, Mask alive) const {
    return (alive & bit(v)) && (reach(succ_[v], alive) & bit(v));
  }

  bool acyclic(Mask alive) const {
    while (alive) {
      Mask sinks = 0;
      for (Mask a = alive; a; a &= a - 1) {
        const int v = std::countr_zero(a);
        if (!(succ_[v] & alive)) sinks |= bit(v);
      }
      if (!sinks) return false;
      alive &= ~sinks;
    }
    return true;
  }

  // Shortest cycle through v inside `alive`, as a vertex mask (0 if none).
  Mask shortest_cycle(int v, Mask alive) const {
    std::vector<int> parent(k_, -1);
    std::vector<int> queue;
    Mask seen = 0;
    for (Mask s = succ_[v] & alive; s; s &= s - 1) {
      const int w = std::countr_zero(s);
      if (w == v) return bit(v);
      parent[w] = v;
      seen |= bit(w);
      queue.push_back(w);
    }
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const int u = queue[head];
      if (succ_[u] & bit(v)) {
        Mask cycle = bit(v);
        for (int x = u; x != v; x = parent[x]) cycle |= bit(x);
        return cycle;
      }
      for (Mask s = succ_[u] & alive & ~seen & ~bit(v); s; s &= s - 1) {
        const int w = std::countr_zero(s);
        parent[w] = u;
        seen |= bit(w);
        queue.push_back(w);
      }
    }
    return 0;
  }

  // Greedy packing of vertex-disjoint cycles; each needs its own removal.
  double lower_bound(Mask alive, Mask kept) const {
    double bound = 0.0;
    Mask rest = alive;
    for (int v = 0; v < k_; ++v) {
      if (!(rest & bit(v)) || !on_cycle(v, rest)) continue;
      const Mask cycle = shortest_cycle(v, rest);
      double cheapest = std::numeric_limits<double>::infinity();
      for (Mask c = cycle & ~kept; c; c &= c - 1) {
        cheapest = std::min(cheapest, weight_[std::countr_zero(c)]);
      }
      bound += cheapest;
      rest &= ~cycle;
    }
    return bound;
  }

  void search(int v, Mask removed, Mask kept, double weight, Mask all) {
    if (deadline_ && (++nodes_ & 255) == 0) deadline_->check();
    const Mask alive = all & ~removed;
    if (acyclic(alive)) {
      if (weight < best_weight_ - tol_) {
        best_weight_ = weight;
        best_ = removed;
      }
      return;
    }
    if (weight + lower_bound(alive, kept) >= best_weight_ - tol_) return;

    // Vertices off every remaining cycle never need removal.
    while (v < k_ && !on_cycle(v, alive)) {
      kept |= bit(v);
      ++v;
    }
    if (v == k_) return;

    search(v + 1, removed | bit(v), kept, weight + weight_[v], all);
    const Mask keep_v = kept | bit(v);
    if (acyclic(keep_v)) search(v + 1, removed, keep_v, weight, all);
  }

  int k_;
  const Deadline* deadline_;
  std::vector<Mask> succ_;
  std::vector<double> weight_;
  double tol_ = 0.0;
  double best_weight_ = 0.0;
  Mask best_ = 0;
  std::uint64_t nodes_ = 0;
};

}  // namespace

std::vector<int> min_weight_fvs(const DependencyGraph& g,
                                const Deadline* deadline) {
  std::vector<int> result;
  for (const auto& comp : strongly_connected_components(g)) {
    if (comp.size() < 2) continue;  // no self-arcs, so singletons are acyclic
    ComponentFvs solver(g, comp, deadline);
    const Mask chosen = solver.solve();
    for (Mask c = chosen; c; c &= c - 1) {
      result.push_back(comp[std::countr_zero(c)]);
    }
  }
  std::sort(result.begin(), result.end());
  return result;
}

double total_weight(const DependencyGraph& g, const std::vector<int>& vertices) {
  double sum = 0.0;
  for (int v : vertices) sum += g.weight(v);
  return sum;
}

std::string to_dot(const DependencyGraph& g) {
  std::ostringstream out;
  out << "digraph dependencies {\n";
  for (int v = 0; v < g.size(); ++v) {
    out << "  " << v << " [label=\"" << v << ':' << g.weight(v) << "\"];\n";
  }
  for (int v = 0; v < g.size(); ++v) {
    for (int w : g.successors(v)) out << "  " << v << " -> " << w << ";\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace rearrange
