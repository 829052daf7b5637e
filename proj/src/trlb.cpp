#include "rearrange/trlb.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "rearrange/rng.hpp"

namespace rearrange {

namespace {

enum class Where { kStart, kBuffer, kGoal };

}  // namespace

bool is_consistent(const PrimitivePlan& pp, const DependencyGraph& g) {
  const int n = g.size();
  std::vector<Where> where(n, Where::kStart);
  for (const PrimitiveAction& a : pp.actions) {
    if (a.object < 0 || a.object >= n || where[a.object] == Where::kGoal) {
      return false;
    }
    if (a.kind == PrimitiveKind::kToBuffer) {
      if (where[a.object] != Where::kStart) return false;
      where[a.object] = Where::kBuffer;
      continue;
    }
    for (int dep : g.successors(a.object)) {
      if (where[dep] == Where::kStart) return false;
    }
    where[a.object] = Where::kGoal;
  }
  return std::all_of(where.begin(), where.end(),
                     [](Where w) { return w == Where::kGoal; });
}

PrimitivePlan primitive_plan_etbm(const DependencyGraph& g,
                                  const Deadline* deadline) {
  const int n = g.size();
  const std::vector<int> fvs = min_weight_fvs(g, deadline);
  std::vector<bool> in_fvs(n, false);
  for (int v : fvs) in_fvs[v] = true;

  // Reverse arcs: who is waiting on v to leave its start pose.
  std::vector<std::vector<int>> waiting(n);
  for (int v = 0; v < n; ++v) {
    for (int w : g.successors(v)) waiting[w].push_back(v);
  }

  PrimitivePlan pp;
  std::vector<Where> where(n, Where::kStart);
  int done = 0;
  auto ready = [&](int v) {
    if (where[v] == Where::kGoal) return false;
    for (int dep : g.successors(v)) {
      if (where[dep] == Where::kStart) return false;
    }
    return true;
  };
  while (done < n) {
    int next = -1;
    for (int v = 0; v < n && next < 0; ++v) {
      if (ready(v)) next = v;
    }
    if (next >= 0) {
      pp.actions.push_back({next, PrimitiveKind::kToGoal});
      where[next] = Where::kGoal;
      ++done;
      continue;
    }
    // Stuck: buffer the first feedback vertex that someone is waiting on.
    int victim = -1;
    for (int v = 0; v < n && victim < 0; ++v) {
      if (!in_fvs[v] || where[v] != Where::kStart) continue;
      for (int u : waiting[v]) {
        if (where[u] != Where::kGoal) {
          victim = v;
          break;
        }
      }
    }
    if (victim < 0) {
      throw std::logic_error("feedback vertex set does not break every cycle");
    }
    pp.actions.push_back({victim, PrimitiveKind::kToBuffer});
    where[victim] = Where::kBuffer;
    pp.metric += g.weight(victim);
  }
  return pp;
}

std::vector<int> integerize_weights(const WeightVector& w, int resolution) {
  if (resolution < 1) throw std::invalid_argument("resolution must be >= 1");
  std::vector<int> out(w.size(), 1);
  if (w.empty()) return out;
  const double mean = std::accumulate(w.begin(), w.end(), 0.0) / w.size();
  if (!(mean > 0.0)) return out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    out[i] = std::max(1, static_cast<int>(std::lround(w[i] * resolution / mean)));
  }
  return out;
}

namespace {

using Mask = std::uint64_t;

inline Mask bit(int v) { return Mask{1} << v; }

struct PairHash {
  std::size_t operator()(const std::pair<Mask, Mask>& p) const {
    return std::hash<Mask>()(p.first * 0x9e3779b97f4a7c15ULL ^ p.second);
  }
};

// Memoized depth-first search for one strongly connected component at a
// fixed running-buffer budget. To-goal moves never hurt, so they are applied
// eagerly and only the choice of which object to buffer branches.
class RunningBufferSearch {
 public:
  RunningBufferSearch(const DependencyGraph& g, const std::vector<int>& comp,
                      const std::vector<int>& sizes, const Deadline* deadline)
      : comp_(comp), deadline_(deadline) {
    const int k = static_cast<int>(comp.size());
    if (k > 64) {
      throw std::length_error("running-buffer search supports components of "
                              "at most 64 vertices");
    }
    std::vector<int> local(g.size(), -1);
    for (int i = 0; i < k; ++i) local[comp[i]] = i;
    deps_.assign(k, 0);
    size_.resize(k);
    for (int i = 0; i < k; ++i) {
      size_[i] = sizes[comp[i]];
      for (int w : g.successors(comp[i])) {
        if (local[w] >= 0) deps_[i] |= bit(local[w]);
      }
    }
    all_ = k == 64 ? ~Mask{0} : bit(k) - 1;
  }

  bool run(int budget, std::vector<PrimitiveAction>& out) {
    budget_ = budget;
    failed_.clear();
    trail_.clear();
    if (!dfs(0, 0, 0)) return false;
    out.insert(out.end(), trail_.begin(), trail_.end());
    return true;
  }

 private:
  bool dfs(Mask goal, Mask buffer, int load) {
    if (deadline_ && (++nodes_ & 1023) == 0) deadline_->check();
    const std::size_t mark = trail_.size();
    for (bool moved = true; moved;) {
      moved = false;
      const Mask start = all_ & ~goal & ~buffer;
      for (Mask c = (start | buffer); c; c &= c - 1) {
        const int v = std::countr_zero(c);
        if (deps_[v] & start & ~bit(v)) continue;
        trail_.push_back({comp_[v], PrimitiveKind::kToGoal});
        if (buffer & bit(v)) {
          buffer &= ~bit(v);
          load -= size_[v];
        }
        goal |= bit(v);
        moved = true;
        break;
      }
    }
    if (goal == all_) return true;
    if (!failed_.insert({goal, buffer}).second) {
      trail_.resize(mark);
      return false;
    }
    const Mask start = all_ & ~goal & ~buffer;
    for (Mask c = start; c; c &= c - 1) {
      const int v = std::countr_zero(c);
      if (load + size_[v] > budget_) continue;
      trail_.push_back({comp_[v], PrimitiveKind::kToBuffer});
      if (dfs(goal, buffer | bit(v), load + size_[v])) return true;
      trail_.pop_back();
    }
    trail_.resize(mark);
    return false;
  }

  const std::vector<int>& comp_;
  const Deadline* deadline_;
  std::vector<Mask> deps_;
  std::vector<int> size_;
  Mask all_ = 0;
  int budget_ = 0;
  std::unordered_set<std::pair<Mask, Mask>, PairHash> failed_;
  std::vector<PrimitiveAction> trail_;
  std::uint64_t nodes_ = 0;
};

}  // namespace

PrimitivePlan primitive_plan_erbm(const DependencyGraph& g, int resolution,
                                  const Deadline* deadline) {
  const std::vector<int> sizes = integerize_weights(g.weights(), resolution);
  PrimitivePlan pp;
  int peak = 0;
  for (const auto& comp : strongly_connected_components(g)) {
    if (comp.size() == 1) {
      pp.actions.push_back({comp[0], PrimitiveKind::kToGoal});
      continue;
    }
    int budget = sizes[comp[0]];
    for (int v : comp) budget = std::min(budget, sizes[v]);
    RunningBufferSearch search(g, comp, sizes, deadline);
    while (!search.run(budget, pp.actions)) ++budget;
    peak = std::max(peak, budget);
  }
  pp.metric = peak;
  return pp;
}

AllocationResult allocate_buffers(const Instance& inst, const PrimitivePlan& pp,
                                  std::uint64_t seed, const Deadline* deadline,
                                  BufferPolicy policy) {
  const int n = static_cast<int>(inst.size());
  const std::size_t m = pp.actions.size();
  std::vector<PlacedShape> goal_shapes;
  goal_shapes.reserve(n);
  for (int i = 0; i < n; ++i) {
    goal_shapes.push_back(place(inst.objects[i].footprint, inst.goal[i]));
  }

  // For each to-buffer action, the objects that reach their goal while the
  // buffer is occupied, in plan order.
  std::vector<std::vector<int>> window(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (pp.actions[i].kind != PrimitiveKind::kToBuffer) continue;
    const int obj = pp.actions[i].object;
    for (std::size_t j = i + 1; j < m && pp.actions[j].object != obj; ++j) {
      if (pp.actions[j].kind == PrimitiveKind::kToGoal) {
        window[i].push_back(pp.actions[j].object);
      }
    }
  }

  auto placed = [&](const Scene& scene) {
    int count = 0;
    for (int i = 0; i < n; ++i) {
      count += poses_close(scene.pose(i), inst.goal[i], kPoseTol);
    }
    return count;
  };

  AllocationResult result;
  result.partial.reached = inst.start;
  int best_placed = -1;
  for (int attempt = 0; attempt < kBufferBindingAttempts; ++attempt) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
    Scene scene(inst, inst.start);
    RearrangementPlan plan;

    // Samples a buffer for `obj` clear of the scene and of `avoid`, which must
    // stay clear in order. Strict binding needs all of them clear.
    auto bind = [&](int obj, const std::vector<int>& win,
                    const PlacedShape* avoid) -> bool {
      const Footprint& fp = inst.objects[obj].footprint;
      std::optional<Pose> chosen;
      std::optional<PlacedShape> chosen_shape;
      std::size_t chosen_reach = 0, chosen_blocked = 0;
      for (int s = 0; s < kBufferSamplesPerAction; ++s) {
        std::optional<Pose> pose = sample_pose(fp, inst.workspace, rng);
        if (!pose) continue;
        PlacedShape shape = place(fp, *pose);
        if (!scene.is_free(obj, shape)) continue;
        if (avoid && collide(shape, *avoid)) continue;
        std::size_t reach = 0;
        while (reach < win.size() &&
               (win[reach] == obj || !collide(shape, goal_shapes[win[reach]]))) {
          ++reach;
        }
        if (reach == win.size()) {
          chosen = pose;
          chosen_shape = std::move(shape);
          break;
        }
        if (policy != BufferPolicy::kRelaxed) continue;
        std::size_t blocked = 0;
        for (std::size_t k = reach; k < win.size(); ++k) {
          blocked += win[k] != obj && collide(shape, goal_shapes[win[k]]);
        }
        if (!chosen || reach > chosen_reach ||
            (reach == chosen_reach && blocked < chosen_blocked)) {
          chosen = pose;
          chosen_shape = std::move(shape);
          chosen_reach = reach;
          chosen_blocked = blocked;
        }
      }
      if (!chosen) return false;
      plan.actions.push_back({obj, *chosen, ActionTag::kToBuffer});
      scene.move(obj, *chosen, std::move(*chosen_shape));
      return true;
    };

    std::size_t i = 0;
    for (; i < m; ++i) {
      if (deadline) deadline->check();
      const PrimitiveAction& pa = pp.actions[i];
      const int obj = pa.object;
      if (pa.kind == PrimitiveKind::kToBuffer) {
        if (!bind(obj, window[i], nullptr)) break;
        continue;
      }
      if (poses_close(scene.pose(obj), inst.goal[obj], kPoseTol)) continue;
      if (!scene.is_free(obj, goal_shapes[obj]) && policy == BufferPolicy::kRelaxed) {
        // A relaxed buffer is in the way: shift it to another buffer that
        // clears this goal and as many of the following ones as possible.
        bool cleared = true;
        for (int blocker : scene.overlaps(goal_shapes[obj], obj)) {
          if (scene.is_free(blocker, goal_shapes[blocker]) &&
              !collide(goal_shapes[blocker], goal_shapes[obj])) {
            plan.actions.push_back({blocker, inst.goal[blocker], ActionTag::kToGoal});
            scene.move(blocker, inst.goal[blocker], goal_shapes[blocker]);
            continue;
          }
          std::vector<int> win;
          for (std::size_t j = i; j < m && pp.actions[j].object != blocker; ++j) {
            if (pp.actions[j].kind == PrimitiveKind::kToGoal) {
              win.push_back(pp.actions[j].object);
            }
          }
          if (!bind(blocker, win, &goal_shapes[obj])) {
            cleared = false;
            break;
          }
        }
        if (!cleared) break;
      }
      if (!scene.is_free(obj, goal_shapes[obj])) break;
      plan.actions.push_back({obj, inst.goal[obj], ActionTag::kToGoal});
      scene.move(obj, inst.goal[obj], goal_shapes[obj]);
    }
    if (i == m) {
      result.success = true;
      result.plan = std::move(plan);
      result.partial = {result.plan.actions, scene.poses()};
      return result;
    }
    const int progress = placed(scene);
    if (progress > best_placed ||
        (progress == best_placed &&
         plan.actions.size() < result.partial.actions.size())) {
      best_placed = progress;
      result.failed_action = i;
      result.partial = {std::move(plan.actions), scene.poses()};
    }
  }
  return result;
}

const char* to_string(TrlbMode mode) {
  switch (mode) {
    case TrlbMode::kEtbm: return "ETBM";
    case TrlbMode::kErbm: return "ERBM";
    case TrlbMode::kTbm: return "TBM";
    case TrlbMode::kRbm: return "RBM";
  }
  return "?";
}

WeightVector planner_weights(const Instance& inst, Objective objective,
                             bool weighted) {
  if (!weighted) return uniform_weights(inst.size());
  if (objective == Objective::kTaskImpedance) return heti_weights(inst.objects);
  try {
    return hecp_weights(inst.objects, inst.workspace);
  } catch (const std::domain_error&) {
    // The mean disc does not fit, so every object is equally in the way.
    return uniform_weights(inst.size());
  }
}

namespace {

bool is_weighted(TrlbMode mode) {
  return mode == TrlbMode::kEtbm || mode == TrlbMode::kErbm;
}

bool is_total_buffer(TrlbMode mode) {
  return mode == TrlbMode::kEtbm || mode == TrlbMode::kTbm;
}

struct TreeNode {
  Arrangement arrangement;
  /// Forward tree: actions from the start. Backward tree: actions into the goal.
  std::vector<Action> actions;
};

// Undoes `actions` replayed from `from`: the result leads from the reached
// arrangement back to `from`.
std::vector<Action> reversed(const Arrangement& from,
                             const std::vector<Action>& actions) {
  Arrangement current = from;
  std::vector<Action> undo;
  undo.reserve(actions.size());
  for (const Action& a : actions) {
    undo.push_back({a.object, current[a.object], ActionTag::kToBuffer});
    current[a.object] = a.target;
  }
  std::reverse(undo.begin(), undo.end());
  return undo;
}

std::size_t goals_reached(const Instance& inst, const Arrangement& arr) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (at_goal(inst, static_cast<int>(i), arr[i])) ++count;
  }
  return count;
}

void push_capped(std::deque<TreeNode>& tree, TreeNode node, std::size_t cap) {
  tree.push_back(std::move(node));
  // Index 0 is the root and stays.
  while (tree.size() > std::max<std::size_t>(cap, 2)) tree.erase(tree.begin() + 1);
}

class TrlbPlanner {
 public:
  TrlbPlanner(const Instance& inst, const TrlbOptions& options)
      : inst_(inst),
        options_(options),
        weights_(planner_weights(inst, options.objective,
                                 is_weighted(options.mode))) {
    if (options.time_budget > 0.0) deadline_ = Deadline::after(options.time_budget);
  }

  TrlbResult run() {
    TrlbResult result;
    result.best_partial = {{}, inst_.start};
    try {
      plan(result);
    } catch (const TimeoutError&) {
      result.success = false;
      result.failure = "timeout";
    }
    return result;
  }

 private:
  PrimitivePlan primitive(const DependencyGraph& g) const {
    return is_total_buffer(options_.mode)
               ? primitive_plan_etbm(g, &deadline_)
               : primitive_plan_erbm(g, options_.erbm_resolution, &deadline_);
  }

  // Two-step pipeline between two arrangements.
  // With `shuffle`, vertices are relabelled at random before the primitive
  // plan is computed, so ties among equally good plans break differently.
  AllocationResult attempt(const Arrangement& from, const Arrangement& to,
                           std::uint64_t seed, BufferPolicy policy,
                           bool shuffle, double* metric = nullptr) const {
    Instance sub{inst_.workspace, inst_.objects, from, to, inst_.seed};
    const DependencyGraph g = build_dependency_graph(sub, weights_);
    PrimitivePlan pp;
    if (shuffle) {
      const int n = g.size();
      std::vector<int> label(n);
      std::iota(label.begin(), label.end(), 0);
      Rng rng(derive_seed(seed, 0x5eedULL));
      for (int i = n - 1; i > 0; --i) {
        std::swap(label[i], label[rng.below(static_cast<std::uint64_t>(i) + 1)]);
      }
      // label[k] is the object behind relabelled vertex k.
      std::vector<int> vertex(n);
      WeightVector w(n);
      for (int k = 0; k < n; ++k) {
        vertex[label[k]] = k;
        w[k] = g.weight(label[k]);
      }
      DependencyGraph h(std::move(w));
      for (int u = 0; u < n; ++u) {
        for (int v : g.successors(u)) h.add_arc(vertex[u], vertex[v]);
      }
      pp = primitive(h);
      for (PrimitiveAction& a : pp.actions) a.object = label[a.object];
    } else {
      pp = primitive(g);
    }
    if (metric) *metric = pp.metric;
    return allocate_buffers(sub, pp, seed, &deadline_, policy);
  }

  bool finish(TrlbResult& result, std::vector<Action> actions) const {
    RearrangementPlan plan{std::move(actions)};
    retag_actions(plan, inst_);
    plan = strip_noop_actions(plan, inst_);
    if (!validate_plan(plan, inst_).valid) return false;
    result.success = true;
    result.plan = std::move(plan);
    result.best_partial = {result.plan.actions, inst_.goal};
    return true;
  }

  void note_progress(TrlbResult& result, const TreeNode& node) const {
    if (goals_reached(inst_, node.arrangement) >
        goals_reached(inst_, result.best_partial.reached)) {
      result.best_partial = {node.actions, node.arrangement};
    }
  }

  void plan(TrlbResult& result) {
    AllocationResult first = attempt(inst_.start, inst_.goal, options_.seed,
                                     BufferPolicy::kStrict, false,
                                     &result.primitive_metric);
    if (first.success && finish(result, std::move(first.plan.actions))) return;

    // The trees grow from relaxed partial plans, which keep moving past a
    // buffer that cannot clear its whole window.
    first = attempt(inst_.start, inst_.goal, options_.seed, BufferPolicy::kRelaxed,
                    false);
    if (first.success && finish(result, std::move(first.plan.actions))) return;

    std::deque<TreeNode> forward{{inst_.start, {}}};
    std::deque<TreeNode> backward{{inst_.goal, {}}};
    if (!first.partial.actions.empty()) {
      TreeNode node{first.partial.reached, first.partial.actions};
      note_progress(result, node);
      push_capped(forward, std::move(node), options_.frontier_cap);
    }

    Rng rng(derive_seed(options_.seed, 0xb1d1ULL));
    for (int iter = 0; iter < options_.max_bidirectional_iterations; ++iter) {
      deadline_.check();
      result.bidirectional_iterations = iter + 1;
      const TreeNode f = forward[rng.below(forward.size())];
      const TreeNode b = backward[rng.below(backward.size())];

      AllocationResult ahead = attempt(f.arrangement, b.arrangement,
                                       derive_seed(options_.seed, iter, 1),
                                       BufferPolicy::kRelaxed, true);
      if (ahead.success) {
        std::vector<Action> all = f.actions;
        all.insert(all.end(), ahead.plan.actions.begin(), ahead.plan.actions.end());
        all.insert(all.end(), b.actions.begin(), b.actions.end());
        if (finish(result, std::move(all))) return;
      } else if (!ahead.partial.actions.empty()) {
        TreeNode node{ahead.partial.reached, f.actions};
        node.actions.insert(node.actions.end(), ahead.partial.actions.begin(),
                            ahead.partial.actions.end());
        note_progress(result, node);
        push_capped(forward, std::move(node), options_.frontier_cap);
      }

      // Grow the backward tree by planning from its node toward the forward
      // node and reversing what was achieved.
      AllocationResult behind = attempt(b.arrangement, f.arrangement,
                                        derive_seed(options_.seed, iter, 2),
                                        BufferPolicy::kRelaxed, true);
      if (behind.success) {
        std::vector<Action> all = f.actions;
        const std::vector<Action> undo =
            reversed(b.arrangement, behind.plan.actions);
        all.insert(all.end(), undo.begin(), undo.end());
        all.insert(all.end(), b.actions.begin(), b.actions.end());
        if (finish(result, std::move(all))) return;
      } else if (!behind.partial.actions.empty()) {
        TreeNode node{behind.partial.reached,
                      reversed(b.arrangement, behind.partial.actions)};
        node.actions.insert(node.actions.end(), b.actions.begin(), b.actions.end());
        push_capped(backward, std::move(node), options_.frontier_cap);
      }
    }
    result.failure = "bidirectional search exhausted its iteration budget";
  }

  const Instance& inst_;
  const TrlbOptions& options_;
  WeightVector weights_;
  Deadline deadline_;
};

}  // namespace

TrlbResult plan_trlb(const Instance& inst, const TrlbOptions& options) {
  return TrlbPlanner(inst, options).run();
}

}  // namespace rearrange
