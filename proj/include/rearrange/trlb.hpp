#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rearrange/deadline.hpp"
#include "rearrange/depgraph.hpp"
#include "rearrange/instance.hpp"

namespace rearrange {

enum class PrimitiveKind { kToGoal, kToBuffer };

/// Symbolic move: which object goes where, before any buffer pose exists.
struct PrimitiveAction {
  int object = 0;
  PrimitiveKind kind = PrimitiveKind::kToGoal;

  friend bool operator==(const PrimitiveAction&, const PrimitiveAction&) = default;
};

struct PrimitivePlan {
  std::vector<PrimitiveAction> actions;
  /// Total buffer weight (total-buffer planners) or peak concurrent buffer
  /// budget (running-buffer planners).
  double metric = 0.0;
};

/// True if every object gets exactly one to-goal action, buffering happens
/// at most once and only from the start pose, and no object heads to its goal
/// while something it depends on still sits at its start pose.
bool is_consistent(const PrimitivePlan& pp, const DependencyGraph& g);

/// Sends a minimum-weight feedback vertex set to buffers. Buffering happens
/// only when no to-goal move is available; ties go to the lowest index.
PrimitivePlan primitive_plan_etbm(const DependencyGraph& g,
                                  const Deadline* deadline = nullptr);

/// Integer buffer sizes used by the running-buffer planner:
/// max(1, round(w * resolution / mean(w))).
std::vector<int> integerize_weights(const WeightVector& w, int resolution);

/// Minimizes the peak total integerized weight held in buffers. Budgets are
/// tried in increasing order with a memoized depth-first search per
/// strongly connected component; the metric is the smallest feasible budget.
PrimitivePlan primitive_plan_erbm(const DependencyGraph& g, int resolution = 4,
                                  const Deadline* deadline = nullptr);

/// Bound actions from some arrangement, and where they lead.
struct PartialPlan {
  std::vector<Action> actions;
  Arrangement reached;
};

inline constexpr int kBufferSamplesPerAction = 500;
inline constexpr int kBufferBindingAttempts = 10;

struct AllocationResult {
  bool success = false;
  RearrangementPlan plan;
  /// Index into the primitive plan of the action that could not be bound.
  std::size_t failed_action = 0;
  /// Longest valid prefix over all binding attempts.
  PartialPlan partial;
};

/// kStrict binds a buffer only where it clears every goal in its occupancy
/// window. kRelaxed falls back to the free pose that stays clear the longest,
/// and stops the prefix at the first placement that is then blocked.
enum class BufferPolicy { kStrict, kRelaxed };

/// Binds every to-buffer action to a sampled pose that is clear of the
/// current arrangement and of the goal poses of objects placed while the
/// buffer is occupied. To-goal moves for objects already at their goal are
/// dropped. The partial plan on failure is the attempt that placed the most
/// objects at their targets, then the shortest.
AllocationResult allocate_buffers(const Instance& inst, const PrimitivePlan& pp,
                                  std::uint64_t seed,
                                  const Deadline* deadline = nullptr,
                                  BufferPolicy policy = BufferPolicy::kStrict);

enum class TrlbMode { kEtbm, kErbm, kTbm, kRbm };

const char* to_string(TrlbMode mode);

struct TrlbOptions {
  Objective objective = Objective::kPickPlace;
  TrlbMode mode = TrlbMode::kErbm;
  std::uint64_t seed = 0;
  /// Seconds; non-positive means unlimited.
  double time_budget = 0.0;
  int erbm_resolution = 4;
  int max_bidirectional_iterations = 100000;
  /// Cap per search tree; the oldest non-root node is evicted beyond it.
  std::size_t frontier_cap = 50;
};

struct TrlbResult {
  bool success = false;
  RearrangementPlan plan;
  std::string failure;
  /// Furthest forward progress when planning fails.
  PartialPlan best_partial;
  double primitive_metric = 0.0;
  int bidirectional_iterations = 0;
};

/// Weights the planner would use: collision probability (PP) or task
/// impedance (TI) for the weighted modes, uniform for the baselines. Falls
/// back to uniform when the workspace is too small for collision weights.
WeightVector planner_weights(const Instance& inst, Objective objective,
                             bool weighted);

/// Dependency graph, primitive plan, buffer allocation; when allocation fails,
/// a bidirectional search joins partial plans grown from both ends.
TrlbResult plan_trlb(const Instance& inst, const TrlbOptions& options);

}  // namespace rearrange
