#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rearrange/instance.hpp"
#include "rearrange/rng.hpp"

namespace rearrange {

/// A tree edge: the pick-n-place plus the object whose goal it serves. For a
/// relocation that is the blocked object, not the one being moved.
struct MctsAction {
  Action action;
  int beneficiary = 0;

  friend bool operator==(const MctsAction&, const MctsAction&) = default;
};

inline constexpr int kRelocationSamples = 100;

/// Moves available from `state`. Objects already at their goal contribute
/// nothing. An object whose goal is clear gets a to-goal move; otherwise each
/// object overlapping that goal gets a relocation to a sampled pose that is
/// clear of the scene and of the blocked goal. A relocation with no
/// collision-free sample is left out.
std::vector<MctsAction> legal_actions(const Instance& inst, const Scene& state,
                                      Rng& rng);
std::vector<MctsAction> legal_actions(const Instance& inst,
                                      const Arrangement& state, Rng& rng);

/// Objects at goal (PP) or their summed task-impedance weight (TI).
double reward(const Arrangement& state, const Instance& inst,
              const WeightVector& ti_weights, Objective objective);

struct SearchNode {
  Arrangement state;
  /// Visits n(s); the node's own expansion counts as one.
  std::uint64_t visits = 0;
  /// Accumulated backed-up value w(s).
  double value = 0.0;
  bool expanded = false;
  std::vector<MctsAction> actions;
  /// Parallel to `actions`; null until the edge is first taken.
  std::vector<std::unique_ptr<SearchNode>> children;
};

enum class MctsMode { kMcts, kEmcts };

const char* to_string(MctsMode mode);

struct MctsConfig {
  MctsMode mode = MctsMode::kEmcts;
  Objective objective = Objective::kPickPlace;
  double exploration = 1.0;
  std::uint64_t max_iterations = 1000000;
  /// Seconds; non-positive means unlimited.
  double time_budget = 0.0;
  /// Rollout length cap; 0 means twice the object count.
  int rollout_depth = 0;
  std::uint64_t seed = 0;
};

/// Per-arm exploration constant: C for the baseline, C (1 + w_i / sum w)
/// when weighted.
double exploration_constant(double c, std::span<const double> weights,
                            int beneficiary, bool weighted);

/// Upper-confidence choice among the node's edges: mean child value plus
/// C_i sqrt(2 ln n(s) / n(child)). Unvisited edges win outright, lowest
/// beneficiary (then edge order) first. Returns -1 if the node has no edges.
int ucb_select(const SearchNode& node, std::span<const double> weights,
               double c, bool weighted);

struct MctsResult {
  bool success = false;
  RearrangementPlan plan;
  std::string failure;
  std::uint64_t iterations = 0;
  /// Highest-reward arrangement seen when the search fails.
  Arrangement best_state;
  double best_reward = 0.0;
};

/// UCT search over arrangements: select, expand, random rollout, back up the
/// best reward seen along the way, normalized by the goal reward. Stops at
/// the first trajectory that reaches the goal.
class MctsPlanner {
 public:
  /// Throws std::invalid_argument for a non-positive exploration constant.
  MctsPlanner(const Instance& inst, MctsConfig config);

  MctsResult run();
  /// Valid after run().
  const SearchNode& root() const { return *root_; }

 private:
  double score(const Arrangement& state) const;
  void note(MctsResult& result, const Arrangement& state, double r) const;
  std::optional<std::vector<Action>> iterate(MctsResult& result);

  const Instance& inst_;
  MctsConfig config_;
  Rng rng_;
  std::vector<PlacedShape> goal_shapes_;
  WeightVector ti_weights_;
  WeightVector select_weights_;
  bool weighted_ = false;
  Objective reward_objective_ = Objective::kPickPlace;
  double max_reward_ = 1.0;
  int rollout_depth_ = 0;
  std::unique_ptr<SearchNode> root_;
};

MctsResult search_mcts(const Instance& inst, const MctsConfig& config);

}  // namespace rearrange
