#include "rearrange/mcts.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "rearrange/deadline.hpp"

namespace rearrange {

namespace {

std::vector<PlacedShape> goal_shapes_of(const Instance& inst) {
  std::vector<PlacedShape> shapes;
  shapes.reserve(inst.size());
  for (std::size_t i = 0; i < inst.size(); ++i) {
    shapes.push_back(place(inst.objects[i].footprint, inst.goal[i]));
  }
  return shapes;
}

std::vector<MctsAction> legal_actions_impl(
    const Instance& inst, const std::vector<PlacedShape>& goal_shapes,
    const Scene& state, Rng& rng) {
  std::vector<MctsAction> out;
  const int n = static_cast<int>(inst.size());
  for (int i = 0; i < n; ++i) {
    if (at_goal(inst, i, state.pose(i))) continue;
    const std::vector<int> blockers = state.overlaps(goal_shapes[i], i);
    if (blockers.empty()) {
      // The goal is inside the workspace by instance feasibility.
      out.push_back({{i, inst.goal[i], ActionTag::kToGoal}, i});
      continue;
    }
    for (int j : blockers) {
      const Footprint& fp = inst.objects[j].footprint;
      for (int s = 0; s < kRelocationSamples; ++s) {
        std::optional<Pose> pose = sample_pose(fp, inst.workspace, rng);
        if (!pose) continue;
        const PlacedShape shape = place(fp, *pose);
        if (collide(shape, goal_shapes[i]) || !state.is_free(j, shape)) continue;
        out.push_back({{j, *pose, ActionTag::kToBuffer}, i});
        break;
      }
    }
  }
  return out;
}

bool all_at_goal(const Instance& inst, const Arrangement& state) {
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (!at_goal(inst, static_cast<int>(i), state[i])) return false;
  }
  return true;
}

}  // namespace

std::vector<MctsAction> legal_actions(const Instance& inst, const Scene& state,
                                      Rng& rng) {
  return legal_actions_impl(inst, goal_shapes_of(inst), state, rng);
}

std::vector<MctsAction> legal_actions(const Instance& inst,
                                      const Arrangement& state, Rng& rng) {
  return legal_actions(inst, Scene(inst, state), rng);
}

double reward(const Arrangement& state, const Instance& inst,
              const WeightVector& ti_weights, Objective objective) {
  double r = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (!at_goal(inst, static_cast<int>(i), state[i])) continue;
    r += objective == Objective::kPickPlace ? 1.0 : ti_weights[i];
  }
  return r;
}

const char* to_string(MctsMode mode) {
  return mode == MctsMode::kMcts ? "MCTS" : "EMCTS";
}

double exploration_constant(double c, std::span<const double> weights,
                            int beneficiary, bool weighted) {
  if (!weighted) return c;
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) return c;
  return c * (1.0 + weights[beneficiary] / total);
}

int ucb_select(const SearchNode& node, std::span<const double> weights, double c,
               bool weighted) {
  const int m = static_cast<int>(node.actions.size());
  if (m == 0) return -1;
  int unvisited = -1;
  for (int a = 0; a < m; ++a) {
    const SearchNode* child = node.children[a].get();
    if (child && child->visits > 0) continue;
    if (unvisited < 0 ||
        node.actions[a].beneficiary < node.actions[unvisited].beneficiary) {
      unvisited = a;
    }
  }
  if (unvisited >= 0) return unvisited;

  const double log_n = std::log(static_cast<double>(node.visits));
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < m; ++a) {
    const SearchNode& child = *node.children[a];
    const double visits = static_cast<double>(child.visits);
    const double ci =
        exploration_constant(c, weights, node.actions[a].beneficiary, weighted);
    const double score = child.value / visits + ci * std::sqrt(2.0 * log_n / visits);
    if (score > best_score) {
      best_score = score;
      best = a;
    }
  }
  return best;
}

MctsPlanner::MctsPlanner(const Instance& inst, MctsConfig config)
    : inst_(inst),
      config_(config),
      rng_(config.seed),
      goal_shapes_(goal_shapes_of(inst)),
      ti_weights_(heti_weights(inst.objects)) {
  if (!(config.exploration > 0.0)) {
    throw std::invalid_argument("exploration constant must be positive");
  }
  const bool emcts = config.mode == MctsMode::kEmcts;
  weighted_ = emcts && config.objective == Objective::kPickPlace;
  select_weights_ = uniform_weights(inst.size());
  if (weighted_) {
    try {
      select_weights_ = hecp_weights(inst.objects, inst.workspace);
    } catch (const std::domain_error&) {
      // Mean disc too large for the table; uniform weights scale C alike.
    }
  }
  // The baseline counts objects at goal whatever the objective.
  reward_objective_ = emcts ? config.objective : Objective::kPickPlace;
  max_reward_ = reward(inst.goal, inst, ti_weights_, reward_objective_);
  if (!(max_reward_ > 0.0)) {
    reward_objective_ = Objective::kPickPlace;
    max_reward_ = static_cast<double>(inst.size());
  }
  rollout_depth_ = config.rollout_depth > 0 ? config.rollout_depth
                                            : 2 * static_cast<int>(inst.size());
}

MctsResult MctsPlanner::run() {
  Deadline deadline;
  if (config_.time_budget > 0.0) deadline = Deadline::after(config_.time_budget);
  MctsResult result;
  root_ = std::make_unique<SearchNode>();
  root_->state = inst_.start;
  result.best_state = inst_.start;
  result.best_reward = score(inst_.start);
  if (all_at_goal(inst_, inst_.start)) {
    result.success = true;
    return result;
  }
  for (std::uint64_t it = 0; it < config_.max_iterations; ++it) {
    if (deadline.expired()) {
      result.failure = "timeout";
      return result;
    }
    result.iterations = it + 1;
    if (std::optional<std::vector<Action>> found = iterate(result)) {
      RearrangementPlan plan{std::move(*found)};
      retag_actions(plan, inst_);
      plan = strip_noop_actions(plan, inst_);
      const PlanCheck check = validate_plan(plan, inst_);
      if (!check.valid) {
        result.failure = "internal error: " + check.message;
        return result;
      }
      result.success = true;
      result.plan = std::move(plan);
      result.best_state = inst_.goal;
      result.best_reward = score(inst_.goal);
      return result;
    }
  }
  result.failure = "iteration budget exhausted";
  return result;
}

double MctsPlanner::score(const Arrangement& state) const {
  return reward(state, inst_, ti_weights_, reward_objective_);
}

void MctsPlanner::note(MctsResult& result, const Arrangement& state,
                       double r) const {
  if (r > result.best_reward) {
    result.best_reward = r;
    result.best_state = state;
  }
}

// One select / expand / rollout / backup pass. Returns the action sequence if
// the goal was reached.
std::optional<std::vector<Action>> MctsPlanner::iterate(MctsResult& result) {
  std::vector<SearchNode*> path{root_.get()};
  std::vector<Action> actions;
  SearchNode* node = root_.get();
  while (node->expanded && !node->actions.empty()) {
    const int a =
        ucb_select(*node, select_weights_, config_.exploration, weighted_);
    auto& child = node->children[a];
    const bool fresh = !child;
    if (fresh) {
      child = std::make_unique<SearchNode>();
      child->state = node->state;
      const Action& act = node->actions[a].action;
      child->state[act.object] = act.target;
    }
    actions.push_back(node->actions[a].action);
    node = child.get();
    path.push_back(node);
    if (fresh) break;
  }

  if (all_at_goal(inst_, node->state)) return actions;

  Scene scene(inst_, node->state);
  if (!node->expanded) {
    node->actions = legal_actions_impl(inst_, goal_shapes_, scene, rng_);
    node->children.resize(node->actions.size());
    node->expanded = true;
  }

  double best = score(node->state);
  note(result, node->state, best);
  for (int d = 0; d < rollout_depth_; ++d) {
    const std::vector<MctsAction> options =
        legal_actions_impl(inst_, goal_shapes_, scene, rng_);
    if (options.empty()) break;
    const Action& act = options[rng_.below(options.size())].action;
    scene.move(act.object, act.target);
    actions.push_back(act);
    if (all_at_goal(inst_, scene.poses())) return actions;
    const double r = score(scene.poses());
    note(result, scene.poses(), r);
    best = std::max(best, r);
  }

  const double value = best / max_reward_;
  for (SearchNode* n : path) {
    ++n->visits;
    n->value += value;
  }
  return std::nullopt;
}

MctsResult search_mcts(const Instance& inst, const MctsConfig& config) {
  return MctsPlanner(inst, config).run();
}

}  // namespace rearrange
