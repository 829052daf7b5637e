#include "rearrange/instance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rearrange {

Scene::Scene(const Instance& inst, Arrangement poses)
    : inst_(&inst), poses_(std::move(poses)) {
  shapes_.reserve(poses_.size());
  for (std::size_t i = 0; i < poses_.size(); ++i) {
    shapes_.push_back(place(inst.objects[i].footprint, poses_[i]));
  }
}

int Scene::first_overlap(const PlacedShape& shape, int ignore) const {
  for (std::size_t j = 0; j < shapes_.size(); ++j) {
    if (static_cast<int>(j) == ignore) continue;
    if (collide(shape, shapes_[j])) return static_cast<int>(j);
  }
  return -1;
}

std::vector<int> Scene::overlaps(const PlacedShape& shape, int ignore) const {
  std::vector<int> out;
  for (std::size_t j = 0; j < shapes_.size(); ++j) {
    if (static_cast<int>(j) == ignore) continue;
    if (collide(shape, shapes_[j])) out.push_back(static_cast<int>(j));
  }
  return out;
}

bool Scene::is_free(int obj, const PlacedShape& shape) const {
  return in_workspace(shape, inst_->workspace) && first_overlap(shape, obj) < 0;
}

void Scene::move(int obj, const Pose& pose) {
  move(obj, pose, place(inst_->objects[obj].footprint, pose));
}

void Scene::move(int obj, const Pose& pose, PlacedShape shape) {
  poses_[obj] = pose;
  shapes_[obj] = std::move(shape);
}

bool is_feasible(const Arrangement& arr, const Instance& inst) {
  if (arr.size() != inst.objects.size()) {
    throw std::invalid_argument("arrangement has " + std::to_string(arr.size()) +
                                " poses for " +
                                std::to_string(inst.objects.size()) +
                                " objects");
  }
  std::vector<PlacedShape> shapes;
  shapes.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    shapes.push_back(place(inst.objects[i].footprint, arr[i]));
    if (!in_workspace(shapes.back(), inst.workspace)) return false;
    for (std::size_t j = 0; j < i; ++j) {
      if (collide(shapes[i], shapes[j])) return false;
    }
  }
  return true;
}

void check_instance(const Instance& inst) {
  if (inst.objects.empty()) {
    throw std::invalid_argument("instance has no objects");
  }
  for (const auto& obj : inst.objects) {
    if ((obj.mass && !(*obj.mass >= 0.0)) ||
        (obj.impedance && !(*obj.impedance >= 0.0))) {
      throw std::invalid_argument("mass and impedance must be nonnegative");
    }
  }
  if (!is_feasible(inst.start, inst)) {
    throw std::invalid_argument("start arrangement is not feasible");
  }
  if (!is_feasible(inst.goal, inst)) {
    throw std::invalid_argument("goal arrangement is not feasible");
  }
}

double density(const Instance& inst) {
  double total = 0.0;
  for (const auto& obj : inst.objects) total += obj.footprint.area();
  return total / inst.workspace.area();
}

bool at_goal(const Instance& inst, int obj, const Pose& pose) {
  return poses_close(pose, inst.goal[obj], kPoseTol);
}

const char* to_string(Violation v) {
  switch (v) {
    case Violation::kNone: return "none";
    case Violation::kBadObject: return "bad-object";
    case Violation::kOutOfWorkspace: return "out-of-workspace";
    case Violation::kCollision: return "collision";
    case Violation::kGoalTagMismatch: return "goal-tag-mismatch";
    case Violation::kWrongFinalArrangement: return "wrong-final-arrangement";
  }
  return "unknown";
}

PlanCheck validate_plan(const RearrangementPlan& plan, const Instance& inst) {
  auto fail = [](std::size_t i, Violation v, std::string msg) {
    return PlanCheck{false, i, v, std::move(msg)};
  };
  const int n = static_cast<int>(inst.size());
  Scene scene(inst, inst.start);
  for (std::size_t i = 0; i < plan.actions.size(); ++i) {
    const Action& a = plan.actions[i];
    if (a.object < 0 || a.object >= n) {
      return fail(i, Violation::kBadObject,
                  "object index " + std::to_string(a.object) + " out of range");
    }
    if (a.tag == ActionTag::kToGoal && !at_goal(inst, a.object, a.target)) {
      return fail(i, Violation::kGoalTagMismatch,
                  "to-goal action does not target the goal pose");
    }
    PlacedShape shape = place(inst.objects[a.object].footprint, a.target);
    if (!in_workspace(shape, inst.workspace)) {
      return fail(i, Violation::kOutOfWorkspace,
                  "object " + std::to_string(a.object) + " leaves the workspace");
    }
    if (int hit = scene.first_overlap(shape, a.object); hit >= 0) {
      return fail(i, Violation::kCollision,
                  "object " + std::to_string(a.object) + " collides with " +
                      std::to_string(hit));
    }
    scene.move(a.object, a.target, std::move(shape));
  }
  for (int i = 0; i < n; ++i) {
    if (!at_goal(inst, i, scene.pose(i))) {
      return fail(plan.actions.size(), Violation::kWrongFinalArrangement,
                  "object " + std::to_string(i) + " does not end at its goal");
    }
  }
  return {};
}

double plan_cost(const RearrangementPlan& plan, const Instance& inst,
                 Objective objective) {
  if (PlanCheck check = validate_plan(plan, inst); !check.valid) {
    throw std::invalid_argument("invalid plan: " + check.message);
  }
  if (objective == Objective::kPickPlace) {
    return static_cast<double>(plan.size());
  }
  const WeightVector w = heti_weights(inst.objects);
  double cost = 0.0;
  for (const Action& a : plan.actions) cost += w[a.object];
  return cost;
}

RearrangementPlan strip_noop_actions(const RearrangementPlan& plan,
                                     const Instance& inst) {
  Arrangement current = inst.start;
  RearrangementPlan out;
  for (const Action& a : plan.actions) {
    if (a.object >= 0 && a.object < static_cast<int>(current.size()) &&
        poses_close(current[a.object], a.target, kPoseTol)) {
      continue;
    }
    if (a.object >= 0 && a.object < static_cast<int>(current.size())) {
      current[a.object] = a.target;
    }
    out.actions.push_back(a);
  }
  return out;
}

void retag_actions(RearrangementPlan& plan, const Instance& inst) {
  for (Action& a : plan.actions) {
    if (at_goal(inst, a.object, a.target)) {
      a.target = inst.goal[a.object];
      a.tag = ActionTag::kToGoal;
    } else {
      a.tag = ActionTag::kToBuffer;
    }
  }
}

Arrangement sample_arrangement(const std::vector<ObjectCharacteristics>& objects,
                               const Workspace& ws, Rng& rng) {
  const std::size_t n = objects.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return objects[a].footprint.area() > objects[b].footprint.area();
  });

  std::vector<PlacedShape> shapes(n);
  Arrangement arr(n);
  int attempts = 0;
  while (attempts < kMaxArrangementAttempts) {
    std::size_t placed = 0;
    int consecutive = 0;
    while (placed < n && attempts < kMaxArrangementAttempts &&
           consecutive < kMaxConsecutiveFailures) {
      ++attempts;
      const std::size_t obj = order[placed];
      std::optional<Pose> pose = sample_pose(objects[obj].footprint, ws, rng);
      if (!pose) {
        ++consecutive;
        continue;
      }
      PlacedShape shape = place(objects[obj].footprint, *pose);
      bool clear = true;
      for (std::size_t k = 0; k < placed && clear; ++k) {
        clear = !collide(shape, shapes[order[k]]);
      }
      if (!clear) {
        ++consecutive;
        continue;
      }
      consecutive = 0;
      arr[obj] = *pose;
      shapes[obj] = std::move(shape);
      ++placed;
    }
    if (placed == n) return arr;
  }
  throw GenerationError("could not place " + std::to_string(n) +
                        " objects within " +
                        std::to_string(kMaxArrangementAttempts) + " attempts");
}

namespace {

void check_density(int n, double rho) {
  if (n < 1) throw std::invalid_argument("need at least one object");
  if (!(rho > 0.0 && rho < 1.0)) {
    throw std::invalid_argument("density must lie in (0, 1)");
  }
}

Instance finish_instance(std::vector<ObjectCharacteristics> objects,
                         const Workspace& ws, std::uint64_t seed, Rng& rng) {
  Instance inst;
  inst.workspace = ws;
  inst.seed = seed;
  inst.start = sample_arrangement(objects, ws, rng);
  inst.goal = sample_arrangement(objects, ws, rng);
  inst.objects = std::move(objects);
  return inst;
}

}  // namespace

Instance gen_rand(int n, double rho, std::uint64_t seed, const Workspace& ws) {
  check_density(n, rho);
  Rng rng(seed);
  struct Raw {
    bool ellipse;
    double aspect;
    double area;
  };
  std::vector<Raw> raw(n);
  double raw_total = 0.0;
  for (Raw& r : raw) {
    r.ellipse = rng.coin();
    r.aspect = rng.uniform(1.0, 3.0);
    r.area = rng.uniform(0.05, 1.0);
    raw_total += r.area;
  }
  const double scale = rho * ws.area() / raw_total;

  std::vector<ObjectCharacteristics> objects;
  objects.reserve(n);
  for (const Raw& r : raw) {
    const double area = r.area * scale;
    if (r.ellipse) {
      // pi * a * b = area, a = aspect * b
      const double b = std::sqrt(area / (kPi * r.aspect));
      objects.push_back({Footprint::ellipse(r.aspect * b, b), {}, {}});
    } else {
      const double h = std::sqrt(area / r.aspect);
      objects.push_back({Footprint::rectangle(r.aspect * h, h), {}, {}});
    }
  }
  return finish_instance(std::move(objects), ws, seed, rng);
}

Instance gen_sq(int n, double rho, std::uint64_t seed, const Workspace& ws) {
  check_density(n, rho);
  if (n < 3) throw std::invalid_argument("square scenario needs n >= 3");
  Rng rng(seed);
  // 2 * 9x + (n - 2) * x = rho * W * H
  const double small_area = rho * ws.area() / (n + 16);
  const double small_side = std::sqrt(small_area);

  // Large squares land on random indices so index-based tie-breaking in the
  // planners does not systematically favor either size.
  const int first = static_cast<int>(rng.below(n));
  int second = static_cast<int>(rng.below(n - 1));
  if (second >= first) ++second;

  std::vector<ObjectCharacteristics> objects;
  objects.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double side = (i == first || i == second) ? 3.0 * small_side
                                                    : small_side;
    objects.push_back({Footprint::square(side), {}, {}});
  }
  return finish_instance(std::move(objects), ws, seed, rng);
}

}  // namespace rearrange
