#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rearrange/geometry.hpp"
#include "rearrange/weighting.hpp"

namespace rearrange {

/// Goal-matching tolerance on every pose component.
inline constexpr double kPoseTol = 1e-6;

/// One pose per object, indexed like the object list.
using Arrangement = std::vector<Pose>;

struct Instance {
  Workspace workspace;
  std::vector<ObjectCharacteristics> objects;
  Arrangement start;
  Arrangement goal;
  std::uint64_t seed = 0;

  std::size_t size() const { return objects.size(); }
  friend bool operator==(const Instance&, const Instance&) = default;
};

enum class ActionTag { kToGoal, kToBuffer };

/// Pick one object from wherever it is and place it at `target`.
struct Action {
  int object = 0;
  Pose target;
  ActionTag tag = ActionTag::kToGoal;

  friend bool operator==(const Action&, const Action&) = default;
};

struct RearrangementPlan {
  std::vector<Action> actions;

  std::size_t size() const { return actions.size(); }
  bool empty() const { return actions.empty(); }
  friend bool operator==(const RearrangementPlan&,
                         const RearrangementPlan&) = default;
};

enum class Objective { kPickPlace, kTaskImpedance };

/// Footprints placed at a mutable arrangement, for repeated validity checks.
class Scene {
 public:
  Scene(const Instance& inst, Arrangement poses);

  const Arrangement& poses() const { return poses_; }
  const Pose& pose(int obj) const { return poses_[obj]; }
  const PlacedShape& shape(int obj) const { return shapes_[obj]; }
  std::size_t size() const { return poses_.size(); }

  /// Index of some object other than `ignore` overlapping `shape`, or -1.
  int first_overlap(const PlacedShape& shape, int ignore) const;
  /// Every object other than `ignore` overlapping `shape`, ascending.
  std::vector<int> overlaps(const PlacedShape& shape, int ignore) const;

  /// True if `obj` could be put down at `shape` with the others in place.
  bool is_free(int obj, const PlacedShape& shape) const;

  void move(int obj, const Pose& pose);
  void move(int obj, const Pose& pose, PlacedShape shape);

 private:
  const Instance* inst_;
  Arrangement poses_;
  std::vector<PlacedShape> shapes_;
};

/// Throws std::invalid_argument if the arrangement length is wrong.
bool is_feasible(const Arrangement& arr, const Instance& inst);

/// Throws std::invalid_argument describing the first broken invariant.
void check_instance(const Instance& inst);

/// Total object area over workspace area.
double density(const Instance& inst);

bool at_goal(const Instance& inst, int obj, const Pose& pose);

enum class Violation {
  kNone,
  kBadObject,
  kOutOfWorkspace,
  kCollision,
  kGoalTagMismatch,
  kWrongFinalArrangement,
};

const char* to_string(Violation v);

struct PlanCheck {
  bool valid = true;
  /// Offending action index; the plan length for a wrong final arrangement.
  std::optional<std::size_t> index;
  Violation violation = Violation::kNone;
  std::string message;
};

/// Replays the plan from the start arrangement. Every placement must be
/// inside the workspace and clear of the other objects, and the replay must
/// end at the goal arrangement.
PlanCheck validate_plan(const RearrangementPlan& plan, const Instance& inst);

/// Number of actions, or the summed task-impedance weight of every moved
/// object. Throws std::invalid_argument for a plan that does not validate.
double plan_cost(const RearrangementPlan& plan, const Instance& inst,
                 Objective objective);

/// Drops actions that put an object where it already is.
RearrangementPlan strip_noop_actions(const RearrangementPlan& plan,
                                     const Instance& inst);

/// Re-derives tags from the instance goal and snaps near-goal targets onto
/// the exact goal pose.
void retag_actions(RearrangementPlan& plan, const Instance& inst);

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kMaxArrangementAttempts = 100000;
inline constexpr int kMaxConsecutiveFailures = 1000;

/// Rejection-samples a feasible arrangement of the given objects. Larger
/// objects are placed first. Throws GenerationError when the attempt budget
/// runs out.
Arrangement sample_arrangement(const std::vector<ObjectCharacteristics>& objects,
                               const Workspace& ws, Rng& rng);

/// Random ellipses and rectangles, aspect ratio in [1, 3], rescaled so the
/// areas sum to rho * W * H.
Instance gen_rand(int n, double rho, std::uint64_t seed,
                  const Workspace& ws = Workspace());

/// Two large squares and n - 2 small ones, area ratio 9:1, total area
/// rho * W * H. Requires n >= 3.
Instance gen_sq(int n, double rho, std::uint64_t seed,
                const Workspace& ws = Workspace());

}  // namespace rearrange
