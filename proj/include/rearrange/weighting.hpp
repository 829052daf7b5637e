#pragma once

#include <optional>
#include <span>
#include <vector>

#include "rearrange/geometry.hpp"

namespace rearrange {

/// What the planner knows about one object.
struct ObjectCharacteristics {
  Footprint footprint;
  std::optional<double> mass;
  /// Explicit manipulation cost; overrides mass when present.
  std::optional<double> impedance;

  friend bool operator==(const ObjectCharacteristics&,
                         const ObjectCharacteristics&) = default;
};

/// One nonnegative weight per object, indexed like the object list.
using WeightVector = std::vector<double>;

/// Collision-probability weights: each object's chance of overlapping a disc
/// with the population's mean area, dropped uniformly in the workspace.
/// Throws std::domain_error if that disc does not fit in the workspace.
WeightVector hecp_weights(std::span<const ObjectCharacteristics> objects,
                          const Workspace& ws);

/// Task-impedance weights: impedance if given, else mass, else area.
WeightVector heti_weights(std::span<const ObjectCharacteristics> objects);

WeightVector uniform_weights(std::size_t n);

}  // namespace rearrange
