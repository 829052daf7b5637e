#include "rearrange/weighting.hpp"

#include <cmath>
#include <stdexcept>

namespace rearrange {

WeightVector hecp_weights(std::span<const ObjectCharacteristics> objects,
                          const Workspace& ws) {
  if (objects.empty()) return {};
  double total_area = 0.0;
  for (const auto& obj : objects) total_area += obj.footprint.area();
  const double mean_area = total_area / static_cast<double>(objects.size());
  const double mean_radius = std::sqrt(mean_area / kPi);

  const double free_area =
      (ws.height - 2.0 * mean_radius) * (ws.width - 2.0 * mean_radius);
  if (!(2.0 * mean_radius < std::min(ws.width, ws.height)) ||
      !(free_area > 0.0)) {
    throw std::domain_error("mean-area disc does not fit in the workspace");
  }

  WeightVector w;
  w.reserve(objects.size());
  for (const auto& obj : objects) {
    const Footprint& fp = obj.footprint;
    w.push_back((fp.area() + mean_area + mean_radius * fp.perimeter()) /
                free_area);
  }
  return w;
}

WeightVector heti_weights(std::span<const ObjectCharacteristics> objects) {
  WeightVector w;
  w.reserve(objects.size());
  for (const auto& obj : objects) {
    if (obj.impedance) {
      w.push_back(*obj.impedance);
    } else if (obj.mass) {
      w.push_back(*obj.mass);
    } else {
      w.push_back(obj.footprint.area());
    }
  }
  return w;
}

WeightVector uniform_weights(std::size_t n) { return WeightVector(n, 1.0); }

}  // namespace rearrange
