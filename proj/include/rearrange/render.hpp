#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rearrange/instance.hpp"

namespace rearrange {

/// One SVG frame: objects filled at `current`, goal poses outlined. The
/// highlighted object (if >= 0) gets a heavy stroke. Polygon points are in
/// workspace coordinates; a group transform flips y for display.
std::string render_frame(const Instance& inst, const Arrangement& current,
                         int highlighted = -1);

/// Without a plan, writes `out` itself. With a k-action plan, writes k + 1
/// frames named <stem>_000.svg ... next to `out`, frame 0 being the start.
/// Throws std::runtime_error if a file cannot be written or the plan does
/// not validate.
std::vector<std::filesystem::path> render(const Instance& inst,
                                          const RearrangementPlan* plan,
                                          const std::filesystem::path& out);

}  // namespace rearrange
