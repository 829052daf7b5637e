#include "rearrange/render.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rearrange {

namespace {

// Golden-angle hue walk keeps neighbouring indices distinguishable.
std::string color(int i) {
  const double hue = std::fmod(i * 137.508, 360.0);
  char buf[32];
  std::snprintf(buf, sizeof buf, "hsl(%.1f,65%%,55%%)", hue);
  return buf;
}

std::string points(const std::vector<Vec2>& verts) {
  std::string s;
  char buf[64];
  for (const Vec2& v : verts) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g ", v.x, v.y);
    s += buf;
  }
  if (!s.empty()) s.pop_back();
  return s;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

std::string render_frame(const Instance& inst, const Arrangement& current,
                         int highlighted) {
  const double w = inst.workspace.width;
  const double h = inst.workspace.height;
  const double scale = 600.0 / std::max(w, h);
  // Strokes live inside the scaled group, so widths are in workspace units.
  const double stroke = 1.5 / scale;

  std::ostringstream svg;
  svg.precision(17);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w * scale
      << "\" height=\"" << h * scale << "\" viewBox=\"0 0 " << w * scale << ' '
      << h * scale << "\">\n";
  svg << "<g transform=\"matrix(" << scale << " 0 0 " << -scale << " 0 "
      << h * scale << ")\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << w << "\" height=\"" << h
      << "\" fill=\"#f4f1ea\" stroke=\"#333\" stroke-width=\"" << stroke
      << "\"/>\n";
  for (std::size_t i = 0; i < inst.size(); ++i) {
    svg << "<polygon class=\"goal\" data-object=\"" << i << "\" points=\""
        << points(transform(inst.objects[i].footprint, inst.goal[i]))
        << "\" fill=\"none\" stroke=\"" << color(static_cast<int>(i))
        << "\" stroke-dasharray=\"" << 4 * stroke << "\" stroke-width=\""
        << stroke << "\"/>\n";
  }
  for (std::size_t i = 0; i < current.size(); ++i) {
    const bool hot = static_cast<int>(i) == highlighted;
    svg << "<polygon class=\"object\" data-object=\"" << i << "\" points=\""
        << points(transform(inst.objects[i].footprint, current[i]))
        << "\" fill=\"" << color(static_cast<int>(i)) << "\" fill-opacity=\"0.8\""
        << " stroke=\"" << (hot ? "#000" : "#555") << "\" stroke-width=\""
        << (hot ? 4 * stroke : stroke) << "\"/>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

std::vector<std::filesystem::path> render(const Instance& inst,
                                          const RearrangementPlan* plan,
                                          const std::filesystem::path& out) {
  if (!plan) {
    write_text(out, render_frame(inst, inst.start));
    return {out};
  }
  if (const PlanCheck check = validate_plan(*plan, inst); !check.valid) {
    throw std::runtime_error("plan does not validate: " + check.message);
  }
  std::vector<std::filesystem::path> written;
  Arrangement current = inst.start;
  auto frame_path = [&](std::size_t k) {
    char suffix[32];
    std::snprintf(suffix, sizeof suffix, "_%03zu.svg", k);
    return out.parent_path() / (out.stem().string() + suffix);
  };
  written.push_back(frame_path(0));
  write_text(written.back(), render_frame(inst, current));
  for (std::size_t k = 0; k < plan->size(); ++k) {
    const Action& a = plan->actions[k];
    current[a.object] = a.target;
    written.push_back(frame_path(k + 1));
    write_text(written.back(), render_frame(inst, current, a.object));
  }
  return written;
}

}  // namespace rearrange
