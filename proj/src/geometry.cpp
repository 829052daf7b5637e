#include "rearrange/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rearrange {

double norm(Vec2 a) { return std::hypot(a.x, a.y); }

double normalize_angle(double theta) {
  double t = std::fmod(theta, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  if (t >= kTwoPi) t = 0.0;
  return t;
}

bool poses_close(const Pose& a, const Pose& b, double tol) {
  if (std::abs(a.x() - b.x()) > tol || std::abs(a.y() - b.y()) > tol) {
    return false;
  }
  const double d = std::abs(a.theta() - b.theta());
  return std::min(d, kTwoPi - d) <= tol;
}

namespace {

double signed_area(const std::vector<Vec2>& v) {
  double twice = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    twice += cross(v[i], v[(i + 1) % v.size()]);
  }
  return 0.5 * twice;
}

Vec2 area_centroid(const std::vector<Vec2>& v) {
  double cx = 0.0, cy = 0.0, twice = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec2 p = v[i];
    const Vec2 q = v[(i + 1) % v.size()];
    const double c = cross(p, q);
    twice += c;
    cx += (p.x + q.x) * c;
    cy += (p.y + q.y) * c;
  }
  return {cx / (3.0 * twice), cy / (3.0 * twice)};
}

std::vector<Vec2> ellipse_vertices(double a, double b) {
  std::vector<Vec2> v;
  v.reserve(kCurveSegments);
  for (int k = 0; k < kCurveSegments; ++k) {
    const double t = kTwoPi * k / kCurveSegments;
    v.push_back({a * std::cos(t), b * std::sin(t)});
  }
  return v;
}

// Ramanujan's second approximation.
double ellipse_perimeter(double a, double b) {
  const double h = ((a - b) * (a - b)) / ((a + b) * (a + b));
  return kPi * (a + b) * (1.0 + 3.0 * h / (10.0 + std::sqrt(4.0 - 3.0 * h)));
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(what) + " must be positive");
  }
}

}  // namespace

Footprint Footprint::polygon(std::vector<Vec2> vertices) {
  if (vertices.size() < 3) {
    throw std::invalid_argument("polygon needs at least 3 vertices");
  }
  const std::size_t n = vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 e0 = vertices[(i + 1) % n] - vertices[i];
    const Vec2 e1 = vertices[(i + 2) % n] - vertices[(i + 1) % n];
    if (!(cross(e0, e1) > 0.0)) {
      throw std::invalid_argument(
          "polygon must be strictly convex and counterclockwise");
    }
  }
  // A star-shaped winding passes the local turn test; the total turn does not.
  if (!(signed_area(vertices) > 0.0)) {
    throw std::invalid_argument("polygon must be counterclockwise");
  }
  double turn = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 e0 = vertices[(i + 1) % n] - vertices[i];
    const Vec2 e1 = vertices[(i + 2) % n] - vertices[(i + 1) % n];
    turn += std::atan2(cross(e0, e1), dot(e0, e1));
  }
  if (std::abs(turn - kTwoPi) > 1e-6) {
    throw std::invalid_argument("polygon winds more than once");
  }

  // Already-centered input is kept bit-for-bit so serialization round-trips.
  const Vec2 c = area_centroid(vertices);
  if (norm(c) > 1e-12) {
    for (Vec2& v : vertices) v = v - c;
  }

  Footprint fp;
  fp.kind_ = ShapeKind::kPolygon;
  fp.vertices_ = std::move(vertices);
  fp.area_ = signed_area(fp.vertices_);
  for (std::size_t i = 0; i < n; ++i) {
    fp.perimeter_ += norm(fp.vertices_[(i + 1) % n] - fp.vertices_[i]);
  }
  fp.finish();
  return fp;
}

Footprint Footprint::rectangle(double width, double height) {
  require_positive(width, "rectangle width");
  require_positive(height, "rectangle height");
  const double hx = 0.5 * width, hy = 0.5 * height;
  Footprint fp = polygon({{-hx, -hy}, {hx, -hy}, {hx, hy}, {-hx, hy}});
  fp.kind_ = ShapeKind::kRectangle;
  fp.semi_x_ = hx;
  fp.semi_y_ = hy;
  fp.area_ = width * height;
  fp.perimeter_ = 2.0 * (width + height);
  return fp;
}

Footprint Footprint::ellipse(double semi_x, double semi_y) {
  require_positive(semi_x, "ellipse semi-axis");
  require_positive(semi_y, "ellipse semi-axis");
  Footprint fp;
  fp.kind_ = ShapeKind::kEllipse;
  fp.semi_x_ = semi_x;
  fp.semi_y_ = semi_y;
  fp.vertices_ = ellipse_vertices(semi_x, semi_y);
  fp.area_ = kPi * semi_x * semi_y;
  fp.perimeter_ = ellipse_perimeter(semi_x, semi_y);
  fp.finish();
  return fp;
}

Footprint Footprint::disc(double radius) {
  require_positive(radius, "disc radius");
  Footprint fp;
  fp.kind_ = ShapeKind::kDisc;
  fp.semi_x_ = radius;
  fp.semi_y_ = radius;
  fp.vertices_ = ellipse_vertices(radius, radius);
  fp.area_ = kPi * radius * radius;
  fp.perimeter_ = kTwoPi * radius;
  fp.finish();
  return fp;
}

void Footprint::finish() {
  bounding_radius_ = 0.0;
  for (const Vec2& v : vertices_) {
    bounding_radius_ = std::max(bounding_radius_, norm(v));
  }
  if (kind_ == ShapeKind::kEllipse || kind_ == ShapeKind::kDisc) {
    bounding_radius_ = std::max({bounding_radius_, semi_x_, semi_y_});
  }
}

double Footprint::aspect_ratio() const {
  if (kind_ != ShapeKind::kPolygon) {
    return std::max(semi_x_, semi_y_) / std::min(semi_x_, semi_y_);
  }
  double lo_x = 0, hi_x = 0, lo_y = 0, hi_y = 0;
  for (const Vec2& v : vertices_) {
    lo_x = std::min(lo_x, v.x);
    hi_x = std::max(hi_x, v.x);
    lo_y = std::min(lo_y, v.y);
    hi_y = std::max(hi_y, v.y);
  }
  const double w = hi_x - lo_x, h = hi_y - lo_y;
  return std::max(w, h) / std::min(w, h);
}

Workspace::Workspace(double w, double h) : width(w), height(h) {
  require_positive(w, "workspace width");
  require_positive(h, "workspace height");
}

std::vector<Vec2> transform(const Footprint& fp, const Pose& pose) {
  const double c = std::cos(pose.theta());
  const double s = std::sin(pose.theta());
  std::vector<Vec2> out;
  out.reserve(fp.vertices().size());
  for (const Vec2& v : fp.vertices()) {
    out.push_back({pose.x() + c * v.x - s * v.y, pose.y() + s * v.x + c * v.y});
  }
  return out;
}

PlacedShape place(const Footprint& fp, const Pose& pose) {
  return {pose.position(), fp.bounding_radius(), transform(fp, pose)};
}

namespace {

// True if some edge normal of `a` separates the two polygons.
bool has_separating_edge(std::span<const Vec2> a, std::span<const Vec2> b) {
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 edge = a[(i + 1) % n] - a[i];
    const Vec2 axis{edge.y, -edge.x};
    const double len = norm(axis);
    double min_a = INFINITY, max_a = -INFINITY;
    for (const Vec2& p : a) {
      const double d = dot(p, axis) / len;
      min_a = std::min(min_a, d);
      max_a = std::max(max_a, d);
    }
    double min_b = INFINITY, max_b = -INFINITY;
    for (const Vec2& p : b) {
      const double d = dot(p, axis) / len;
      min_b = std::min(min_b, d);
      max_b = std::max(max_b, d);
    }
    if (std::min(max_a, max_b) - std::max(min_a, min_b) <= kGeomEps) {
      return true;
    }
  }
  return false;
}

}  // namespace

bool polygons_overlap(std::span<const Vec2> a, std::span<const Vec2> b) {
  return !has_separating_edge(a, b) && !has_separating_edge(b, a);
}

bool collide(const PlacedShape& a, const PlacedShape& b) {
  const double dx = a.center.x - b.center.x;
  const double dy = a.center.y - b.center.y;
  const double reach = a.radius + b.radius;
  if (dx * dx + dy * dy > reach * reach) return false;
  return polygons_overlap(a.vertices, b.vertices);
}

bool collide(const Footprint& fp_a, const Pose& pose_a, const Footprint& fp_b,
             const Pose& pose_b) {
  return collide(place(fp_a, pose_a), place(fp_b, pose_b));
}

bool in_workspace(const PlacedShape& shape, const Workspace& ws) {
  for (const Vec2& v : shape.vertices) {
    if (v.x < -kGeomEps || v.x > ws.width + kGeomEps || v.y < -kGeomEps ||
        v.y > ws.height + kGeomEps) {
      return false;
    }
  }
  return true;
}

bool in_workspace(const Footprint& fp, const Pose& pose, const Workspace& ws) {
  return in_workspace(place(fp, pose), ws);
}

std::optional<Pose> sample_pose(const Footprint& fp, const Workspace& ws,
                                Rng& rng) {
  const double theta = rng.uniform(0.0, kTwoPi);
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  double lo_x = INFINITY, hi_x = -INFINITY, lo_y = INFINITY, hi_y = -INFINITY;
  for (const Vec2& v : fp.vertices()) {
    const double x = c * v.x - s * v.y;
    const double y = s * v.x + c * v.y;
    lo_x = std::min(lo_x, x);
    hi_x = std::max(hi_x, x);
    lo_y = std::min(lo_y, y);
    hi_y = std::max(hi_y, y);
  }
  const double x_min = -lo_x, x_max = ws.width - hi_x;
  const double y_min = -lo_y, y_max = ws.height - hi_y;
  if (x_min > x_max || y_min > y_max) return std::nullopt;
  return Pose(rng.uniform(x_min, x_max), rng.uniform(y_min, y_max), theta);
}

double minkowski_area(const Footprint& fp, double disc_radius) {
  if (!(disc_radius >= 0.0)) {
    throw std::domain_error("disc radius must be nonnegative");
  }
  return fp.area() + kPi * disc_radius * disc_radius +
         disc_radius * fp.perimeter();
}

double collision_probability(const Footprint& fp, double disc_radius,
                             const Workspace& ws) {
  if (2.0 * disc_radius >= std::min(ws.width, ws.height)) {
    throw std::domain_error("disc does not fit inside the workspace");
  }
  const double free_area =
      (ws.height - 2.0 * disc_radius) * (ws.width - 2.0 * disc_radius);
  return std::clamp(minkowski_area(fp, disc_radius) / free_area, 0.0, 1.0);
}

}  // namespace rearrange
