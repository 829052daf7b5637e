#pragma once

#include <optional>
#include <span>
#include <vector>

#include "rearrange/rng.hpp"

namespace rearrange {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Projection slack for the separating-axis test. Workspace coordinates are
// O(1) to O(100), so this sits well above rounding noise.
inline constexpr double kGeomEps = 1e-9;

// Vertex count of the polygon standing in for an ellipse or a disc.
inline constexpr int kCurveSegments = 16;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2, Vec2) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
double norm(Vec2 a);

/// Wraps an angle into [0, 2pi).
double normalize_angle(double theta);

/// Planar pose (x, y, theta). The angle is kept normalized.
class Pose {
 public:
  Pose() = default;
  Pose(double x, double y, double theta)
      : x_(x), y_(y), theta_(normalize_angle(theta)) {}

  double x() const { return x_; }
  double y() const { return y_; }
  double theta() const { return theta_; }
  Vec2 position() const { return {x_, y_}; }

  friend bool operator==(const Pose&, const Pose&) = default;

 private:
  double x_ = 0.0;
  double y_ = 0.0;
  double theta_ = 0.0;
};

/// Componentwise comparison with a circular angle difference.
bool poses_close(const Pose& a, const Pose& b, double tol);

enum class ShapeKind { kPolygon, kRectangle, kEllipse, kDisc };

/// Body-frame footprint of an upright object.
///
/// Every footprint exposes a convex counterclockwise polygon used for
/// collision tests. Area and perimeter are those of the exact shape, so for
/// ellipses and discs they differ slightly from the polygon's. Polygons are
/// re-centered on their area centroid at construction, which makes the pose
/// position the centroid for every kind of footprint.
class Footprint {
 public:
  /// Throws std::invalid_argument unless the vertices form a strictly convex
  /// counterclockwise polygon with at least three vertices.
  static Footprint polygon(std::vector<Vec2> vertices);
  static Footprint rectangle(double width, double height);
  static Footprint square(double side) { return rectangle(side, side); }
  /// Semi-axes along body x and body y.
  static Footprint ellipse(double semi_x, double semi_y);
  static Footprint disc(double radius);

  ShapeKind kind() const { return kind_; }
  const std::vector<Vec2>& vertices() const { return vertices_; }
  /// Half-extents for rectangles, semi-axes for ellipses and discs.
  double semi_x() const { return semi_x_; }
  double semi_y() const { return semi_y_; }
  double radius() const { return semi_x_; }

  double area() const { return area_; }
  double perimeter() const { return perimeter_; }
  double bounding_radius() const { return bounding_radius_; }

  /// Ratio of the longer to the shorter principal extent (>= 1).
  double aspect_ratio() const;

  friend bool operator==(const Footprint&, const Footprint&) = default;

 private:
  Footprint() = default;
  void finish();

  ShapeKind kind_ = ShapeKind::kPolygon;
  std::vector<Vec2> vertices_;
  double semi_x_ = 0.0;
  double semi_y_ = 0.0;
  double area_ = 0.0;
  double perimeter_ = 0.0;
  double bounding_radius_ = 0.0;
};

struct Workspace {
  double width = 10.0;
  double height = 10.0;

  Workspace() = default;
  /// Throws std::invalid_argument for non-positive sides.
  Workspace(double w, double h);

  double area() const { return width * height; }
  friend bool operator==(const Workspace&, const Workspace&) = default;
};

/// World-frame polygon plus its bounding disc. Cheap to test repeatedly.
struct PlacedShape {
  Vec2 center;
  double radius = 0.0;
  std::vector<Vec2> vertices;
};

/// World-frame vertices of the footprint's polygon, in body order.
std::vector<Vec2> transform(const Footprint& fp, const Pose& pose);
PlacedShape place(const Footprint& fp, const Pose& pose);

/// Separating-axis test on two convex counterclockwise polygons. Shapes
/// that only touch along their boundaries do not overlap.
bool polygons_overlap(std::span<const Vec2> a, std::span<const Vec2> b);

/// Bounding-disc rejection followed by the separating-axis test.
bool collide(const PlacedShape& a, const PlacedShape& b);
bool collide(const Footprint& fp_a, const Pose& pose_a, const Footprint& fp_b,
             const Pose& pose_b);

bool in_workspace(const PlacedShape& shape, const Workspace& ws);
bool in_workspace(const Footprint& fp, const Pose& pose, const Workspace& ws);

/// Draws theta uniformly, then a uniform position among those that keep the
/// rotated footprint inside the workspace. Empty if it cannot fit at theta.
std::optional<Pose> sample_pose(const Footprint& fp, const Workspace& ws,
                                Rng& rng);

/// Area of the Minkowski sum of a convex footprint with a disc of radius r:
/// S + pi r^2 + r C. Throws std::domain_error for r < 0.
double minkowski_area(const Footprint& fp, double disc_radius);

/// Upper estimate of the chance that a uniformly placed disc of radius r
/// overlaps the footprint placed away from the walls, clamped to [0, 1].
/// Throws std::domain_error when 2r >= min(W, H) or r < 0.
double collision_probability(const Footprint& fp, double disc_radius,
                             const Workspace& ws);

}  // namespace rearrange
