#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace lgplan {

/// Half-width of the contact band: polygons whose interiors interpenetrate by
/// no more than twice this depth are treated as touching, not overlapping.
inline constexpr double kCollisionEps = 1e-6;

inline constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline Vec2 rotate(Vec2 a, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return {c * a.x - s * a.y, s * a.x + c * a.y};
}

/// Wraps an angle into (-pi, pi].
double normalize_angle(double theta);

/// Planar pose with a discrete stack level (0 = resting on the table).
class Pose {
 public:
  Pose() = default;
  Pose(double x, double y, double theta, int level = 0);

  double x() const { return x_; }
  double y() const { return y_; }
  double theta() const { return theta_; }
  int level() const { return level_; }
  Vec2 position() const { return {x_, y_}; }

  Pose with_level(int level) const { return {x_, y_, theta_, level}; }

  friend bool operator==(const Pose&, const Pose&) = default;

 private:
  double x_ = 0.0;
  double y_ = 0.0;
  double theta_ = 0.0;
  int level_ = 0;
};

/// True when positions agree to `tol` metres, headings to `tol` radians and
/// levels exactly.
bool approx_equal(const Pose& a, const Pose& b, double tol = 1e-9);

using Polygon = std::vector<Vec2>;

/// Convex, counter-clockwise object outline centred on its own origin.
class Footprint {
 public:
  /// Validates convexity, orientation, area and centring; throws
  /// std::invalid_argument on violation.
  explicit Footprint(std::vector<Vec2> vertices);

  static Footprint rectangle(double width, double height);
  static Footprint square(double side) { return rectangle(side, side); }

  std::span<const Vec2> vertices() const { return vertices_; }
  double area() const { return area_; }
  /// Largest vertex distance from the origin.
  double circumradius() const { return circumradius_; }

  friend bool operator==(const Footprint& a, const Footprint& b) {
    return a.vertices_ == b.vertices_;
  }

 private:
  std::vector<Vec2> vertices_;
  double area_ = 0.0;
  double circumradius_ = 0.0;
};

struct Aabb {
  double x_min, x_max, y_min, y_max;

  bool intersects(const Aabb& o) const {
    return x_min <= o.x_max && o.x_min <= x_max && y_min <= o.y_max && o.y_min <= y_max;
  }
};

Aabb bounding_box(std::span<const Vec2> poly);

class Workspace {
 public:
  Workspace(double x_min, double x_max, double y_min, double y_max);

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  double y_min() const { return y_min_; }
  double y_max() const { return y_max_; }
  double width() const { return x_max_ - x_min_; }
  double height() const { return y_max_ - y_min_; }
  double area() const { return width() * height(); }
  double diagonal() const { return std::hypot(width(), height()); }

  bool contains(Vec2 p, double tol = 0.0) const {
    return p.x >= x_min_ - tol && p.x <= x_max_ + tol && p.y >= y_min_ - tol &&
           p.y <= y_max_ + tol;
  }

  friend bool operator==(const Workspace&, const Workspace&) = default;

 private:
  double x_min_, x_max_, y_min_, y_max_;
};

/// Rotates the footprint by the pose heading, then translates it.
Polygon transform_footprint(const Footprint& f, const Pose& p);

/// Separating-axis test on convex polygons. Interiors must interpenetrate by
/// more than 2 * kCollisionEps along every candidate axis to count.
bool footprints_overlap(std::span<const Vec2> a, std::span<const Vec2> b);

/// Minimum interpenetration depth over all separating-axis candidates
/// (negative when the polygons are apart).
double penetration_depth(std::span<const Vec2> a, std::span<const Vec2> b);

/// Inclusive containment of every vertex.
bool in_workspace(std::span<const Vec2> poly, const Workspace& w);

double polygon_area(std::span<const Vec2> poly);

/// Area of the intersection of two convex polygons (Sutherland-Hodgman).
double intersection_area(std::span<const Vec2> a, std::span<const Vec2> b);

/// Point-in-convex-polygon; `margin` > 0 requires the point to be that far
/// inside every edge.
bool contains_point(std::span<const Vec2> poly, Vec2 q, double margin = 0.0);

}  // namespace lgplan
