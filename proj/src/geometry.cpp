#include "lgplan/geometry.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace lgplan {

double normalize_angle(double theta) {
  if (!std::isfinite(theta)) throw std::invalid_argument("non-finite angle");
  double t = std::fmod(theta, 2.0 * kPi);
  if (t > kPi) t -= 2.0 * kPi;
  if (t <= -kPi) t += 2.0 * kPi;
  return t;
}

Pose::Pose(double x, double y, double theta, int level)
    : x_(x), y_(y), theta_(normalize_angle(theta)), level_(level) {
  if (level < 0) throw std::invalid_argument("pose level must be non-negative");
  if (!std::isfinite(x) || !std::isfinite(y)) throw std::invalid_argument("non-finite pose");
}

bool approx_equal(const Pose& a, const Pose& b, double tol) {
  return std::abs(a.x() - b.x()) <= tol && std::abs(a.y() - b.y()) <= tol &&
         std::abs(normalize_angle(a.theta() - b.theta())) <= tol && a.level() == b.level();
}

double polygon_area(std::span<const Vec2> poly) {
  double twice = 0.0;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i)
    twice += cross(poly[i], poly[(i + 1) % n]);
  return 0.5 * twice;
}

Footprint::Footprint(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
  const std::size_t n = vertices_.size();
  if (n < 3) throw std::invalid_argument("footprint needs at least 3 vertices");
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 e0 = vertices_[(i + 1) % n] - vertices_[i];
    const Vec2 e1 = vertices_[(i + 2) % n] - vertices_[(i + 1) % n];
    if (cross(e0, e1) < 0.0)
      throw std::invalid_argument("footprint must be convex and counter-clockwise");
  }
  area_ = polygon_area(vertices_);
  if (area_ <= 1e-9) throw std::invalid_argument("footprint area is degenerate");

  Vec2 c{};
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = vertices_[i], b = vertices_[(i + 1) % n];
    c = c + cross(a, b) * (a + b);
  }
  c = (1.0 / (6.0 * area_)) * c;
  if (norm(c) > 1e-6)
    throw std::invalid_argument("footprint centroid must be at the local origin");

  for (const Vec2& v : vertices_) circumradius_ = std::max(circumradius_, norm(v));
}

Footprint Footprint::rectangle(double width, double height) {
  const double hw = 0.5 * width, hh = 0.5 * height;
  return Footprint({{-hw, -hh}, {hw, -hh}, {hw, hh}, {-hw, hh}});
}

Aabb bounding_box(std::span<const Vec2> poly) {
  Aabb box{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
           std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const Vec2& v : poly) {
    box.x_min = std::min(box.x_min, v.x);
    box.x_max = std::max(box.x_max, v.x);
    box.y_min = std::min(box.y_min, v.y);
    box.y_max = std::max(box.y_max, v.y);
  }
  return box;
}

Workspace::Workspace(double x_min, double x_max, double y_min, double y_max)
    : x_min_(x_min), x_max_(x_max), y_min_(y_min), y_max_(y_max) {
  if (!(x_min < x_max) || !(y_min < y_max))
    throw std::invalid_argument("workspace bounds must satisfy min < max");
}

Polygon transform_footprint(const Footprint& f, const Pose& p) {
  const double c = std::cos(p.theta()), s = std::sin(p.theta());
  Polygon out;
  out.reserve(f.vertices().size());
  for (const Vec2& v : f.vertices())
    out.push_back({c * v.x - s * v.y + p.x(), s * v.x + c * v.y + p.y()});
  return out;
}

namespace {

void project(std::span<const Vec2> poly, Vec2 axis, double& lo, double& hi) {
  lo = std::numeric_limits<double>::infinity();
  hi = -lo;
  for (const Vec2& v : poly) {
    const double d = dot(v, axis);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
  }
}

// Overlap of the projections onto each edge normal of `edges_of`.
double min_axis_overlap(std::span<const Vec2> edges_of, std::span<const Vec2> a,
                        std::span<const Vec2> b) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0, n = edges_of.size(); i < n; ++i) {
    const Vec2 e = edges_of[(i + 1) % n] - edges_of[i];
    const double len = norm(e);
    if (len == 0.0) continue;
    const Vec2 axis{e.y / len, -e.x / len};
    double alo, ahi, blo, bhi;
    project(a, axis, alo, ahi);
    project(b, axis, blo, bhi);
    best = std::min(best, std::min(ahi, bhi) - std::max(alo, blo));
  }
  return best;
}

}  // namespace

double penetration_depth(std::span<const Vec2> a, std::span<const Vec2> b) {
  return std::min(min_axis_overlap(a, a, b), min_axis_overlap(b, a, b));
}

bool footprints_overlap(std::span<const Vec2> a, std::span<const Vec2> b) {
  if (!bounding_box(a).intersects(bounding_box(b))) return false;
  return penetration_depth(a, b) > 2.0 * kCollisionEps;
}

bool in_workspace(std::span<const Vec2> poly, const Workspace& w) {
  // Rotations of exactly inscribed footprints leave ~1e-16 residue.
  return std::all_of(poly.begin(), poly.end(), [&](Vec2 v) { return w.contains(v, 1e-12); });
}

bool contains_point(std::span<const Vec2> poly, Vec2 q, double margin) {
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    const Vec2 e = poly[(i + 1) % n] - poly[i];
    if (cross(e, q - poly[i]) / norm(e) < margin) return false;
  }
  return true;
}

double intersection_area(std::span<const Vec2> a, std::span<const Vec2> b) {
  Polygon out(a.begin(), a.end());
  for (std::size_t i = 0, n = b.size(); i < n && !out.empty(); ++i) {
    const Vec2 c0 = b[i], c1 = b[(i + 1) % n];
    const Vec2 edge = c1 - c0;
    Polygon in;
    in.swap(out);
    for (std::size_t j = 0, m = in.size(); j < m; ++j) {
      const Vec2 p = in[j], q = in[(j + 1) % m];
      const double sp = cross(edge, p - c0), sq = cross(edge, q - c0);
      if (sp >= 0.0) out.push_back(p);
      if ((sp >= 0.0) != (sq >= 0.0)) out.push_back(p + (sp / (sp - sq)) * (q - p));
    }
  }
  return out.size() < 3 ? 0.0 : std::max(0.0, polygon_area(out));
}

}  // namespace lgplan
