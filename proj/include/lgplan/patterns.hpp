#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lgplan/geometry.hpp"
#include "lgplan/json_lines.hpp"
#include "lgplan/rng.hpp"

namespace lgplan {

enum class PatternFamily { line, circle, rectangle, tower, spatial };

std::string_view to_string(PatternFamily f);

/// Side bits of a spatial relation in the table frame: left = -x,
/// right = +x, front = -y, behind = +y.
enum SpatialSide : unsigned { kLeft = 1u, kRight = 2u, kFront = 4u, kBehind = 8u };

/// Gaussian curve noise is truncated at this many standard deviations
/// (radially), which keeps every prior's support compact.
inline constexpr double kNoiseTruncation = 4.0;

struct PatternPrior {
  std::string name;
  std::vector<std::string> keys;
  PatternFamily family = PatternFamily::line;
  unsigned sides = 0;  // spatial only
  bool ordered = false;
  double delta = 0.0;  // max distance of the second sample from the first
  double sigma = 0.0;  // curve noise standard deviation
  // Line: the k-th sample sits k * spacing * |p1 - p0| from p0.
  double spacing = 1.0;
  // Spatial band beyond the anchor's box edge, and lateral slack added to the
  // anchor's half-extent for single-sided relations.
  double gap_min = 0.0;
  double gap_max_fraction = 0.3;
  double lateral_margin = 0.05;

  bool is_spatial() const { return family == PatternFamily::spatial; }
};

// --- parametric curves -----------------------------------------------------

/// p0 + t * length * direction.
struct LineCurve {
  Vec2 origin;
  Vec2 direction;  // unit
  double length;
};

/// center + radius * (cos(phase + 2 pi t), sin(phase + 2 pi t)).
struct CircleCurve {
  Vec2 center;
  double radius;
  double phase;
};

/// Arc-length walk around an axis-aligned rectangle, counter-clockwise,
/// starting at one of its corners.
struct RectangleCurve {
  double x_min, x_max, y_min, y_max;
  int start_corner;  // 0 = (x_min, y_min), then counter-clockwise
};

using Curve = std::variant<LineCurve, CircleCurve, RectangleCurve>;

/// Line through p0 towards p1 with length stretch * |p1 - p0|.
LineCurve line_curve(Vec2 p0, Vec2 p1, double stretch);
/// p0 and p1 are diametrically opposite; t = 0 at p0.
CircleCurve circle_curve(Vec2 p0, Vec2 p1);
/// p0 and p1 are opposite corners; t = 0 at p0.
RectangleCurve rectangle_curve(Vec2 p0, Vec2 p1);

/// Curve for a shape family fitted to the first two samples of an N-object
/// sub-goal. Throws Error("degenerate_curve") when |p1 - p0| < 1e-6.
Curve make_curve(const PatternPrior& prior, Vec2 p0, Vec2 p1, int total);

Vec2 curve_point(const Curve& c, double t);
double curve_length(const Curve& c);
/// Heading of the curve tangent at t (rectangle corners take the incoming
/// edge).
double tangent_angle(const Curve& c, double t);

/// Curve parameter for the k-th sample (k >= 2) of an n-object sub-goal.
/// Lines use k / n. Closed curves use the slots j / n, j = 1..n-1, minus the
/// slot nearest p1 (which sits at t = 1/2).
double sample_parameter(PatternFamily family, int k, int total);

// --- spatial regions ---------------------------------------------------------

/// Axis-aligned region for the centre of an object placed relative to an
/// anchor.
struct SpatialRegion {
  Aabb box;
  bool contains(Vec2 p, double tol = 1e-12) const {
    return p.x >= box.x_min - tol && p.x <= box.x_max + tol && p.y >= box.y_min - tol &&
           p.y <= box.y_max + tol;
  }
  double area() const { return (box.x_max - box.x_min) * (box.y_max - box.y_min); }
};

/// Band on the named side(s) of the anchor's bounding box, clipped to the
/// workspace. Throws Error("infeasible_region") when nothing is left.
SpatialRegion spatial_region(const PatternPrior& prior, std::span<const Vec2> anchor_placed,
                             const Workspace& ws);

// --- sequential sampling -------------------------------------------------------

/// State of one sub-goal's sequential sampling: the poses drawn so far for
/// its first K objects, in listed order.
struct SamplingContext {
  const PatternPrior* pattern = nullptr;
  int total = 0;
  std::vector<Pose> sampled;
  // Placed footprint of the anchor (spatial patterns only).
  std::optional<Polygon> anchor;

  int k() const { return static_cast<int>(sampled.size()); }
};

/// Draws the next pose. Throws Error("exhausted") once every object of the
/// sub-goal has a pose, and propagates curve/region errors.
Pose sample_prior(const SamplingContext& ctx, const Workspace& ws, Rng& rng);

/// Unnormalised density matching sample_prior's generative rule: 1 / 0 on
/// the uniform cases, exp(-d^2 / 2 sigma^2) within the noise truncation on
/// the curve and tower cases.
double prior_density(const SamplingContext& ctx, const Workspace& ws, const Pose& p);

/// Uniform position in the workspace, uniform heading, table level.
Pose sample_uniform_pose(const Workspace& ws, Rng& rng);

// --- database --------------------------------------------------------------------

class PatternDb {
 public:
  /// line, circle, rectangle, tower, and spatial left/right/front/behind plus
  /// the four diagonal combinations. delta and sigma scale with the workspace
  /// diagonal (0.25 and 0.01 of it).
  static PatternDb builtin(const Workspace& ws);

  /// Applies a pattern-file document: a list of {name, keys, ordered, delta,
  /// sigma, params}. Existing names are updated field by field; new names
  /// need params.family.
  void apply_overrides(const Json& doc);

  std::span<const PatternPrior> priors() const { return priors_; }
  const PatternPrior* find(std::string_view name) const;
  /// Throws Error("unknown_pattern").
  const PatternPrior& get(std::string_view name) const;

 private:
  std::vector<PatternPrior> priors_;
};

}  // namespace lgplan
