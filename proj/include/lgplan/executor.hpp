#pragma once

#include <optional>
#include <vector>

#include "lgplan/instruction.hpp"
#include "lgplan/json_lines.hpp"
#include "lgplan/planner.hpp"
#include "lgplan/scene.hpp"

namespace lgplan {

struct ReplayReport {
  bool ok = true;
  std::optional<std::size_t> failed_step;
  std::optional<ActionFailure> reason;
  Scene final_scene;
};

/// Applies the plan's actions in order and stops at the first illegal one.
/// Throws Error("unknown_object") if the plan names an id the scene lacks.
ReplayReport replay(const Scene& scene, const Plan& plan);

struct GoalCheck {
  std::vector<bool> subgoals;
  bool collision_free = true;
  bool overall = false;
};

/// Verifies the final arrangement from poses alone: each sub-goal's pattern
/// is re-fitted and every residual must be within tol_sigma_mult * sigma
/// (curve objects on the table, tower objects at levels 0..N-1 in list order);
/// spatial objects must lie in the region around the anchor's final pose;
/// and same-level footprints must not overlap.
GoalCheck check_goal(const Scene& scene, const GoalSpec& goal, const PatternDb& db,
                     double tol_sigma_mult = 4.0);

/// Largest perpendicular distance of the points from their total-least-
/// squares line.
double line_fit_residual(std::span<const Vec2> pts);

struct CircleFit {
  Vec2 center;
  double radius = 0.0;
  double max_residual = 0.0;  // largest | |p - c| - r |
};
/// Algebraic (Kasa) circle fit; nullopt for fewer than 3 or collinear points.
std::optional<CircleFit> kasa_circle_fit(std::span<const Vec2> pts);

struct RectangleFit {
  Aabb box;
  double max_residual = 0.0;  // largest distance to the perimeter
};
/// Axis-aligned rectangle fit by alternating edge assignment and per-edge
/// means, starting from the bounding box.
RectangleFit rectangle_fit(std::span<const Vec2> pts);

double distance_to_rectangle_perimeter(const Aabb& r, Vec2 p);

Json plan_to_json(const Plan& plan);
/// Throws Error("invalid_plan") on schema violations.
Plan plan_from_json(const Json& j);

Json replay_report_to_json(const ReplayReport& r);
Json goal_check_to_json(const GoalCheck& g);

}  // namespace lgplan
