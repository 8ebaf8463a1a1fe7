#pragma once

#include <string>
#include <vector>

#include "lgplan/grid.hpp"
#include "lgplan/planner.hpp"
#include "lgplan/scene.hpp"

namespace lgplan {

struct SvgArrow {
  Vec2 from;
  Vec2 to;
  int number = 0;
};

struct SvgLayers {
  // Drawn under the objects as a grayscale image, black = 0, white = max.
  const Grid* density = nullptr;
  std::vector<SvgArrow> arrows;
  // Dashed outlines of objects at other poses (plan targets).
  std::vector<std::pair<int, Pose>> ghosts;
  std::string title;
};

/// Deterministic SVG of the table: density cells, objects as filled
/// polygons with id labels (bottom level first), ghosts, numbered arrows.
std::string render_svg(const Scene& scene, const SvgLayers& layers = {});

/// One arrow per plan action, from the object's position before the action
/// to its target, numbered from 1. Stops at the first inapplicable action.
std::vector<SvgArrow> plan_arrows(const Scene& start, const Plan& plan);

}  // namespace lgplan
