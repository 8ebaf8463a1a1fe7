#pragma once

#include <functional>
#include <vector>

#include "lgplan/geometry.hpp"
#include "lgplan/patterns.hpp"
#include "lgplan/scene.hpp"

namespace lgplan {

/// Values at the centres of an nx-by-ny cell grid over the workspace, row
/// by row from y_min (row 0) upwards.
struct Grid {
  int nx = 0;
  int ny = 0;
  std::vector<double> values;

  double at(int ix, int iy) const { return values[static_cast<std::size_t>(iy) * nx + ix]; }
  Vec2 center(const Workspace& ws, int ix, int iy) const {
    return {ws.x_min() + (ix + 0.5) * ws.width() / nx, ws.y_min() + (iy + 0.5) * ws.height() / ny};
  }
  double max() const;
  double mean() const;
};

using CellFunction = std::function<double(Vec2)>;

/// Reference implementation.
Grid evaluate_grid_serial(const Workspace& ws, int nx, int ny, const CellFunction& f);
/// Same values, rows split across OpenMP threads. `f` must be thread-safe.
Grid evaluate_grid_parallel(const Workspace& ws, int nx, int ny, const CellFunction& f);

/// prior_density over (x, y) at heading 0 and the sub-goal's next level.
Grid density_grid(const SamplingContext& ctx, const Workspace& ws, int resolution,
                  bool parallel = true);

/// Pointwise maximum of density_grid over every slot still open in the
/// sub-goal, so a curve prior with K >= 2 shows all remaining target
/// positions along the curve rather than only the next one.
Grid remaining_density_grid(const SamplingContext& ctx, const Workspace& ws, int resolution,
                            bool parallel = true);

/// Fraction of grid cells where an axis-aligned square of side `side`
/// centred on the cell lies in the workspace and overlaps no table-level
/// object.
double free_area_ratio(const Scene& scene, double side, int resolution = 64,
                       bool parallel = true);

}  // namespace lgplan
