#include "lgplan/grid.hpp"

#include <algorithm>
#include <numeric>

#include <omp.h>

namespace lgplan {

double Grid::max() const {
  return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

double Grid::mean() const {
  return values.empty() ? 0.0
                        : std::accumulate(values.begin(), values.end(), 0.0) /
                              static_cast<double>(values.size());
}

namespace {

Grid make_grid(int nx, int ny) {
  if (nx < 1 || ny < 1) throw Error("invalid_grid", "grid resolution must be positive");
  Grid g;
  g.nx = nx;
  g.ny = ny;
  g.values.assign(static_cast<std::size_t>(nx) * ny, 0.0);
  return g;
}

}  // namespace

Grid evaluate_grid_serial(const Workspace& ws, int nx, int ny, const CellFunction& f) {
  Grid g = make_grid(nx, ny);
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix)
      g.values[static_cast<std::size_t>(iy) * nx + ix] = f(g.center(ws, ix, iy));
  return g;
}

Grid evaluate_grid_parallel(const Workspace& ws, int nx, int ny, const CellFunction& f) {
  Grid g = make_grid(nx, ny);
  // Each cell is written by exactly one iteration, so the result does not
  // depend on the thread count.
#pragma omp parallel for schedule(static)
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix)
      g.values[static_cast<std::size_t>(iy) * nx + ix] = f(g.center(ws, ix, iy));
  return g;
}

Grid density_grid(const SamplingContext& ctx, const Workspace& ws, int resolution,
                  bool parallel) {
  const int level = ctx.pattern->family == PatternFamily::tower ? ctx.k() : 0;
  const CellFunction f = [&](Vec2 c) { return prior_density(ctx, ws, Pose(c.x, c.y, 0.0, level)); };
  return parallel ? evaluate_grid_parallel(ws, resolution, resolution, f)
                  : evaluate_grid_serial(ws, resolution, resolution, f);
}

Grid remaining_density_grid(const SamplingContext& ctx, const Workspace& ws, int resolution,
                            bool parallel) {
  Grid out = density_grid(ctx, ws, resolution, parallel);
  const PatternFamily family = ctx.pattern->family;
  const bool curve = family == PatternFamily::line || family == PatternFamily::circle ||
                     family == PatternFamily::rectangle;
  if (!curve || ctx.k() < 2) return out;
  // Later curve slots depend only on the first two poses and the slot index,
  // so padding the context selects them.
  SamplingContext later = ctx;
  while (later.k() + 1 < later.total) {
    later.sampled.push_back(later.sampled.back());
    const Grid g = density_grid(later, ws, resolution, parallel);
    for (std::size_t i = 0; i < out.values.size(); ++i)
      out.values[i] = std::max(out.values[i], g.values[i]);
  }
  return out;
}

double free_area_ratio(const Scene& scene, double side, int resolution, bool parallel) {
  const Workspace& ws = scene.workspace();
  std::vector<std::size_t> table;
  for (std::size_t i = 0; i < scene.size(); ++i)
    if (scene.poses()[i].level() == 0) table.push_back(i);
  const Footprint probe = Footprint::square(side);
  const CellFunction f = [&](Vec2 c) {
    const Polygon poly = transform_footprint(probe, Pose(c.x, c.y, 0.0));
    if (!in_workspace(poly, ws)) return 0.0;
    for (std::size_t i : table)
      if (footprints_overlap(poly, scene.placed(scene.objects()[i].id))) return 0.0;
    return 1.0;
  };
  const Grid g = parallel ? evaluate_grid_parallel(ws, resolution, resolution, f)
                          : evaluate_grid_serial(ws, resolution, resolution, f);
  return g.mean();
}

}  // namespace lgplan
