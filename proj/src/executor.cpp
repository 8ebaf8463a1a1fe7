#include "lgplan/executor.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "lgplan/scene_io.hpp"

namespace lgplan {

ReplayReport replay(const Scene& scene, const Plan& plan) {
  for (const Action& a : plan.actions)
    if (!scene.contains(a.object_id))
      throw Error("unknown_object", "plan moves unknown object o" + std::to_string(a.object_id));

  ReplayReport r{.ok = true, .failed_step = std::nullopt, .reason = std::nullopt,
                 .final_scene = scene};
  for (std::size_t i = 0; i < plan.actions.size(); ++i) {
    const Action& a = plan.actions[i];
    if (const auto f = r.final_scene.check_action(a.object_id, a.target)) {
      r.ok = false;
      r.failed_step = i;
      r.reason = f;
      return r;
    }
    r.final_scene = r.final_scene.apply_action(a.object_id, a.target);
  }
  return r;
}

// --- fits ------------------------------------------------------------------------

double line_fit_residual(std::span<const Vec2> pts) {
  if (pts.size() < 3) return 0.0;
  Vec2 c{0.0, 0.0};
  for (Vec2 p : pts) c = c + p;
  c = c * (1.0 / static_cast<double>(pts.size()));
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (Vec2 p : pts) {
    const Vec2 d = p - c;
    sxx += d.x * d.x;
    sxy += d.x * d.y;
    syy += d.y * d.y;
  }
  const double phi = 0.5 * std::atan2(2.0 * sxy, sxx - syy);
  const Vec2 n{-std::sin(phi), std::cos(phi)};
  double worst = 0.0;
  for (Vec2 p : pts) worst = std::max(worst, std::abs(dot(p - c, n)));
  return worst;
}

namespace {

// Solves the 3x3 system m x = b by Gaussian elimination with partial
// pivoting; false when (numerically) singular.
bool solve3(std::array<std::array<double, 3>, 3> m, std::array<double, 3> b,
            std::array<double, 3>& x) {
  double scale = 0.0;
  for (const auto& row : m)
    for (double v : row) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return false;
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    if (std::abs(m[piv][col]) <= 1e-12 * scale) return false;
    std::swap(m[piv], m[col]);
    std::swap(b[piv], b[col]);
    for (int r = col + 1; r < 3; ++r) {
      const double f = m[r][col] / m[col][col];
      for (int k = col; k < 3; ++k) m[r][k] -= f * m[col][k];
      b[r] -= f * b[col];
    }
  }
  for (int r = 2; r >= 0; --r) {
    double s = b[r];
    for (int k = r + 1; k < 3; ++k) s -= m[r][k] * x[k];
    x[r] = s / m[r][r];
  }
  return true;
}

double max_radial_residual(std::span<const Vec2> pts, Vec2 c, double r) {
  double worst = 0.0;
  for (Vec2 p : pts) worst = std::max(worst, std::abs(norm(p - c) - r));
  return worst;
}

double max_perimeter_residual(std::span<const Vec2> pts, const Aabb& box) {
  double worst = 0.0;
  for (Vec2 p : pts) worst = std::max(worst, distance_to_rectangle_perimeter(box, p));
  return worst;
}

}  // namespace

std::optional<CircleFit> kasa_circle_fit(std::span<const Vec2> pts) {
  if (pts.size() < 3) return std::nullopt;
  // Centred coordinates keep the normal equations well conditioned.
  Vec2 m{0.0, 0.0};
  for (Vec2 p : pts) m = m + p;
  m = m * (1.0 / static_cast<double>(pts.size()));

  // Least squares for x^2 + y^2 + D x + E y + F = 0.
  std::array<std::array<double, 3>, 3> ata{};
  std::array<double, 3> atb{};
  for (Vec2 p : pts) {
    const Vec2 d = p - m;
    const std::array<double, 3> row{d.x, d.y, 1.0};
    const double rhs = -(d.x * d.x + d.y * d.y);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) ata[i][j] += row[i] * row[j];
      atb[i] += row[i] * rhs;
    }
  }
  std::array<double, 3> sol{};
  if (!solve3(ata, atb, sol)) return std::nullopt;
  const Vec2 c{-0.5 * sol[0], -0.5 * sol[1]};
  const double r2 = c.x * c.x + c.y * c.y - sol[2];
  if (!(r2 > 0.0) || !std::isfinite(r2)) return std::nullopt;
  CircleFit fit;
  fit.center = c + m;
  fit.radius = std::sqrt(r2);
  fit.max_residual = max_radial_residual(pts, fit.center, fit.radius);
  return fit;
}

double distance_to_rectangle_perimeter(const Aabb& r, Vec2 p) {
  const double dx = std::max({r.x_min - p.x, 0.0, p.x - r.x_max});
  const double dy = std::max({r.y_min - p.y, 0.0, p.y - r.y_max});
  if (dx > 0.0 || dy > 0.0) return std::hypot(dx, dy);
  return std::min({p.x - r.x_min, r.x_max - p.x, p.y - r.y_min, r.y_max - p.y});
}

RectangleFit rectangle_fit(std::span<const Vec2> pts) {
  RectangleFit fit;
  if (pts.empty()) return fit;
  fit.box = bounding_box(pts);
  std::vector<int> edge(pts.size(), -1);
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    std::array<double, 4> sum{};
    std::array<int, 4> count{};
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Vec2 p = pts[i];
      const std::array<double, 4> d{std::abs(p.x - fit.box.x_min), std::abs(p.x - fit.box.x_max),
                                    std::abs(p.y - fit.box.y_min), std::abs(p.y - fit.box.y_max)};
      const int e = static_cast<int>(std::min_element(d.begin(), d.end()) - d.begin());
      changed = changed || e != edge[i];
      edge[i] = e;
      sum[e] += e < 2 ? p.x : p.y;
      ++count[e];
    }
    if (!changed && iter > 0) break;
    if (count[0]) fit.box.x_min = sum[0] / count[0];
    if (count[1]) fit.box.x_max = sum[1] / count[1];
    if (count[2]) fit.box.y_min = sum[2] / count[2];
    if (count[3]) fit.box.y_max = sum[3] / count[3];
  }
  fit.max_residual = max_perimeter_residual(pts, fit.box);
  return fit;
}

// --- goal verification ---------------------------------------------------------------

namespace {

// Every curve instance is fixed by two of its poses (line: two points on it,
// circle: a diameter, rectangle: opposite corners). When the least-squares
// fit misses, each pair of points is tried as that defining pair, so an
// arrangement whose points all sit within tol of some instance through two
// of them is never rejected because of the fit's own bias.
bool curve_pair_hypothesis(PatternFamily family, std::span<const Vec2> pts, double tol,
                           double max_radius) {
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const Vec2 a = pts[i], b = pts[j];
      const double len = norm(b - a);
      if (len < 1e-9) continue;
      double worst = 0.0;
      if (family == PatternFamily::line) {
        const Vec2 u = (b - a) * (1.0 / len);
        for (Vec2 p : pts) worst = std::max(worst, std::abs(cross(u, p - a)));
      } else if (family == PatternFamily::circle) {
        if (0.5 * len > max_radius) continue;
        worst = max_radial_residual(pts, (a + b) * 0.5, 0.5 * len);
      } else {
        const Aabb box{std::min(a.x, b.x), std::max(a.x, b.x), std::min(a.y, b.y),
                       std::max(a.y, b.y)};
        worst = max_perimeter_residual(pts, box);
      }
      if (worst <= tol) return true;
    }
  return false;
}

bool check_curve(PatternFamily family, std::span<const Vec2> pts, double tol, double max_radius) {
  if (pts.size() <= 2) {
    if (family != PatternFamily::circle || pts.size() < 2) return true;
    return 0.5 * norm(pts[1] - pts[0]) <= max_radius;
  }
  bool fitted = false;
  switch (family) {
    case PatternFamily::line:
      fitted = line_fit_residual(pts) <= tol;
      break;
    case PatternFamily::circle: {
      const auto fit = kasa_circle_fit(pts);
      fitted = fit && fit->radius <= max_radius && fit->max_residual <= tol;
      break;
    }
    case PatternFamily::rectangle:
      fitted = rectangle_fit(pts).max_residual <= tol;
      break;
    default:
      break;
  }
  return fitted || curve_pair_hypothesis(family, pts, tol, max_radius);
}

bool check_tower(const Scene& scene, const std::vector<int>& objects, double tol) {
  // Listed bottom-first: the i-th object sits at level i over the base.
  const Vec2 base = scene.pose(objects.front()).position();
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const Pose& p = scene.pose(objects[i]);
    if (p.level() != static_cast<int>(i)) return false;
    if (norm(p.position() - base) > tol) return false;
  }
  return true;
}

}  // namespace

GoalCheck check_goal(const Scene& scene, const GoalSpec& goal, const PatternDb& db,
                     double tol_sigma_mult) {
  validate_goal(goal, db, scene);
  GoalCheck out;
  const Workspace& ws = scene.workspace();
  for (const SubGoal& sg : goal.subgoals) {
    const PatternPrior& prior = db.get(sg.pattern);
    const double tol = tol_sigma_mult * prior.sigma;
    bool ok = false;
    switch (prior.family) {
      case PatternFamily::line:
      case PatternFamily::circle:
      case PatternFamily::rectangle: {
        // Curve arrangements rest on the table; a stack is not a line.
        std::vector<Vec2> pts;
        bool on_table = true;
        for (int id : sg.objects) {
          pts.push_back(scene.pose(id).position());
          on_table = on_table && scene.pose(id).level() == 0;
        }
        ok = on_table && check_curve(prior.family, pts, tol, ws.diagonal());
        break;
      }
      case PatternFamily::tower:
        ok = check_tower(scene, sg.objects, tol);
        break;
      case PatternFamily::spatial:
        try {
          const SpatialRegion region = spatial_region(prior, scene.placed(*sg.anchor), ws);
          ok = std::all_of(sg.objects.begin(), sg.objects.end(),
                           [&](int id) { return region.contains(scene.pose(id).position()); });
        } catch (const Error&) {
          ok = false;
        }
        break;
    }
    out.subgoals.push_back(ok);
  }

  const auto objs = scene.objects();
  for (std::size_t i = 0; i < objs.size() && out.collision_free; ++i) {
    const Polygon& a = scene.placed(objs[i].id);
    if (!in_workspace(a, ws)) out.collision_free = false;
    for (std::size_t j = i + 1; j < objs.size() && out.collision_free; ++j)
      if (scene.poses()[i].level() == scene.poses()[j].level() &&
          footprints_overlap(a, scene.placed(objs[j].id)))
        out.collision_free = false;
  }
  out.overall = out.collision_free &&
                std::all_of(out.subgoals.begin(), out.subgoals.end(), [](bool b) { return b; });
  return out;
}

// --- JSON ----------------------------------------------------------------------------

Json plan_to_json(const Plan& plan) {
  Json actions = Json::array();
  for (const Action& a : plan.actions)
    actions.push_back({{"object", a.object_id},
                       {"x", a.target.x()},
                       {"y", a.target.y()},
                       {"theta", a.target.theta()},
                       {"level", a.target.level()},
                       {"kind", std::string(to_string(a.kind))}});
  return {{"seed", plan.seed}, {"steps_used", plan.steps_used}, {"actions", actions}};
}

Plan plan_from_json(const Json& j) {
  try {
    Plan plan;
    if (!j.is_object()) throw Error("invalid_plan", "plan must be a JSON object");
    for (const auto& [key, _] : j.items())
      if (key != "seed" && key != "steps_used" && key != "actions")
        throw Error("invalid_plan", "unknown plan field \"" + key + "\"");
    plan.seed = j.at("seed").get<std::uint64_t>();
    plan.steps_used = j.at("steps_used").get<int>();
    for (const Json& a : j.at("actions")) {
      for (const auto& [key, _] : a.items())
        if (key != "object" && key != "x" && key != "y" && key != "theta" && key != "level" &&
            key != "kind")
          throw Error("invalid_plan", "unknown action field \"" + key + "\"");
      const auto kind = parse_action_kind(a.at("kind").get<std::string>());
      if (!kind) throw Error("invalid_plan", "unknown action kind " + a.at("kind").dump());
      plan.actions.push_back(Action{a.at("object").get<int>(),
                                    Pose(a.at("x").get<double>(), a.at("y").get<double>(),
                                         a.at("theta").get<double>(), a.at("level").get<int>()),
                                    *kind});
    }
    return plan;
  } catch (const Json::exception& e) {
    throw Error("invalid_plan", std::string("malformed plan JSON: ") + e.what());
  }
}

Json replay_report_to_json(const ReplayReport& r) {
  Json j;
  j["ok"] = r.ok;
  j["failed_step"] = r.failed_step ? Json(*r.failed_step) : Json(nullptr);
  j["reason"] = r.reason ? Json(std::string(to_string(*r.reason))) : Json(nullptr);
  j["final_scene"] = scene_to_json(r.final_scene);
  return j;
}

Json goal_check_to_json(const GoalCheck& g) {
  return {{"subgoals", g.subgoals}, {"collision_free", g.collision_free}, {"overall", g.overall}};
}

}  // namespace lgplan
