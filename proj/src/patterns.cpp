#include "lgplan/patterns.hpp"

#include <algorithm>
#include <array>

#include "lgplan/error.hpp"

namespace lgplan {

std::string_view to_string(PatternFamily f) {
  switch (f) {
    case PatternFamily::line: return "line";
    case PatternFamily::circle: return "circle";
    case PatternFamily::rectangle: return "rectangle";
    case PatternFamily::tower: return "tower";
    case PatternFamily::spatial: return "spatial";
  }
  return "unknown";
}

namespace {

constexpr double kDegenerate = 1e-6;

void require_distinct(Vec2 p0, Vec2 p1) {
  if (norm(p1 - p0) < kDegenerate)
    throw Error("degenerate_curve", "degenerate curve: first two poses coincide");
}

std::array<Vec2, 4> corners(const RectangleCurve& r) {
  return {Vec2{r.x_min, r.y_min}, Vec2{r.x_max, r.y_min}, Vec2{r.x_max, r.y_max},
          Vec2{r.x_min, r.y_max}};
}

Vec2 sample_truncated_noise(double sigma, Rng& rng) {
  while (true) {
    const Vec2 e{sigma * rng.normal(), sigma * rng.normal()};
    if (norm(e) <= kNoiseTruncation * sigma) return e;
  }
}

double gaussian_density(double d, double sigma) {
  if (d > kNoiseTruncation * sigma) return 0.0;
  return std::exp(-d * d / (2.0 * sigma * sigma));
}

}  // namespace

LineCurve line_curve(Vec2 p0, Vec2 p1, double stretch) {
  require_distinct(p0, p1);
  const double d = norm(p1 - p0);
  return {p0, (1.0 / d) * (p1 - p0), stretch * d};
}

CircleCurve circle_curve(Vec2 p0, Vec2 p1) {
  require_distinct(p0, p1);
  const Vec2 c = 0.5 * (p0 + p1);
  const Vec2 r = p0 - c;
  return {c, norm(r), std::atan2(r.y, r.x)};
}

RectangleCurve rectangle_curve(Vec2 p0, Vec2 p1) {
  require_distinct(p0, p1);
  RectangleCurve r{std::min(p0.x, p1.x), std::max(p0.x, p1.x), std::min(p0.y, p1.y),
                   std::max(p0.y, p1.y), 0};
  const bool at_xmax = p0.x == r.x_max && p0.x != r.x_min;
  const bool at_ymax = p0.y == r.y_max && p0.y != r.y_min;
  if (!at_xmax && !at_ymax) r.start_corner = 0;
  else if (at_xmax && !at_ymax) r.start_corner = 1;
  else if (at_xmax && at_ymax) r.start_corner = 2;
  else r.start_corner = 3;
  return r;
}

Curve make_curve(const PatternPrior& prior, Vec2 p0, Vec2 p1, int total) {
  switch (prior.family) {
    case PatternFamily::line: return line_curve(p0, p1, prior.spacing * total);
    case PatternFamily::circle: return circle_curve(p0, p1);
    case PatternFamily::rectangle: return rectangle_curve(p0, p1);
    default: throw Error("no_curve", "pattern " + prior.name + " has no parametric curve");
  }
}

double curve_length(const Curve& c) {
  struct {
    double operator()(const LineCurve& l) const { return l.length; }
    double operator()(const CircleCurve& k) const { return 2.0 * kPi * k.radius; }
    double operator()(const RectangleCurve& r) const {
      return 2.0 * ((r.x_max - r.x_min) + (r.y_max - r.y_min));
    }
  } visitor;
  return std::visit(visitor, c);
}

Vec2 curve_point(const Curve& c, double t) {
  struct {
    double t;
    Vec2 operator()(const LineCurve& l) const { return l.origin + (t * l.length) * l.direction; }
    Vec2 operator()(const CircleCurve& k) const {
      const double a = k.phase + 2.0 * kPi * t;
      return k.center + k.radius * Vec2{std::cos(a), std::sin(a)};
    }
    Vec2 operator()(const RectangleCurve& r) const {
      const auto cs = corners(r);
      double d = std::clamp(t, 0.0, 1.0) * curve_length(r);
      for (int e = 0; e < 4; ++e) {
        const Vec2 a = cs[(r.start_corner + e) % 4], b = cs[(r.start_corner + e + 1) % 4];
        const double len = norm(b - a);
        if (len > 0.0 && d <= len) return a + (d / len) * (b - a);
        d -= len;
      }
      return cs[r.start_corner];
    }
  } visitor{t};
  return std::visit(visitor, c);
}

double tangent_angle(const Curve& c, double t) {
  struct {
    double t;
    double operator()(const LineCurve& l) const {
      return std::atan2(l.direction.y, l.direction.x);
    }
    double operator()(const CircleCurve& k) const {
      return normalize_angle(k.phase + 2.0 * kPi * t + 0.5 * kPi);
    }
    double operator()(const RectangleCurve& r) const {
      const auto cs = corners(r);
      const double total = curve_length(r);
      const double d = std::clamp(t, 0.0, 1.0) * total;
      // Edge whose arc-length interval (start, end] holds d. d = 0 never
      // matches and falls through to the closing edge.
      double start = 0.0;
      int incoming = 0;
      for (int e = 0; e < 4; ++e) {
        const Vec2 a = cs[(r.start_corner + e) % 4], b = cs[(r.start_corner + e + 1) % 4];
        const double len = norm(b - a);
        if (len > 0.0) {
          incoming = e;
          if (d > start && d <= start + len) break;
        }
        start += len;
      }
      const Vec2 a = cs[(r.start_corner + incoming) % 4];
      const Vec2 b = cs[(r.start_corner + incoming + 1) % 4];
      return std::atan2(b.y - a.y, b.x - a.x);
    }
  } visitor{t};
  return std::visit(visitor, c);
}

double sample_parameter(PatternFamily family, int k, int total) {
  if (k < 2 || k >= total) throw Error("bad_sample_index", "sample index out of range");
  if (family == PatternFamily::line) return static_cast<double>(k) / total;
  const int skipped = total / 2;
  int j = k - 1;  // k = 2 takes slot 1
  if (j >= skipped) ++j;
  return static_cast<double>(j) / total;
}

SpatialRegion spatial_region(const PatternPrior& prior, std::span<const Vec2> anchor_placed,
                             const Workspace& ws) {
  const Aabb b = bounding_box(anchor_placed);
  const double cx = 0.5 * (b.x_min + b.x_max), cy = 0.5 * (b.y_min + b.y_max);
  const double hx = 0.5 * (b.x_max - b.x_min) + prior.lateral_margin;
  const double hy = 0.5 * (b.y_max - b.y_min) + prior.lateral_margin;
  const double gx = prior.gap_max_fraction * ws.width();
  const double gy = prior.gap_max_fraction * ws.height();
  Aabb r{cx - hx, cx + hx, cy - hy, cy + hy};
  if (prior.sides & kRight) r.x_min = b.x_max + prior.gap_min, r.x_max = b.x_max + gx;
  if (prior.sides & kLeft) r.x_min = b.x_min - gx, r.x_max = b.x_min - prior.gap_min;
  if (prior.sides & kBehind) r.y_min = b.y_max + prior.gap_min, r.y_max = b.y_max + gy;
  if (prior.sides & kFront) r.y_min = b.y_min - gy, r.y_max = b.y_min - prior.gap_min;
  r.x_min = std::max(r.x_min, ws.x_min());
  r.x_max = std::min(r.x_max, ws.x_max());
  r.y_min = std::max(r.y_min, ws.y_min());
  r.y_max = std::min(r.y_max, ws.y_max());
  if (r.x_min > r.x_max || r.y_min > r.y_max)
    throw Error("infeasible_region", "infeasible region: " + prior.name +
                                         " of the anchor lies outside the workspace");
  return {r};
}

Pose sample_uniform_pose(const Workspace& ws, Rng& rng) {
  const double x = rng.uniform(ws.x_min(), ws.x_max());
  const double y = rng.uniform(ws.y_min(), ws.y_max());
  return Pose(x, y, rng.uniform(-kPi, kPi));
}

Pose sample_prior(const SamplingContext& ctx, const Workspace& ws, Rng& rng) {
  const PatternPrior& prior = *ctx.pattern;
  const int k = ctx.k();
  if (k >= ctx.total) throw Error("exhausted", "sub-goal already fully sampled");

  if (prior.is_spatial()) {
    if (!ctx.anchor) throw Error("missing_anchor", "spatial pattern without an anchor");
    const SpatialRegion region = spatial_region(prior, *ctx.anchor, ws);
    const double x = rng.uniform(region.box.x_min, region.box.x_max);
    const double y = rng.uniform(region.box.y_min, region.box.y_max);
    return Pose(x, y, rng.uniform(-kPi, kPi));
  }
  if (k == 0) return sample_uniform_pose(ws, rng);

  const Vec2 p0 = ctx.sampled[0].position();
  if (prior.family == PatternFamily::tower) {
    const Vec2 p = p0 + sample_truncated_noise(prior.sigma, rng);
    return Pose(p.x, p.y, rng.uniform(-kPi, kPi), k);
  }
  if (k == 1) {
    Vec2 p = p0;
    for (int attempt = 0; attempt < 10000; ++attempt) {
      const double r = prior.delta * std::sqrt(rng.uniform());
      const double a = rng.uniform(-kPi, kPi);
      p = p0 + r * Vec2{std::cos(a), std::sin(a)};
      if (ws.contains(p)) break;
    }
    return Pose(p.x, p.y, rng.uniform(-kPi, kPi));
  }

  const Curve curve = make_curve(prior, p0, ctx.sampled[1].position(), ctx.total);
  const double t = sample_parameter(prior.family, k, ctx.total);
  const Vec2 p = curve_point(curve, t) + sample_truncated_noise(prior.sigma, rng);
  return Pose(p.x, p.y, tangent_angle(curve, t));
}

double prior_density(const SamplingContext& ctx, const Workspace& ws, const Pose& p) {
  const PatternPrior& prior = *ctx.pattern;
  const int k = ctx.k();
  if (k >= ctx.total) return 0.0;
  const bool tower = prior.family == PatternFamily::tower;
  const int expected_level = tower ? k : 0;
  if (p.level() != expected_level || !ws.contains(p.position())) return 0.0;

  if (prior.is_spatial()) {
    if (!ctx.anchor) return 0.0;
    try {
      return spatial_region(prior, *ctx.anchor, ws).contains(p.position()) ? 1.0 : 0.0;
    } catch (const Error&) {
      return 0.0;
    }
  }
  if (k == 0) return 1.0;
  const Vec2 p0 = ctx.sampled[0].position();
  if (tower) return gaussian_density(norm(p.position() - p0), prior.sigma);
  if (k == 1) return norm(p.position() - p0) <= prior.delta ? 1.0 : 0.0;

  try {
    const Curve curve = make_curve(prior, p0, ctx.sampled[1].position(), ctx.total);
    const Vec2 target = curve_point(curve, sample_parameter(prior.family, k, ctx.total));
    return gaussian_density(norm(p.position() - target), prior.sigma);
  } catch (const Error&) {
    return 0.0;
  }
}

// --- database -----------------------------------------------------------------

PatternDb PatternDb::builtin(const Workspace& ws) {
  const double delta = 0.25 * ws.diagonal();
  const double sigma = 0.01 * ws.diagonal();
  auto make = [&](std::string name, PatternFamily family, std::vector<std::string> keys) {
    PatternPrior p;
    p.name = std::move(name);
    p.family = family;
    p.keys = std::move(keys);
    p.delta = delta;
    p.sigma = sigma;
    p.ordered = family == PatternFamily::tower;
    return p;
  };
  auto spatial = [&](std::string suffix, unsigned sides, std::vector<std::string> keys) {
    PatternPrior p = make("spatial:" + suffix, PatternFamily::spatial, std::move(keys));
    p.sides = sides;
    return p;
  };

  PatternDb db;
  db.priors_ = {
      make("line", PatternFamily::line,
           {"line", "row", "straight", "straight line", "lined up", "queue", "column"}),
      make("circle", PatternFamily::circle, {"circle", "ring", "round", "circular", "around"}),
      make("rectangle", PatternFamily::rectangle,
           {"rectangle", "rectangular", "square", "frame", "box shape"}),
      make("tower", PatternFamily::tower, {"tower", "stack", "pile", "on top", "stacked"}),
      spatial("left", kLeft, {"left", "left of", "to the left"}),
      spatial("right", kRight, {"right", "right of", "to the right"}),
      spatial("front", kFront, {"front", "in front of", "before"}),
      spatial("behind", kBehind, {"behind", "back", "rear"}),
      spatial("left_front", kLeft | kFront, {"left front", "front left"}),
      spatial("left_behind", kLeft | kBehind, {"left behind", "behind left", "back left"}),
      spatial("right_front", kRight | kFront, {"right front", "front right"}),
      spatial("right_behind", kRight | kBehind, {"right behind", "behind right", "back right"}),
  };
  return db;
}

const PatternPrior* PatternDb::find(std::string_view name) const {
  for (const PatternPrior& p : priors_)
    if (p.name == name) return &p;
  return nullptr;
}

const PatternPrior& PatternDb::get(std::string_view name) const {
  if (const PatternPrior* p = find(name)) return *p;
  throw Error("unknown_pattern", "unknown pattern: " + std::string(name));
}

namespace {

PatternFamily family_from_string(const std::string& s) {
  for (PatternFamily f : {PatternFamily::line, PatternFamily::circle, PatternFamily::rectangle,
                          PatternFamily::tower, PatternFamily::spatial})
    if (to_string(f) == s) return f;
  throw Error("invalid_patterns", "unknown pattern family: " + s);
}

}  // namespace

void PatternDb::apply_overrides(const Json& doc) {
  if (!doc.is_array()) throw Error("invalid_patterns", "pattern file must be a list");
  for (const Json& entry : doc) {
    if (!entry.is_object() || !entry.contains("name") || !entry["name"].is_string())
      throw Error("invalid_patterns", "pattern entries need a \"name\"");
    for (const auto& [key, value] : entry.items()) {
      if (key != "name" && key != "keys" && key != "ordered" && key != "delta" &&
          key != "sigma" && key != "params")
        throw Error("invalid_patterns", "unknown pattern field \"" + key + "\"");
    }
    const std::string name = entry["name"].get<std::string>();
    PatternPrior* target = nullptr;
    for (PatternPrior& p : priors_)
      if (p.name == name) target = &p;
    if (!target) {
      const Json params = entry.value("params", Json::object());
      if (!params.contains("family"))
        throw Error("invalid_patterns", "new pattern " + name + " needs params.family");
      PatternPrior p = priors_.empty() ? PatternPrior{} : priors_.front();
      p.name = name;
      p.keys = {name};
      p.family = family_from_string(params["family"].get<std::string>());
      p.sides = 0;
      p.ordered = p.family == PatternFamily::tower;
      priors_.push_back(p);
      target = &priors_.back();
    }
    try {
      if (entry.contains("keys")) target->keys = entry["keys"].get<std::vector<std::string>>();
      if (entry.contains("ordered")) target->ordered = entry["ordered"].get<bool>();
      if (entry.contains("delta")) target->delta = entry["delta"].get<double>();
      if (entry.contains("sigma")) target->sigma = entry["sigma"].get<double>();
      if (entry.contains("params")) {
        for (const auto& [key, value] : entry["params"].items()) {
          if (key == "family") continue;
          if (key == "spacing") target->spacing = value.get<double>();
          else if (key == "gap_min") target->gap_min = value.get<double>();
          else if (key == "gap_max_fraction") target->gap_max_fraction = value.get<double>();
          else if (key == "lateral_margin") target->lateral_margin = value.get<double>();
          else if (key == "sides") {
            unsigned sides = 0;
            for (const auto& s : value.get<std::vector<std::string>>()) {
              if (s == "left") sides |= kLeft;
              else if (s == "right") sides |= kRight;
              else if (s == "front") sides |= kFront;
              else if (s == "behind") sides |= kBehind;
              else throw Error("invalid_patterns", "unknown side " + s);
            }
            target->sides = sides;
          } else {
            throw Error("invalid_patterns", "unknown pattern parameter \"" + key + "\"");
          }
        }
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error("invalid_patterns", "pattern " + name + ": " + e.what());
    }
    if (!(target->delta > 0.0) || !(target->sigma > 0.0))
      throw Error("invalid_patterns", "pattern " + name + " needs delta > 0 and sigma > 0");
    if (target->keys.empty()) throw Error("invalid_patterns", "pattern " + name + " has no keys");
    if (target->is_spatial() && target->sides == 0)
      throw Error("invalid_patterns", "spatial pattern " + name + " needs params.sides");
  }
}

}  // namespace lgplan
