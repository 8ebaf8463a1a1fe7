#include <cmath>

#include "doctest.h"
#include "lgplan/error.hpp"
#include "lgplan/patterns.hpp"
#include "stats.hpp"

using namespace lgplan;

namespace {

Vec2 at(const Curve& c, double t) { return curve_point(c, t); }

void check_point(Vec2 got, Vec2 want, double tol = 1e-12) {
  CHECK(got.x == doctest::Approx(want.x).epsilon(tol).scale(1.0));
  CHECK(got.y == doctest::Approx(want.y).epsilon(tol).scale(1.0));
}

PatternPrior with_sigma(const PatternDb& db, std::string_view name, double sigma) {
  PatternPrior p = db.get(name);
  p.sigma = sigma;
  return p;
}

}  // namespace

TEST_CASE("line curve example") {
  const LineCurve l = line_curve({0, 0}, {1, 0}, 4.0 / 2.0);
  CHECK(l.length == doctest::Approx(2.0));
  check_point(at(l, 1.0), {2, 0});
  check_point(at(l, 0.0), {0, 0});
}

TEST_CASE("circle curve example") {
  // t = 0 sits at p0; p0 and p1 are diametric.
  const CircleCurve c = circle_curve({1, 0}, {-1, 0});
  check_point(c.center, {0, 0});
  CHECK(c.radius == doctest::Approx(1.0));
  check_point(at(c, 0.25), {0, 1});
  check_point(at(c, 0.5), {-1, 0});
}

TEST_CASE("rectangle curve example") {
  const RectangleCurve r = rectangle_curve({0, 0}, {2, 1});
  CHECK(curve_length(r) == doctest::Approx(6.0));
  check_point(at(r, 1.0 / 3.0), {2, 0});
  check_point(at(r, 0.5), {2, 1});
  check_point(at(r, 0.0), {0, 0});
  // Starting at the opposite corner walks from there.
  const RectangleCurve s = rectangle_curve({2, 1}, {0, 0});
  check_point(at(s, 1.0 / 3.0), {0, 1});
}

TEST_CASE("tangent angle examples") {
  CHECK(tangent_angle(line_curve({0, 0}, {1, 0}, 2), 0.5) == doctest::Approx(0.0));
  CHECK(tangent_angle(line_curve({0, 0}, {0, 1}, 2), 0.5) == doctest::Approx(kPi / 2));
  CHECK(tangent_angle(circle_curve({1, 0}, {-1, 0}), 0.0) == doctest::Approx(kPi / 2));
  // Rectangle corner: the incoming (bottom) edge heads along +x.
  CHECK(tangent_angle(rectangle_curve({0, 0}, {2, 1}), 1.0 / 3.0) == doctest::Approx(0.0));
  CHECK(tangent_angle(rectangle_curve({0, 0}, {2, 1}), 0.4) == doctest::Approx(kPi / 2));
}

TEST_CASE("degenerate curves are rejected") {
  for (auto make : {+[] { line_curve({0, 0}, {0, 1e-7}, 2); },
                    +[] { circle_curve({0, 0}, {1e-7, 0}); },
                    +[] { rectangle_curve({0, 0}, {0, 0}); }}) {
    try {
      make();
      FAIL("expected degenerate_curve");
    } catch (const Error& e) {
      CHECK(e.code() == "degenerate_curve");
    }
  }
}

TEST_CASE("curves are equivariant under rigid motions") {
  Rng rng(17);
  for (int i = 0; i < 100; ++i) {
    const Vec2 p0{rng.uniform(-1, 1), rng.uniform(-1, 1)}, p1{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const double a = rng.uniform(-kPi, kPi);
    const Vec2 shift{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    auto T = [&](Vec2 p) { return rotate(p, a) + shift; };
    auto M = [](Vec2 p) { return Vec2{-p.x, p.y}; };
    const LineCurve l = line_curve(p0, p1, 3), lt = line_curve(T(p0), T(p1), 3),
                    lm = line_curve(M(p0), M(p1), 3);
    const CircleCurve c = circle_curve(p0, p1), ct = circle_curve(T(p0), T(p1)),
                      cm = circle_curve(M(p0), M(p1));
    const RectangleCurve r = rectangle_curve(p0, p1), rt = rectangle_curve(p0 + shift, p1 + shift);
    for (double t : {0.0, 0.1, 0.37, 0.5, 0.81, 1.0}) {
      check_point(at(lt, t), T(at(l, t)), 1e-9);
      check_point(at(lm, t), M(at(l, t)), 1e-9);
      check_point(at(ct, t), T(at(c, t)), 1e-9);
      // A reflection reverses the direction of travel around the circle.
      check_point(at(cm, t), M(at(c, 1.0 - t)), 1e-9);
      check_point(at(rt, t), at(r, t) + shift, 1e-9);
    }
  }
}

TEST_CASE("sample_prior examples") {
  const Workspace ws(-3, 3, -3, 3);
  const PatternDb db = PatternDb::builtin(ws);
  Rng rng(1);

  SamplingContext k0{&db.get("line"), 4, {}, std::nullopt};
  for (int i = 0; i < 1000; ++i) CHECK(ws.contains(sample_prior(k0, ws, rng).position()));

  SamplingContext k1{&db.get("line"), 4, {Pose(0, 0, 0)}, std::nullopt};
  for (int i = 0; i < 1000; ++i)
    CHECK(norm(sample_prior(k1, ws, rng).position()) <= db.get("line").delta + 1e-12);

  // N=4, K=2 line through (0,0) and (1,0): slot k sits k * |p1 - p0| from p0.
  const PatternPrior line = with_sigma(db, "line", 0.005);
  SamplingContext k2{&line, 4, {Pose(0, 0, 0), Pose(1, 0, 0)}, std::nullopt};
  const Vec2 target = at(make_curve(line, {0, 0}, {1, 0}, 4), 2.0 / 4.0);
  check_point(target, {2, 0});
  Vec2 sum{};
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const Pose p = sample_prior(k2, ws, rng);
    CHECK(norm(p.position() - target) <= 4 * line.sigma + 1e-12);
    CHECK(p.theta() == doctest::Approx(0.0));
    sum = sum + p.position();
  }
  const Vec2 mean = (1.0 / n) * sum;
  CHECK(std::abs(mean.x - 2.0) < 3 * line.sigma / std::sqrt(n));
  CHECK(std::abs(mean.y) < 3 * line.sigma / std::sqrt(n));

  SamplingContext full{&line, 2, {Pose(0, 0, 0), Pose(1, 0, 0)}, std::nullopt};
  try {
    sample_prior(full, ws, rng);
    FAIL("expected exhausted");
  } catch (const Error& e) {
    CHECK(e.code() == "exhausted");
  }
}

TEST_CASE("prior_density examples") {
  const Workspace ws(-3, 3, -3, 3);
  const PatternDb db = PatternDb::builtin(ws);
  const PatternPrior& line = db.get("line");
  SamplingContext k0{&line, 4, {}, std::nullopt};
  CHECK(prior_density(k0, ws, Pose(1.2, -2.5, 0.3)) == 1.0);
  CHECK(prior_density(k0, ws, Pose(4, 0, 0)) == 0.0);
  SamplingContext k1{&line, 4, {Pose(0, 0, 0)}, std::nullopt};
  CHECK(prior_density(k1, ws, Pose(2 * line.delta, 0, 0)) == 0.0);
  CHECK(prior_density(k1, ws, Pose(0.5 * line.delta, 0, 0)) == 1.0);
  SamplingContext k2{&line, 4, {Pose(0, 0, 0), Pose(0.5, 0, 0)}, std::nullopt};
  CHECK(prior_density(k2, ws, Pose(1.0, 0, 0)) == 1.0);
  CHECK(prior_density(k2, ws, Pose(1.0, 5 * line.sigma, 0)) == 0.0);
  CHECK(prior_density(k2, ws, Pose(1.0, line.sigma, 0)) == doctest::Approx(std::exp(-0.5)));
}

TEST_CASE("sampler and density agree") {
  const Workspace ws(0, 1, 0, 0.8);
  const PatternDb db = PatternDb::builtin(ws);
  const Polygon anchor = transform_footprint(Footprint::square(0.06), Pose(0.5, 0.4, 0.2));
  std::vector<SamplingContext> contexts = {
      {&db.get("line"), 5, {}, std::nullopt},
      {&db.get("line"), 5, {Pose(0.4, 0.4, 0)}, std::nullopt},
      {&db.get("line"), 5, {Pose(0.3, 0.4, 0), Pose(0.4, 0.45, 0)}, std::nullopt},
      {&db.get("circle"), 6, {Pose(0.3, 0.4, 0), Pose(0.6, 0.4, 0), Pose(0.4, 0.5, 0)}, std::nullopt},
      {&db.get("rectangle"), 6, {Pose(0.3, 0.3, 0), Pose(0.6, 0.5, 0)}, std::nullopt},
      {&db.get("tower"), 3, {Pose(0.5, 0.5, 0)}, std::nullopt},
      {&db.get("spatial:left_behind"), 1, {}, anchor},
  };
  Rng rng(23);
  for (const SamplingContext& ctx : contexts) {
    int positive = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i)
      if (prior_density(ctx, ws, sample_prior(ctx, ws, rng)) > 0.0) ++positive;
    CHECK(positive >= 0.999 * n);
  }
}

TEST_CASE("K=0 samples are uniform over the workspace") {
  const Workspace ws(0, 1, 0, 0.8);
  const PatternDb db = PatternDb::builtin(ws);
  const SamplingContext ctx{&db.get("line"), 3, {}, std::nullopt};
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    std::vector<double> counts(64, 0.0);
    const int n = 6400;
    for (int i = 0; i < n; ++i) {
      const Vec2 p = sample_prior(ctx, ws, rng).position();
      const int ix = std::min(7, static_cast<int>(p.x / ws.width() * 8));
      const int iy = std::min(7, static_cast<int>(p.y / ws.height() * 8));
      counts[static_cast<std::size_t>(iy * 8 + ix)] += 1.0;
    }
    CHECK(test_stats::chi_square_uniform_p(counts) > 0.001);
  }
}

TEST_CASE("line and circle noise statistics") {
  const Workspace ws(-3, 3, -3, 3);
  const PatternDb db = PatternDb::builtin(ws);
  const double sigma = 0.005;
  Rng rng(31);

  const PatternPrior line = with_sigma(db, "line", sigma);
  double sq = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const int k = 2 + static_cast<int>(rng.index(4));
    SamplingContext ctx{&line, 6, {Pose(-1, -0.5, 0), Pose(-0.8, -0.4, 0)}, std::nullopt};
    while (ctx.k() < k) ctx.sampled.push_back(Pose(0, 0, 0));
    const Vec2 p = sample_prior(ctx, ws, rng).position();
    const Vec2 d = Vec2{0.2, 0.1};
    const double perp = cross(d, p - Vec2{-1, -0.5}) / norm(d);
    sq += perp * perp;
  }
  const double rms = std::sqrt(sq / n);
  CHECK(rms >= 0.5 * sigma);
  CHECK(rms <= 1.5 * sigma);

  const PatternPrior circle = with_sigma(db, "circle", sigma);
  const SamplingContext ctx{&circle, 6, {Pose(-1, 0, 0), Pose(1, 0, 0)}, std::nullopt};
  std::vector<double> radii;
  for (int i = 0; i < n; ++i) radii.push_back(norm(sample_prior(ctx, ws, rng).position()));
  const double mean = test_stats::mean(radii);
  CHECK(std::abs(mean - 1.0) <= 3.0 * test_stats::stddev(radii) / std::sqrt(n));
}

TEST_CASE("tower levels follow the sampling order") {
  const Workspace ws(0, 1, 0, 1);
  const PatternDb db = PatternDb::builtin(ws);
  Rng rng(4);
  SamplingContext ctx{&db.get("tower"), 4, {}, std::nullopt};
  for (int k = 0; k < 4; ++k) {
    const Pose p = sample_prior(ctx, ws, rng);
    CHECK(p.level() == k);
    ctx.sampled.push_back(p);
  }
  CHECK(db.get("tower").ordered);
}

TEST_CASE("spatial regions") {
  const Workspace ws(-1, 0, -1, 1);
  const Workspace ws1(-0.5, 0.5, -0.5, 0.5);
  const PatternDb db = PatternDb::builtin(ws1);
  const Polygon anchor = transform_footprint(Footprint::square(0.1), Pose(0, 0, 0));
  const SpatialRegion right = spatial_region(db.get("spatial:right"), anchor, ws1);
  CHECK(right.box.x_min == doctest::Approx(0.05));
  CHECK(right.box.x_max == doctest::Approx(0.35));
  CHECK(right.box.y_min == doctest::Approx(-0.1));
  CHECK(right.box.y_max == doctest::Approx(0.1));
  CHECK(right.contains({0.2, 0.0}));
  CHECK(right.contains({0.34, 0.09}));
  CHECK_FALSE(right.contains({0.0, 0.0}));
  CHECK_FALSE(right.contains({-0.2, 0.0}));
  CHECK_FALSE(right.contains({0.2, 0.2}));

  // Mirroring the anchor mirrors the region of the mirrored relation.
  const Polygon off = transform_footprint(Footprint::rectangle(0.1, 0.04), Pose(0.12, 0.03, 0.4));
  Polygon mirrored;
  for (auto it = off.rbegin(); it != off.rend(); ++it) mirrored.push_back({-it->x, it->y});
  const SpatialRegion l = spatial_region(db.get("spatial:left"), off, ws1);
  const SpatialRegion r = spatial_region(db.get("spatial:right"), mirrored, ws1);
  CHECK(l.box.x_min == doctest::Approx(-r.box.x_max));
  CHECK(l.box.x_max == doctest::Approx(-r.box.x_min));
  CHECK(l.box.y_min == doctest::Approx(r.box.y_min));
  CHECK(l.box.y_max == doctest::Approx(r.box.y_max));

  const SpatialRegion lb = spatial_region(db.get("spatial:left_behind"), anchor, ws1);
  CHECK(lb.area() > 0.0);
  CHECK(lb.box.x_max <= -0.05 + 1e-12);
  CHECK(lb.box.y_min >= 0.05 - 1e-12);

  // The anchor touches the right edge of this table: nothing is right of it.
  const Polygon edge = transform_footprint(Footprint::square(0.1), Pose(-0.04, 0, 0));
  try {
    spatial_region(db.get("spatial:right"), edge, ws);
    FAIL("expected infeasible_region");
  } catch (const Error& e) {
    CHECK(e.code() == "infeasible_region");
  }
}

TEST_CASE("pattern overrides") {
  PatternDb db = PatternDb::builtin(Workspace(0, 1, 0, 1));
  db.apply_overrides(Json::parse(R"([{"name": "line", "sigma": 0.02, "delta": 0.1},
    {"name": "zigzag", "keys": ["zigzag"], "sigma": 0.01, "delta": 0.2,
     "params": {"family": "line", "spacing": 0.5}}])"));
  CHECK(db.get("line").sigma == 0.02);
  CHECK(db.get("line").delta == 0.1);
  CHECK(db.get("zigzag").spacing == 0.5);
  CHECK_THROWS_AS(db.apply_overrides(Json::parse(R"([{"name": "line", "color": 1}])")), Error);
  CHECK_THROWS_AS(db.apply_overrides(Json::parse(R"([{"name": "new", "sigma": 0.1}])")), Error);
}
