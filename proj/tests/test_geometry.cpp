#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "lgplan/geometry.hpp"
#include "lgplan/rng.hpp"

using namespace lgplan;

namespace {

Polygon square_at(double cx, double cy, double side = 1.0) {
  return transform_footprint(Footprint::square(side), Pose(cx, cy, 0.0));
}

// Points on an ellipse at sorted angles form a convex CCW polygon.
Polygon random_convex(Rng& rng) {
  const int n = 3 + static_cast<int>(rng.index(6));
  std::vector<double> angles;
  for (int i = 0; i < n; ++i) angles.push_back(rng.uniform(-kPi, kPi));
  std::sort(angles.begin(), angles.end());
  const double a = rng.uniform(0.3, 1.0), b = rng.uniform(0.3, 1.0);
  const double rot = rng.uniform(-kPi, kPi);
  const Vec2 c{rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
  Polygon p;
  for (double t : angles) p.push_back(c + rotate({a * std::cos(t), b * std::sin(t)}, rot));
  return p;
}

// Independent membership test: strictly left of (or on) every CCW edge.
bool inside(const Polygon& p, Vec2 q) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vec2 a = p[i], b = p[(i + 1) % p.size()];
    if (cross(b - a, q - a) < 0.0) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("transform_footprint examples") {
  const Footprint unit = Footprint::square(1.0);
  const Polygon same = transform_footprint(unit, Pose(0, 0, 0));
  CHECK(same == Polygon(unit.vertices().begin(), unit.vertices().end()));

  const Polygon moved = transform_footprint(unit, Pose(1, 2, 0));
  for (std::size_t i = 0; i < moved.size(); ++i) {
    CHECK(moved[i].x == doctest::Approx(unit.vertices()[i].x + 1));
    CHECK(moved[i].y == doctest::Approx(unit.vertices()[i].y + 2));
  }

  const Polygon turned = transform_footprint(unit, Pose(0, 0, kPi / 2));
  const auto it = std::find_if(unit.vertices().begin(), unit.vertices().end(),
                               [](Vec2 v) { return v.x == 0.5 && v.y == 0.5; });
  REQUIRE(it != unit.vertices().end());
  const Vec2 v = turned[static_cast<std::size_t>(it - unit.vertices().begin())];
  CHECK(v.x == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(v.y == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("transform_footprint is rigid") {
  Rng rng(11);
  const Footprint f = Footprint::rectangle(0.3, 0.1);
  for (int trial = 0; trial < 200; ++trial) {
    const Polygon p = transform_footprint(
        f, Pose(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-kPi, kPi)));
    for (std::size_t i = 0; i < p.size(); ++i)
      for (std::size_t j = 0; j < p.size(); ++j)
        CHECK(std::abs(norm(p[i] - p[j]) - norm(f.vertices()[i] - f.vertices()[j])) < 1e-9);
  }
}

TEST_CASE("footprints_overlap examples") {
  CHECK_FALSE(footprints_overlap(square_at(0, 0), square_at(2, 0)));
  CHECK(footprints_overlap(square_at(0, 0), square_at(0.5, 0)));
  CHECK_FALSE(footprints_overlap(square_at(0, 0), square_at(1, 0)));
  CHECK_FALSE(footprints_overlap(square_at(0, 0), square_at(1, 1)));  // corner contact
  CHECK(footprints_overlap(square_at(0, 0), square_at(1 - 1e-3, 0)));
}

TEST_CASE("in_workspace examples") {
  const Workspace ws(-5, 5, -5, 5);
  CHECK(in_workspace(square_at(0, 0), ws));
  CHECK_FALSE(in_workspace(square_at(5, 5), ws));
  CHECK(in_workspace(square_at(0, 0, 10.0), ws));
  CHECK_FALSE(in_workspace(square_at(0, 0, 10.0 + 1e-9), ws));
}

TEST_CASE("overlap is symmetric") {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const Polygon a = random_convex(rng), b = random_convex(rng);
    CHECK(footprints_overlap(a, b) == footprints_overlap(b, a));
  }
}

TEST_CASE("overlap agrees with a Monte-Carlo membership oracle") {
  Rng rng(5);
  int disagreements = 0;
  for (int pair = 0; pair < 1000; ++pair) {
    const Polygon a = random_convex(rng), b = random_convex(rng);
    Aabb box = bounding_box(a);
    int hits = 0;
    for (int s = 0; s < 10000; ++s) {
      const Vec2 q{rng.uniform(box.x_min, box.x_max), rng.uniform(box.y_min, box.y_max)};
      if (inside(a, q) && inside(b, q)) ++hits;
    }
    const bool overlap = footprints_overlap(a, b);
    if (hits > 0) {
      CHECK(overlap);  // a witness point lies in both interiors
    } else if (overlap) {
      // Overlaps the sampler can miss are thin: below the sampling resolution.
      const double cell = (box.x_max - box.x_min) * (box.y_max - box.y_min) / 10000.0;
      CHECK(intersection_area(a, b) < 20.0 * cell);
      ++disagreements;
    }
  }
  CHECK(disagreements < 50);
}

TEST_CASE("pose heading is normalised into (-pi, pi]") {
  CHECK(Pose(0, 0, 3 * kPi).theta() == doctest::Approx(kPi));
  CHECK(Pose(0, 0, -kPi).theta() == doctest::Approx(kPi));
  CHECK(Pose(0, 0, 2 * kPi + 0.25).theta() == doctest::Approx(0.25));
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    const double t = Pose(0, 0, rng.uniform(-50, 50)).theta();
    CHECK(t > -kPi);
    CHECK(t <= kPi);
  }
}

TEST_CASE("footprint validation") {
  CHECK_THROWS_AS(Footprint({{-1, -1}, {-1, 1}, {1, 1}, {1, -1}}), std::invalid_argument);  // clockwise
  CHECK_THROWS_AS(Footprint({{-1, -1}, {1, -1}, {0, -0.9}, {1, 1}, {-1, 1}}),
                  std::invalid_argument);  // concave
  CHECK_THROWS_AS(Footprint({{0, 0}, {1e-6, 0}, {0, 1e-6}}), std::invalid_argument);  // tiny
  CHECK_THROWS_AS(Workspace(1, 0, 0, 1), std::exception);
}
