#include "doctest.h"
#include "lgplan/rng.hpp"
#include "lgplan/scene.hpp"
#include "lgplan/scene_io.hpp"

using namespace lgplan;

namespace {

SceneObject block(int id, double side = 1.0) {
  return {id, "block" + std::to_string(id), "red", Footprint::square(side)};
}

Scene make(std::vector<SceneObject> objects, std::vector<Pose> poses) {
  return Scene(Workspace(-5, 5, -5, 5), std::move(objects), std::move(poses), 7);
}

// Blocks 1..3 stacked at (0,0); block 4 alone at (3,3).
Scene tower3() {
  return make({block(1), block(2), block(3), block(4)},
              {Pose(0, 0, 0, 0), Pose(0, 0, 0, 1), Pose(0, 0, 0, 2), Pose(3, 3, 0, 0)});
}

bool same_scene(const Scene& a, const Scene& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!approx_equal(a.poses()[i], b.poses()[i])) return false;
  return true;
}

}  // namespace

TEST_CASE("is_reachable examples") {
  const Scene s = tower3();
  CHECK(s.is_reachable(4));
  CHECK_FALSE(s.is_reachable(1));
  CHECK_FALSE(s.is_reachable(2));
  CHECK(s.is_reachable(3));
  CHECK_THROWS_AS(s.is_reachable(99), Error);
  try {
    s.is_reachable(99);
  } catch (const Error& e) {
    CHECK(e.code() == "no_such_object");
  }
}

TEST_CASE("blockers_above examples") {
  const Scene s = tower3();
  CHECK(s.blockers_above(4).empty());
  CHECK(s.blockers_above(1) == std::vector<int>{3, 2});
  const Scene two = make({block(1), block(2), block(3), block(4)},
                         {Pose(-2, 0, 0, 0), Pose(-2, 0, 0, 1), Pose(2, 0, 0, 0), Pose(2, 0, 0, 1)});
  CHECK(two.blockers_above(1) == std::vector<int>{2});
  CHECK(two.blockers_above(3) == std::vector<int>{4});
}

TEST_CASE("blockers_above has strictly decreasing levels") {
  const Scene s = make({block(1, 2.0), block(2, 1.5), block(3, 1.0), block(4, 0.5)},
                       {Pose(0, 0, 0, 0), Pose(0, 0, 0, 1), Pose(0, 0, 0, 2), Pose(0, 0, 0, 3)});
  const std::vector<int> b = s.blockers_above(1);
  REQUIRE(b.size() == 3);
  for (std::size_t i = 1; i < b.size(); ++i) CHECK(s.pose(b[i - 1]).level() > s.pose(b[i]).level());
}

TEST_CASE("apply_action examples") {
  const Scene s = tower3();
  const Scene moved = s.apply_action(4, Pose(-3, -3, 0.3));
  CHECK(approx_equal(moved.pose(4), Pose(-3, -3, 0.3)));
  CHECK(approx_equal(s.pose(4), Pose(3, 3, 0)));

  try {
    s.apply_action(1, Pose(-3, 3, 0));
    FAIL("expected blocked pick");
  } catch (const ActionError& e) {
    CHECK(e.reason() == ActionFailure::blocked_pick);
  }
  CHECK(s.check_action(4, Pose(0.5, 0, 0)) == ActionFailure::blocked_place);
  CHECK(s.check_action(4, Pose(4.9, 0, 0)) == ActionFailure::out_of_bounds);
}

TEST_CASE("placement on a reachable object stacks one level up") {
  const Scene s = tower3();
  CHECK(s.infer_level(4, Pose(0.1, 0.1, 0)) == 3);
  CHECK(s.check_action(4, Pose(0.1, 0.1, 0)) == ActionFailure::blocked_place);
  const Scene stacked = s.apply_action(4, Pose(0.1, 0.1, 0, 3));
  CHECK(stacked.pose(4).level() == 3);
  CHECK(stacked.supporter(4) == 3);
  CHECK_FALSE(stacked.is_reachable(3));
  // Less than half the area over the top block: table level, which collides
  // with the tower's base.
  CHECK(s.infer_level(4, Pose(0.8, 0, 0)) == 0);
  CHECK(s.check_action(4, Pose(0.8, 0, 0)) == ActionFailure::blocked_place);
}

TEST_CASE("f_free examples") {
  const Scene empty = make({block(1)}, {Pose(0, 0, 0)});
  CHECK(empty.f_free(1, Pose(2, 2, 1.0)));
  const Scene two = make({block(1), block(2)}, {Pose(0, 0, 0), Pose(3, 0, 0)});
  CHECK_FALSE(two.f_free(2, Pose(0, 0, 0)));
  // Over the base of a 2-tower at level 1: only level-1 objects count.
  const Scene t = make({block(1), block(2)}, {Pose(0, 0, 0, 0), Pose(0, 0, 0, 1)});
  CHECK(t.f_free(2, Pose(0.2, 0, 0, 1)));
  CHECK_FALSE(t.f_free(2, Pose(0.2, 0, 0, 0)));
}

TEST_CASE("reverse action restores the scene") {
  Rng rng(9);
  const Scene s = tower3();
  int checked = 0;
  for (int i = 0; i < 200; ++i) {
    const Pose p(rng.uniform(-4.5, 4.5), rng.uniform(-4.5, 4.5), rng.uniform(-kPi, kPi));
    if (s.check_action(4, p)) continue;
    const Scene there = s.apply_action(4, p);
    const Scene back = there.apply_action(4, s.pose(4));
    CHECK(same_scene(back, s));
    ++checked;
  }
  CHECK(checked > 50);
}

TEST_CASE("every constructed scene is self-consistent") {
  const Scene s = tower3();
  for (const SceneObject& o : s.objects()) CHECK(s.f_free(o.id, s.pose(o.id)));
}

TEST_CASE("constructor rejects invalid scenes") {
  CHECK_THROWS_AS(make({block(1), block(1)}, {Pose(-2, 0, 0), Pose(2, 0, 0)}), SceneError);
  CHECK_THROWS_AS(make({block(1), block(2)}, {Pose(0, 0, 0), Pose(0.5, 0, 0)}), SceneError);
  CHECK_THROWS_AS(make({block(1)}, {Pose(4.9, 0, 0)}), SceneError);
  CHECK_THROWS_AS(make({block(1)}, {Pose(0, 0, 0, 1)}), SceneError);  // floating
  CHECK_THROWS_AS(make({{1, "", "red", Footprint::square(1)}}, {Pose(0, 0, 0)}), SceneError);
  // Two supporters below one object.
  CHECK_THROWS_AS(make({block(1), block(2), block(3, 2.0)},
                       {Pose(-0.6, 0, 0), Pose(0.6, 0, 0), Pose(0, 0, 0, 1)}),
                  SceneError);
}

TEST_CASE("scene files round-trip and errors carry lines") {
  const Scene s = tower3();
  const Scene back = scene_from_text(dump_json(scene_to_json(s)));
  CHECK(same_scene(back, s));
  CHECK(back.seed() == s.seed());

  const std::string bad = R"({
  "workspace": {"x_min": 0, "x_max": 1, "y_min": 0, "y_max": 1},
  "objects": [
    {"id": 1, "name": "a", "color": "red", "footprint": [[-0.1,-0.1],[0.1,-0.1],[0.1,0.1],[-0.1,0.1]],
     "pose": {"x": 0.5, "y": 0.5, "theta": 0, "level": 0}},
    {"id": 2, "name": "b", "color": "red", "footprint": [[-0.1,-0.1],[0.1,-0.1],[0.1,0.1],[-0.1,0.1]],
     "pose": {"x": 0.55, "y": 0.5, "theta": 0, "level": 0}}
  ],
  "seed": 0
})";
  try {
    scene_from_text(bad);
    FAIL("expected an error");
  } catch (const ParseError& e) {
    CHECK(e.line() >= 4);
    CHECK(e.line() <= 7);
  }
  try {
    scene_from_text("{\n \"workspace\": 3,\n}");
    FAIL("expected an error");
  } catch (const ParseError& e) {
    CHECK(e.line() >= 2);
  }
  CHECK_THROWS_AS(scene_from_text(R"({"workspace": {"x_min": 0, "x_max": 1, "y_min": 0, "y_max": 1},
    "objects": [], "seed": 0, "extra": 1})"),
                  ParseError);
}
