#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <numbers>
#include <unordered_map>

#include "lgplan/bench.hpp"

namespace lgplan {

namespace {

constexpr std::size_t kStateCap = 1'000'000;

using GoalTest = std::function<bool(const Scene&)>;

// State: per movable object, -1 for "still at its start pose" or an index
// into that object's candidate poses. Encoded in mixed radix.
OracleResult bfs(const Scene& start, std::vector<int> movable, int resolution,
                 const std::map<int, Pose>& extra_targets, const GoalTest& is_goal) {
  if (movable.empty())
    for (const SceneObject& o : start.objects()) movable.push_back(o.id);
  if (movable.size() > 3) throw Error("invalid_oracle", "the oracle handles at most 3 movable objects");
  if (resolution < 1 || resolution > 12)
    throw Error("invalid_oracle", "grid resolution must lie in 1..12");

  const Workspace& ws = start.workspace();
  std::vector<Pose> grid;
  for (int iy = 0; iy < resolution; ++iy)
    for (int ix = 0; ix < resolution; ++ix)
      for (double theta : {0.0, std::numbers::pi / 2})
        grid.emplace_back(ws.x_min() + (ix + 0.5) * ws.width() / resolution,
                          ws.y_min() + (iy + 0.5) * ws.height() / resolution, theta);

  std::vector<std::vector<Pose>> candidates;
  for (int id : movable) {
    start.index_of(id);  // existence
    candidates.push_back(grid);
    if (const auto it = extra_targets.find(id); it != extra_targets.end())
      candidates.back().push_back(it->second);
  }

  auto encode = [&](const std::vector<int>& s) {
    std::uint64_t code = 0;
    for (std::size_t m = s.size(); m-- > 0;)
      code = code * (candidates[m].size() + 1) + static_cast<std::uint64_t>(s[m] + 1);
    return code;
  };
  auto to_scene = [&](const std::vector<int>& s) {
    std::vector<SceneObject> objects(start.objects().begin(), start.objects().end());
    std::vector<Pose> poses(start.poses().begin(), start.poses().end());
    for (std::size_t m = 0; m < movable.size(); ++m)
      if (s[m] >= 0) poses[start.index_of(movable[m])] = candidates[m][static_cast<std::size_t>(s[m])];
    return Scene(ws, std::move(objects), std::move(poses));
  };

  std::unordered_map<std::uint64_t, int> depth;
  std::deque<std::vector<int>> queue;
  const std::vector<int> init(movable.size(), -1);
  depth[encode(init)] = 0;
  queue.push_back(init);
  OracleResult out;
  while (!queue.empty()) {
    const std::vector<int> s = std::move(queue.front());
    queue.pop_front();
    ++out.states;
    const int d = depth.at(encode(s));
    const Scene scene = d == 0 ? start : to_scene(s);
    if (is_goal(scene)) {
      out.solvable = true;
      out.actions = d;
      return out;
    }
    for (std::size_t m = 0; m < movable.size(); ++m) {
      if (!scene.is_reachable(movable[m])) continue;
      for (std::size_t c = 0; c < candidates[m].size(); ++c) {
        if (static_cast<int>(c) == s[m]) continue;
        if (scene.check_action(movable[m], candidates[m][c])) continue;
        std::vector<int> next = s;
        next[m] = static_cast<int>(c);
        const std::uint64_t code = encode(next);
        if (depth.count(code)) continue;
        if (depth.size() >= kStateCap)
          throw Error("oracle_overflow", "oracle overflow: more than 1e6 states");
        depth[code] = d + 1;
        queue.push_back(std::move(next));
      }
    }
  }
  return out;
}

}  // namespace

OracleResult oracle_solve(const Scene& scene, const GoalSpec& goal, const PatternDb& db,
                          int resolution, const std::vector<int>& movable,
                          double tol_sigma_mult) {
  validate_goal(goal, db, scene);
  return bfs(scene, movable, resolution, {}, [&](const Scene& s) {
    return check_goal(s, goal, db, tol_sigma_mult).overall;
  });
}

OracleResult oracle_solve_fixed(const Scene& scene, const std::map<int, Pose>& goal_poses,
                                int resolution, const std::vector<int>& movable) {
  return bfs(scene, movable, resolution, goal_poses, [&](const Scene& s) {
    return std::all_of(goal_poses.begin(), goal_poses.end(),
                       [&](const auto& g) { return approx_equal(s.pose(g.first), g.second); });
  });
}

// --- tiny instances ----------------------------------------------------------------------

TaskInstance gen_tiny_task(std::uint64_t seed) {
  constexpr int kCells = 6;
  const Workspace ws(0.0, 0.6, 0.0, 0.6);
  const PatternDb db = PatternDb::builtin(ws);
  const double cell = ws.width() / kCells;
  static constexpr std::array<const char*, 8> kRelations{
      "spatial:left",       "spatial:right",       "spatial:front",       "spatial:behind",
      "spatial:left_front", "spatial:left_behind", "spatial:right_front", "spatial:right_behind"};

  Rng rng(seed);
  for (;;) {
    const int variant = static_cast<int>(rng.index(4));
    GoalSpec goal;
    std::vector<double> sides;
    auto relation = [&] { return std::string(kRelations[rng.index(kRelations.size())]); };
    // Mostly cell-sized objects; the occasional big one blocks neighbours.
    auto side = [&] { return rng.uniform() < 0.2 ? rng.uniform(0.15, 0.25) : rng.uniform(0.05, 0.09); };
    bool lid = false;
    switch (variant) {
      case 0:  // one object next to an anchor, maybe a distractor
        goal.subgoals.push_back({relation(), {1}, 2});
        sides = {side(), side()};
        if (rng.uniform() < 0.5) sides.push_back(side());
        break;
      case 1:  // three in a line
        goal.subgoals.push_back({"line", {1, 2, 3}, std::nullopt});
        sides = {rng.uniform(0.05, 0.09), rng.uniform(0.05, 0.09), rng.uniform(0.05, 0.09)};
        break;
      case 2:  // chained relations
        goal.subgoals.push_back({relation(), {1}, 2});
        goal.subgoals.push_back({relation(), {3}, 1});
        sides = {side(), side(), side()};
        break;
      default:  // buried goal object
        goal.subgoals.push_back({relation(), {1}, 2});
        sides = {rng.uniform(0.07, 0.09), side()};
        lid = true;
        break;
    }

    std::vector<SceneObject> objects;
    std::vector<Pose> poses;
    std::vector<Polygon> polys;
    bool ok = true;
    for (std::size_t i = 0; i < sides.size() && ok; ++i) {
      const int id = static_cast<int>(i) + 1;
      objects.push_back({id, "item" + std::to_string(id), "grey", Footprint::square(sides[i])});
      ok = false;
      for (int t = 0; t < 200 && !ok; ++t) {
        const Pose p((static_cast<double>(rng.index(kCells)) + 0.5) * cell,
                     (static_cast<double>(rng.index(kCells)) + 0.5) * cell,
                     rng.index(2) ? std::numbers::pi / 2 : 0.0);
        Polygon poly = transform_footprint(objects.back().footprint, p);
        if (!in_workspace(poly, ws)) continue;
        if (std::any_of(polys.begin(), polys.end(),
                        [&](const Polygon& q) { return footprints_overlap(poly, q); }))
          continue;
        ok = true;
        poses.push_back(p);
        polys.push_back(std::move(poly));
      }
    }
    if (!ok) continue;
    std::vector<std::string> tags{"tiny"};
    if (lid) {
      objects.push_back({3, "lid3", "grey", Footprint::square(0.6 * sides[0])});
      poses.push_back(poses[0].with_level(1));
      tags.push_back(tag::kInfeasibleStart);
    }
    std::sort(tags.begin(), tags.end());
    Scene scene(ws, std::move(objects), std::move(poses), seed);
    validate_goal(goal, db, scene);
    return TaskInstance{scene, goal, tags, seed, {}};
  }
}

std::vector<TaskInstance> unsatisfiable_tasks() {
  const Workspace ws(0.0, 0.6, 0.0, 0.6);
  std::vector<TaskInstance> out;
  std::uint64_t seed = 1;

  // Three 0.35 m blocks have 0.3675 m^2 of footprint, more than the 0.36 m^2
  // table, so no line of them can rest on the table at once.
  for (const Vec2 c : {Vec2{0.3, 0.3}, Vec2{0.2, 0.22}, Vec2{0.41, 0.38}, Vec2{0.25, 0.4}}) {
    std::vector<SceneObject> objects;
    std::vector<Pose> poses;
    for (int k = 0; k < 3; ++k) {
      objects.push_back({k + 1, "slab" + std::to_string(k + 1), "grey", Footprint::square(0.35)});
      poses.emplace_back(c.x, c.y, 0.0, k);
    }
    GoalSpec goal{{{"line", {1, 2, 3}, std::nullopt}}};
    out.push_back({Scene(ws, objects, poses, seed), goal, {"unsatisfiable"}, seed, {}});
    ++seed;
  }

  // A 0.55 m square's bounding box spans at least 0.55 m in x and y under
  // any heading, so it leaves at most 0.05 m to either side, while a 0.12 m
  // square needs its centre 0.06 m inside the table edge.
  for (const char* rel : {"spatial:right", "spatial:left", "spatial:front", "spatial:behind"}) {
    std::vector<SceneObject> objects{{1, "chip1", "grey", Footprint::square(0.12)},
                                     {2, "board2", "grey", Footprint::square(0.55)}};
    std::vector<Pose> poses{Pose(0.3, 0.3, 0.0, 1), Pose(0.3, 0.3, 0.0, 0)};
    GoalSpec goal{{{rel, {1}, 2}}};
    out.push_back({Scene(ws, objects, poses, seed), goal, {"unsatisfiable"}, seed, {}});
    ++seed;
  }
  return out;
}

}  // namespace lgplan
