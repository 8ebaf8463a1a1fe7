#include "lgplan/bench.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <numeric>
#include <set>

#include <omp.h>

#include "lgplan/grid.hpp"
#include "lgplan/scene_io.hpp"

namespace lgplan {

namespace {

constexpr std::array<const char*, 12> kNouns{"block", "cup",  "box",   "can",  "book", "plate",
                                             "phone", "bowl", "mug",   "tile", "jar",  "card"};
constexpr std::array<const char*, 8> kColors{"red",   "green",  "blue",  "yellow",
                                             "white", "black",  "orange", "purple"};

constexpr std::array<const char*, 8> kRelations{
    "spatial:left",       "spatial:right",       "spatial:front",      "spatial:behind",
    "spatial:left_front", "spatial:left_behind", "spatial:right_front", "spatial:right_behind"};

struct Retry {};

int uniform_int(Rng& rng, int lo, int hi) {
  return lo + static_cast<int>(rng.index(static_cast<std::uint64_t>(hi - lo + 1)));
}

}  // namespace

// --- config ----------------------------------------------------------------------------

void validate(const BenchConfig& c) {
  auto fail = [](const std::string& m) { throw Error("invalid_config", m); };
  if (!(c.workspace_width > 0.0) || !(c.workspace_height > 0.0))
    fail("workspace dimensions must be positive");
  if (c.curve_objects_min < 2 || c.curve_objects_max < c.curve_objects_min)
    fail("curve object counts must satisfy 2 <= min <= max");
  if (c.spatial_objects_min < 1 || c.spatial_objects_max < c.spatial_objects_min)
    fail("spatial object counts must satisfy 1 <= min <= max");
  if (c.n_distractors < 0 || c.crowded_extra_distractors < 0)
    fail("distractor counts must be non-negative");
  if (c.pattern_pool.empty()) fail("pattern_pool must not be empty");
  for (const std::string& p : c.pattern_pool) {
    if (p == "spatial") continue;
    if (p == "tower") fail("tower is not supported in the benchmark pool");
    const auto ws = Workspace(0.0, 1.0, 0.0, 1.0);
    if (!PatternDb::builtin(ws).find(p)) fail("unknown pattern in pool: " + p);
  }
  for (double pr : {c.p_multi_pattern, c.p_infeasible_start, c.p_crowded})
    if (!(pr >= 0.0 && pr <= 1.0)) fail("probabilities must lie in [0, 1]");
  if (!(c.crowded_threshold > 0.0 && c.crowded_threshold <= 1.0))
    fail("crowded_threshold must lie in (0, 1]");
  if (!(c.side_min > 0.0) || c.side_max < c.side_min) fail("object sides must satisfy 0 < min <= max");
  if (c.placement_tries < 1 || c.witness_tries < 1) fail("retry budgets must be positive");
}

Json bench_config_to_json(const BenchConfig& c) {
  return {{"workspace_width", c.workspace_width},
          {"workspace_height", c.workspace_height},
          {"curve_objects_min", c.curve_objects_min},
          {"curve_objects_max", c.curve_objects_max},
          {"spatial_objects_min", c.spatial_objects_min},
          {"spatial_objects_max", c.spatial_objects_max},
          {"n_distractors", c.n_distractors},
          {"pattern_pool", c.pattern_pool},
          {"p_multi_pattern", c.p_multi_pattern},
          {"p_infeasible_start", c.p_infeasible_start},
          {"p_crowded", c.p_crowded},
          {"crowded_extra_distractors", c.crowded_extra_distractors},
          {"crowded_threshold", c.crowded_threshold},
          {"side_min", c.side_min},
          {"side_max", c.side_max},
          {"placement_tries", c.placement_tries},
          {"witness_tries", c.witness_tries}};
}

BenchConfig bench_config_from_json(const Json& j, BenchConfig c) {
  if (!j.is_object()) throw Error("invalid_config", "bench config must be an object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "workspace_width") c.workspace_width = v.get<double>();
      else if (key == "workspace_height") c.workspace_height = v.get<double>();
      else if (key == "curve_objects_min") c.curve_objects_min = v.get<int>();
      else if (key == "curve_objects_max") c.curve_objects_max = v.get<int>();
      else if (key == "spatial_objects_min") c.spatial_objects_min = v.get<int>();
      else if (key == "spatial_objects_max") c.spatial_objects_max = v.get<int>();
      else if (key == "n_distractors") c.n_distractors = v.get<int>();
      else if (key == "pattern_pool") c.pattern_pool = v.get<std::vector<std::string>>();
      else if (key == "p_multi_pattern") c.p_multi_pattern = v.get<double>();
      else if (key == "p_infeasible_start") c.p_infeasible_start = v.get<double>();
      else if (key == "p_crowded") c.p_crowded = v.get<double>();
      else if (key == "crowded_extra_distractors") c.crowded_extra_distractors = v.get<int>();
      else if (key == "crowded_threshold") c.crowded_threshold = v.get<double>();
      else if (key == "side_min") c.side_min = v.get<double>();
      else if (key == "side_max") c.side_max = v.get<double>();
      else if (key == "placement_tries") c.placement_tries = v.get<int>();
      else if (key == "witness_tries") c.witness_tries = v.get<int>();
      else throw Error("invalid_config", "unknown bench config key \"" + key + "\"");
    }
  } catch (const Json::exception& e) {
    throw Error("invalid_config", std::string("bad bench config value: ") + e.what());
  }
  validate(c);
  return c;
}

bool TaskInstance::has_tag(std::string_view t) const {
  return std::find(tags.begin(), tags.end(), t) != tags.end();
}

// --- witness sampling ------------------------------------------------------------------

std::optional<std::map<int, Pose>> sample_arrangement(const Scene& base, const GoalSpec& goal,
                                                      const PatternDb& db, Rng& rng,
                                                      int pose_tries) {
  const Workspace& ws = base.workspace();
  std::set<int> goal_objects;
  for (const SubGoal& sg : goal.subgoals) goal_objects.insert(sg.objects.begin(), sg.objects.end());

  struct Placed {
    int id;
    Polygon poly;
    int level;
  };
  std::vector<Placed> placed;
  for (const SubGoal& sg : goal.subgoals)
    if (sg.anchor && !goal_objects.count(*sg.anchor) &&
        std::none_of(placed.begin(), placed.end(), [&](const Placed& p) { return p.id == *sg.anchor; }))
      placed.push_back({*sg.anchor, base.placed(*sg.anchor), base.pose(*sg.anchor).level()});

  std::map<int, Pose> poses;
  std::vector<bool> done(goal.subgoals.size(), false);
  for (std::size_t round = 0; round < goal.subgoals.size(); ++round) {
    // Next sub-goal whose anchor (if any) already has its pose.
    std::size_t i = 0;
    while (i < goal.subgoals.size() &&
           (done[i] || (goal.subgoals[i].anchor && goal_objects.count(*goal.subgoals[i].anchor) &&
                        !poses.count(*goal.subgoals[i].anchor))))
      ++i;
    if (i == goal.subgoals.size()) return std::nullopt;  // cyclic anchors
    done[i] = true;
    const SubGoal& sg = goal.subgoals[i];

    SamplingContext ctx;
    ctx.pattern = &db.get(sg.pattern);
    ctx.total = static_cast<int>(sg.objects.size());
    if (sg.anchor) {
      const auto it = poses.find(*sg.anchor);
      ctx.anchor = it != poses.end()
                       ? transform_footprint(base.object(*sg.anchor).footprint, it->second)
                       : base.placed(*sg.anchor);
    }
    for (int id : sg.objects) {
      const Footprint& fp = base.object(id).footprint;
      bool ok = false;
      for (int t = 0; t < pose_tries && !ok; ++t) {
        Pose p;
        try {
          p = sample_prior(ctx, ws, rng);
        } catch (const Error&) {
          return std::nullopt;
        }
        Polygon poly = transform_footprint(fp, p);
        if (!in_workspace(poly, ws)) continue;
        ok = true;
        int below = 0;
        const Placed* support = nullptr;
        for (const Placed& q : placed) {
          if (q.level == p.level() && footprints_overlap(poly, q.poly)) {
            ok = false;
            break;
          }
          if (p.level() > 0 && q.level == p.level() - 1 && footprints_overlap(poly, q.poly)) {
            ++below;
            support = &q;
          }
        }
        // Stacked samples need exactly one supporter covering half the area.
        if (ok && p.level() > 0)
          ok = below == 1 && intersection_area(poly, support->poly) >= 0.5 * fp.area();
        if (ok) {
          placed.push_back({id, std::move(poly), p.level()});
          poses[id] = p;
          ctx.sampled.push_back(p);
        }
      }
      if (!ok) return std::nullopt;
    }
  }
  return poses;
}

Scene witness_scene(const TaskInstance& task) {
  std::set<int> ids;
  for (const auto& [id, _] : task.witness) ids.insert(id);
  for (const SubGoal& sg : task.goal.subgoals)
    if (sg.anchor) ids.insert(*sg.anchor);
  std::vector<SceneObject> objects;
  std::vector<Pose> poses;
  for (int id : ids) {
    objects.push_back(task.scene.object(id));
    const auto it = task.witness.find(id);
    poses.push_back(it != task.witness.end() ? it->second : task.scene.pose(id));
  }
  return Scene(task.scene.workspace(), std::move(objects), std::move(poses));
}

// --- generator ---------------------------------------------------------------------------

namespace {

struct Builder {
  const BenchConfig& cfg;
  Rng& rng;
  Workspace ws;
  std::vector<SceneObject> objects;
  std::vector<double> short_side;

  int add_object() {
    const int id = static_cast<int>(objects.size()) + 1;
    const double a = rng.uniform(cfg.side_min, cfg.side_max);
    const double b = rng.uniform() < 0.5 ? a : rng.uniform(cfg.side_min, cfg.side_max);
    SceneObject o{id, std::string(kNouns[rng.index(kNouns.size())]) + std::to_string(id),
                  kColors[rng.index(kColors.size())], Footprint::rectangle(a, b)};
    objects.push_back(std::move(o));
    short_side.push_back(std::min(a, b));
    return id;
  }

  // Uniform collision-free table pose for every object, in id order.
  std::vector<Pose> place_all() {
    std::vector<Pose> poses;
    std::vector<Polygon> polys;
    for (const SceneObject& o : objects) {
      bool ok = false;
      for (int t = 0; t < cfg.placement_tries && !ok; ++t) {
        const Pose p = sample_uniform_pose(ws, rng);
        Polygon poly = transform_footprint(o.footprint, p);
        if (!in_workspace(poly, ws)) continue;
        ok = std::none_of(polys.begin(), polys.end(),
                          [&](const Polygon& q) { return footprints_overlap(poly, q); });
        if (ok) {
          poses.push_back(p);
          polys.push_back(std::move(poly));
        }
      }
      if (!ok) throw Retry{};
    }
    return poses;
  }
};

TaskInstance attempt_task(const BenchConfig& cfg, std::uint64_t seed, Rng& rng) {
  Builder b{cfg, rng, Workspace(0.0, cfg.workspace_width, 0.0, cfg.workspace_height), {}, {}};
  const PatternDb db = PatternDb::builtin(b.ws);

  const bool multi = cfg.pattern_pool.size() >= 2 && rng.uniform() < cfg.p_multi_pattern;
  std::vector<std::size_t> pool(cfg.pattern_pool.size());
  std::iota(pool.begin(), pool.end(), 0);
  std::vector<std::string> patterns;
  for (int k = 0; k < (multi ? 2 : 1); ++k) {
    const std::size_t pick = rng.index(pool.size());
    const std::string& entry = cfg.pattern_pool[pool[pick]];
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
    patterns.push_back(entry == "spatial" ? kRelations[rng.index(kRelations.size())]
                                          : db.get(entry).name);
  }

  GoalSpec goal;
  std::vector<int> goal_ids;
  for (const std::string& name : patterns) {
    const bool spatial = db.get(name).is_spatial();
    const int n = spatial ? uniform_int(rng, cfg.spatial_objects_min, cfg.spatial_objects_max)
                          : uniform_int(rng, cfg.curve_objects_min, cfg.curve_objects_max);
    SubGoal sg{name, {}, std::nullopt};
    for (int k = 0; k < n; ++k) {
      sg.objects.push_back(b.add_object());
      goal_ids.push_back(sg.objects.back());
    }
    goal.subgoals.push_back(std::move(sg));
  }
  // Anchors: a member of the other (non-spatial) sub-goal half of the time,
  // otherwise an object of their own.
  for (std::size_t i = 0; i < goal.subgoals.size(); ++i) {
    SubGoal& sg = goal.subgoals[i];
    if (!db.get(sg.pattern).is_spatial()) continue;
    const SubGoal* other = goal.subgoals.size() == 2 ? &goal.subgoals[1 - i] : nullptr;
    if (other && !db.get(other->pattern).is_spatial() && rng.uniform() < 0.5)
      sg.anchor = other->objects[rng.index(other->objects.size())];
    else
      sg.anchor = b.add_object();
  }

  const bool crowded_mode = rng.uniform() < cfg.p_crowded;
  const int distractors = cfg.n_distractors + (crowded_mode ? cfg.crowded_extra_distractors : 0);
  for (int k = 0; k < distractors; ++k) b.add_object();

  std::vector<Pose> poses = b.place_all();

  std::vector<std::string> tags{multi ? tag::kMultiPattern : tag::kSinglePattern};
  if (rng.uniform() < cfg.p_infeasible_start) {
    // A lid centred on a goal object, fully inside its footprint.
    const int target = goal_ids[rng.index(goal_ids.size())];
    const auto ti = static_cast<std::size_t>(target - 1);
    const int id = static_cast<int>(b.objects.size()) + 1;
    b.objects.push_back({id, "lid" + std::to_string(id), kColors[rng.index(kColors.size())],
                         Footprint::square(0.6 * b.short_side[ti])});
    b.short_side.push_back(0.6 * b.short_side[ti]);
    poses.push_back(poses[ti].with_level(1));
    tags.push_back(tag::kInfeasibleStart);
  }

  Scene scene(b.ws, b.objects, poses, seed);
  validate_goal(goal, db, scene);

  double mean_side = 0.0;
  for (int id : goal_ids) mean_side += b.short_side[static_cast<std::size_t>(id - 1)];
  mean_side /= static_cast<double>(goal_ids.size());
  if (free_area_ratio(scene, mean_side) < cfg.crowded_threshold) tags.push_back(tag::kCrowded);
  std::sort(tags.begin(), tags.end());

  TaskInstance task{scene, goal, tags, seed, {}};
  for (int t = 0; t < cfg.witness_tries; ++t) {
    auto w = sample_arrangement(scene, goal, db, rng);
    if (!w) continue;
    task.witness = std::move(*w);
    if (check_goal(witness_scene(task), goal, db).overall) return task;
  }
  throw Retry{};
}

}  // namespace

TaskInstance gen_task(const BenchConfig& cfg, std::uint64_t seed) {
  validate(cfg);
  Rng rng(seed);
  for (int attempt = 0; attempt < 20; ++attempt) {
    try {
      return attempt_task(cfg, seed, rng);
    } catch (const Retry&) {
    } catch (const SceneError&) {
    }
  }
  throw Error("ungeneratable_config",
              "ungeneratable config: could not place objects and a witness for seed " +
                  std::to_string(seed));
}

std::vector<TaskInstance> gen_suite(const BenchConfig& cfg, std::uint64_t suite_seed, int n) {
  if (n < 1) throw Error("invalid_config", "a suite needs at least one task");
  std::vector<TaskInstance> suite;
  for (int i = 0; i < n; ++i)
    suite.push_back(gen_task(cfg, Rng::mix(suite_seed, static_cast<std::uint64_t>(i))));
  return suite;
}

// --- task files --------------------------------------------------------------------------

Json task_to_json(const TaskInstance& t) {
  Json witness = Json::array();
  for (const auto& [id, p] : t.witness) {
    Json w = pose_to_json(p);
    w["object"] = id;
    witness.push_back(std::move(w));
  }
  return {{"instance_seed", t.instance_seed},
          {"tags", t.tags},
          {"scene", scene_to_json(t.scene)},
          {"goal", goal_to_json(t.goal)},
          {"witness", witness}};
}

TaskInstance task_from_json(const Json& j) {
  try {
    for (const auto& [key, _] : j.items())
      if (key != "instance_seed" && key != "tags" && key != "scene" && key != "goal" &&
          key != "witness")
        throw Error("invalid_task", "unknown task field \"" + key + "\"");
    Scene scene = scene_from_json(LinedJson{j.at("scene"), {}});
    const PatternDb db = PatternDb::builtin(scene.workspace());
    TaskInstance t{scene, goal_from_json(j.at("goal"), db),
                   j.at("tags").get<std::vector<std::string>>(),
                   j.at("instance_seed").get<std::uint64_t>(), {}};
    std::sort(t.tags.begin(), t.tags.end());
    validate_goal(t.goal, db, t.scene);
    for (const Json& w : j.at("witness")) {
      Json pose = w;
      const int id = pose.at("object").get<int>();
      pose.erase("object");
      t.witness[id] = pose_from_json(pose);
    }
    return t;
  } catch (const Json::exception& e) {
    throw Error("invalid_task", std::string("malformed task JSON: ") + e.what());
  }
}

// --- evaluation --------------------------------------------------------------------------

PatternDb task_patterns(const TaskInstance& task, const EvalConfig& cfg) {
  PatternDb db = PatternDb::builtin(task.scene.workspace());
  if (!cfg.pattern_overrides.is_null()) db.apply_overrides(cfg.pattern_overrides);
  return db;
}

std::uint64_t run_seed(std::uint64_t instance_seed, int s) {
  return s == 0 ? instance_seed : Rng::mix(instance_seed, static_cast<std::uint64_t>(s));
}

TaskOutcome evaluate_task(const TaskInstance& task, const EvalConfig& cfg, int run) {
  TaskOutcome out;
  out.instance_seed = task.instance_seed;
  out.run = run;
  out.tags = task.tags;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const PatternDb db = task_patterns(task, cfg);
    const std::uint64_t seed = run_seed(task.instance_seed, run);
    const SearchResult res = cfg.pmcts ? pmcts_plan(task.scene, task.witness, cfg.planner, seed)
                                       : mcts_plan(task.scene, task.goal, db, cfg.planner, seed);
    out.planned = res.solved;
    out.steps_used = res.plan.steps_used;
    out.best_reward = res.best_reward;
    out.requirement_count = res.requirement_count;
    if (res.solved) {
      out.plan = res.plan;
      out.plan_length = static_cast<int>(res.plan.actions.size());
      const ReplayReport rep = replay(task.scene, res.plan);
      out.executed = rep.ok;
      out.goal_met = rep.ok && check_goal(rep.final_scene, task.goal, db, cfg.tol_sigma_mult).overall;
    }
  } catch (const Error&) {
    out.planned = out.executed = out.goal_met = false;
  }
  out.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

namespace {

void summarize(BenchReport& r) {
  std::stable_sort(r.outcomes.begin(), r.outcomes.end(), [](const auto& a, const auto& b) {
    return std::tie(a.instance_seed, a.run) < std::tie(b.instance_seed, b.run);
  });
  r.sr_p = r.sr_p_at(std::numeric_limits<int>::max());
  r.sr_ep = r.sr_ep_at(std::numeric_limits<int>::max());
}

void check_eval(const std::vector<TaskInstance>& suite, const EvalConfig& cfg) {
  if (suite.empty()) throw Error("invalid_suite", "suite is empty");
  if (cfg.seeds < 1) throw Error("invalid_config", "seeds must be at least 1");
  if (cfg.jobs < 1) throw Error("invalid_config", "jobs must be at least 1");
  validate(cfg.planner);
}

}  // namespace

double BenchReport::sr_p_at(int cap) const {
  if (outcomes.empty()) return 0.0;
  const auto n = std::count_if(outcomes.begin(), outcomes.end(), [&](const TaskOutcome& o) {
    return o.planned && o.steps_used <= cap;
  });
  return static_cast<double>(n) / static_cast<double>(outcomes.size());
}

double BenchReport::sr_ep_at(int cap) const {
  if (outcomes.empty()) return 0.0;
  const auto n = std::count_if(outcomes.begin(), outcomes.end(), [&](const TaskOutcome& o) {
    return o.success() && o.steps_used <= cap;
  });
  return static_cast<double>(n) / static_cast<double>(outcomes.size());
}

BenchReport BenchReport::subset(std::string_view t) const {
  BenchReport r;
  for (const TaskOutcome& o : outcomes)
    if (std::find(o.tags.begin(), o.tags.end(), t) != o.tags.end()) r.outcomes.push_back(o);
  summarize(r);
  return r;
}

BenchReport evaluate_serial(const std::vector<TaskInstance>& suite, const EvalConfig& cfg) {
  check_eval(suite, cfg);
  BenchReport r;
  for (const TaskInstance& t : suite)
    for (int s = 0; s < cfg.seeds; ++s) r.outcomes.push_back(evaluate_task(t, cfg, s));
  summarize(r);
  return r;
}

BenchReport evaluate(const std::vector<TaskInstance>& suite, const EvalConfig& cfg) {
  if (cfg.jobs <= 1) return evaluate_serial(suite, cfg);
  check_eval(suite, cfg);
  const int runs = static_cast<int>(suite.size()) * cfg.seeds;
  BenchReport r;
  r.outcomes.resize(static_cast<std::size_t>(runs));
  // Every run owns its planner and random stream; slot k is written once.
#pragma omp parallel for schedule(dynamic, 1) num_threads(cfg.jobs)
  for (int k = 0; k < runs; ++k)
    r.outcomes[static_cast<std::size_t>(k)] =
        evaluate_task(suite[static_cast<std::size_t>(k / cfg.seeds)], cfg, k % cfg.seeds);
  summarize(r);
  return r;
}

Json bench_report_to_json(const BenchReport& r, bool with_wall_ms, bool with_plans) {
  Json outcomes = Json::array();
  for (const TaskOutcome& o : r.outcomes) {
    Json j{{"instance_seed", o.instance_seed},
           {"run", o.run},
           {"tags", o.tags},
           {"planned", o.planned},
           {"executed", o.executed},
           {"goal_met", o.goal_met},
           {"steps_used", o.steps_used},
           {"plan_length", o.plan_length},
           {"best_reward", o.best_reward},
           {"requirements", o.requirement_count}};
    if (with_wall_ms) j["wall_ms"] = o.wall_ms;
    if (with_plans && o.plan) j["plan"] = plan_to_json(*o.plan);
    outcomes.push_back(std::move(j));
  }
  return {{"sr_p", r.sr_p}, {"sr_ep", r.sr_ep}, {"runs", r.outcomes.size()},
          {"outcomes", outcomes}};
}

std::string bench_report_csv(const BenchReport& r) {
  std::string out = "seed,tags,planned,executed,goal_met,steps,wall_ms\n";
  char buf[64];
  for (const TaskOutcome& o : r.outcomes) {
    std::string tags;
    for (const std::string& t : o.tags) tags += (tags.empty() ? "" : "|") + t;
    std::snprintf(buf, sizeof buf, "%.3f", o.wall_ms);
    out += std::to_string(run_seed(o.instance_seed, o.run)) + "," + tags + "," +
           (o.planned ? "1" : "0") + "," + (o.executed ? "1" : "0") + "," +
           (o.goal_met ? "1" : "0") + "," + std::to_string(o.steps_used) + "," + buf + "\n";
  }
  return out;
}

}  // namespace lgplan
