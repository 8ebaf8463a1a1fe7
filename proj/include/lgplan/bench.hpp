#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lgplan/executor.hpp"
#include "lgplan/instruction.hpp"
#include "lgplan/json_lines.hpp"
#include "lgplan/planner.hpp"
#include "lgplan/scene.hpp"

namespace lgplan {

struct BenchConfig {
  double workspace_width = 1.0;
  double workspace_height = 0.8;
  // Objects per curve sub-goal (line, circle, rectangle) and per spatial one.
  int curve_objects_min = 3;
  int curve_objects_max = 5;
  int spatial_objects_min = 1;
  int spatial_objects_max = 2;
  int n_distractors = 3;
  // Entries are pattern names; "spatial" stands for a random relation.
  std::vector<std::string> pattern_pool{"line", "circle", "rectangle", "spatial"};
  double p_multi_pattern = 0.5;
  double p_infeasible_start = 0.25;
  // Crowded scenes get this many extra distractors; the tag itself is set
  // from the measured free-area ratio.
  double p_crowded = 0.25;
  int crowded_extra_distractors = 30;
  double crowded_threshold = 0.35;
  double side_min = 0.04;
  double side_max = 0.08;
  int placement_tries = 2000;
  int witness_tries = 200;

  friend bool operator==(const BenchConfig&, const BenchConfig&) = default;
};

/// Throws Error("invalid_config").
void validate(const BenchConfig& cfg);
Json bench_config_to_json(const BenchConfig& cfg);
/// Missing keys keep their defaults; unknown keys raise Error("invalid_config").
BenchConfig bench_config_from_json(const Json& j, BenchConfig base = {});

namespace tag {
inline constexpr const char* kSinglePattern = "single_pattern";
inline constexpr const char* kMultiPattern = "multi_pattern";
inline constexpr const char* kInfeasibleStart = "infeasible_start";
inline constexpr const char* kCrowded = "crowded";
}  // namespace tag

struct TaskInstance {
  Scene scene;
  GoalSpec goal;
  std::vector<std::string> tags;  // sorted
  std::uint64_t instance_seed = 0;
  // Goal poses of every goal object that satisfy check_goal together with
  // the anchors' start poses.
  std::map<int, Pose> witness;

  bool has_tag(std::string_view t) const;
};

/// Draws a task. Throws Error("ungeneratable_config") when objects or the
/// witness cannot be placed within the retry budgets.
TaskInstance gen_task(const BenchConfig& cfg, std::uint64_t seed);

/// n tasks with instance seeds Rng::mix(suite_seed, i).
std::vector<TaskInstance> gen_suite(const BenchConfig& cfg, std::uint64_t suite_seed, int n);

/// Scene holding the goal objects at their witness poses plus the anchors
/// that are not goal objects at their start poses.
Scene witness_scene(const TaskInstance& task);

/// Sequential draw of goal poses for every goal object, following the priors
/// sub-goal by sub-goal (anchored sub-goals after their anchor). Anchors that
/// are not goal objects stay at their poses in `base` and act as obstacles;
/// every other object of `base` is ignored. nullopt when some object cannot
/// be placed within `pose_tries` draws.
std::optional<std::map<int, Pose>> sample_arrangement(const Scene& base, const GoalSpec& goal,
                                                      const PatternDb& db, Rng& rng,
                                                      int pose_tries = 200);

Json task_to_json(const TaskInstance& t);
TaskInstance task_from_json(const Json& j);

// --- evaluation --------------------------------------------------------------------

struct EvalConfig {
  PlannerConfig planner;
  bool pmcts = false;  // plan towards the stored witness poses
  int seeds = 1;  // planner runs per task
  double tol_sigma_mult = 4.0;
  int jobs = 1;  // > 1 evaluates tasks on OpenMP threads
  Json pattern_overrides;  // pattern-file document applied to the built-in priors
};

/// Built-in priors for the task's workspace with cfg's overrides applied.
PatternDb task_patterns(const TaskInstance& task, const EvalConfig& cfg);

/// Planner seed of run s for a task: the instance seed itself for s = 0.
std::uint64_t run_seed(std::uint64_t instance_seed, int s);

struct TaskOutcome {
  std::uint64_t instance_seed = 0;
  int run = 0;
  std::vector<std::string> tags;
  bool planned = false;
  bool executed = false;
  bool goal_met = false;
  int steps_used = 0;
  int plan_length = 0;
  int best_reward = 0;
  int requirement_count = 0;
  double wall_ms = 0.0;
  std::optional<Plan> plan;

  bool success() const { return planned && executed && goal_met; }
};

struct BenchReport {
  std::vector<TaskOutcome> outcomes;  // sorted by (instance_seed, run)
  double sr_p = 0.0;
  double sr_ep = 0.0;

  /// Rates counting only plans found within `cap` simulation steps. The
  /// search never looks at its budget, so this equals a rerun at that cap.
  double sr_p_at(int cap) const;
  double sr_ep_at(int cap) const;
  /// Restriction to outcomes carrying `tag`, rates recomputed.
  BenchReport subset(std::string_view tag) const;
};

/// Plans, replays and verifies one task for run `run`.
TaskOutcome evaluate_task(const TaskInstance& task, const EvalConfig& cfg, int run);

/// Reference implementation: one task after another.
BenchReport evaluate_serial(const std::vector<TaskInstance>& suite, const EvalConfig& cfg);
/// Tasks spread over OpenMP threads when cfg.jobs > 1; identical results.
BenchReport evaluate(const std::vector<TaskInstance>& suite, const EvalConfig& cfg);

/// With `with_wall_ms` false the document is a pure function of the inputs.
Json bench_report_to_json(const BenchReport& r, bool with_wall_ms = true, bool with_plans = false);
std::string bench_report_csv(const BenchReport& r);

// --- oracle ----------------------------------------------------------------------------

struct OracleResult {
  bool solvable = false;
  int actions = 0;  // minimal action count when solvable
  std::size_t states = 0;  // states expanded
};

/// Breadth-first search over pick-and-place moves of the movable objects
/// (all of them when `movable` is empty, at most 3) to the centres of a
/// resolution-by-resolution grid with headings {0, pi/2}. Goal test:
/// check_goal. Throws Error("oracle_overflow") beyond 1e6 states and
/// Error("invalid_oracle") on oversized inputs.
OracleResult oracle_solve(const Scene& scene, const GoalSpec& goal, const PatternDb& db,
                          int resolution, const std::vector<int>& movable = {},
                          double tol_sigma_mult = 4.0);
/// Same search towards fixed goal poses.
OracleResult oracle_solve_fixed(const Scene& scene, const std::map<int, Pose>& goal_poses,
                                int resolution, const std::vector<int>& movable = {});

/// Tiny task for oracle comparison: a 0.6 m square table and at most three
/// objects, all starting on grid-cell centres of a 6x6 grid.
TaskInstance gen_tiny_task(std::uint64_t seed);

/// Tasks whose goal cannot hold in any continuous arrangement (proved by
/// area or extent arguments in their construction).
std::vector<TaskInstance> unsatisfiable_tasks();

}  // namespace lgplan
