// lgplan: plan, replay, check, bench, gen and viz subcommands.
//
// Exit codes: 0 success, 1 error or planning failure, 2 replay failure,
// 3 goal not met. On any nonzero exit stderr holds one JSON object.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "lgplan/bench.hpp"
#include "lgplan/executor.hpp"
#include "lgplan/instruction.hpp"
#include "lgplan/llm.hpp"
#include "lgplan/run_config.hpp"
#include "lgplan/scene_io.hpp"
#include "lgplan/svg.hpp"

namespace fs = std::filesystem;
using namespace lgplan;

namespace {

// Carries a nonzero exit and the stderr document out of a subcommand.
struct Exit {
  int code;
  Json body;
};

Json error_body(const Error& e) {
  Json j = {{"error", e.code()}, {"message", e.what()}};
  if (const auto* pe = dynamic_cast<const ParseError*>(&e)) {
    j["line"] = pe->line();
    j["column"] = pe->column();
  }
  if (const auto* re = dynamic_cast<const ReplyError*>(&e)) j["raw_reply"] = re->raw();
  if (const auto* te = dynamic_cast<const TransportError*>(&e)) j["raw_response"] = te->raw();
  return j;
}

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

struct Options {
  // global
  std::string config_file;
  std::uint64_t seed = 1;
  std::string out;
  // planner overrides
  int budget = 0;
  double exploration = 0.0;
  int width = 0;
  int pose_tries = 0;
  int relocation_tries = 0;
  std::string patterns_file;
  double tol = 0.0;
  // plan / check
  std::string scene_file;
  std::string goal;
  std::string llm_text;
  std::string llm_fixture;
  std::string llm_record;
  std::string llm_endpoint;
  std::string llm_model;
  bool frames = false;
  // replay / viz
  std::string plan_file;
  // bench / gen
  int tasks = 0;
  int seeds = 0;
  int jobs = 0;
  bool pmcts = false;
  std::string suite_file;
  bool no_timing = false;
  bool with_plans = false;
  // viz
  std::string prior;
  int total = 0;
  std::string sampled;
  int anchor = 0;
  int resolution = 64;
  std::string name = "viz.svg";
};

class Cli {
 public:
  Cli() : app_("Language-guided tabletop rearrangement planner") { build(); }

  int main(int argc, char** argv) {
    try {
      app_.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
      return app_.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
      return app_.exit(e);
    } catch (const CLI::ParseError& e) {
      return fail({1, {{"error", "usage"}, {"message", e.what()}}});
    }
    try {
      resolve_config();
      return (this->*command_)();
    } catch (const Exit& e) {
      return fail(e);
    } catch (const Error& e) {
      return fail({1, error_body(e)});
    } catch (const std::exception& e) {
      return fail({1, {{"error", "internal"}, {"message", e.what()}}});
    }
  }

 private:
  CLI::App app_;
  Options o_;
  RunConfig cfg_;
  int (Cli::*command_)() = nullptr;

  static int fail(const Exit& e) {
    std::cerr << e.body.dump() << '\n';
    return e.code;
  }

  bool given(const std::string& name) const {
    for (const CLI::App* sub : app_.get_subcommands()) {
      if (const CLI::Option* opt = sub->get_option_no_throw(name); opt && opt->count() > 0)
        return true;
    }
    const CLI::Option* opt = app_.get_option_no_throw(name);
    return opt && opt->count() > 0;
  }

  void add_planner_flags(CLI::App* sub) {
    sub->add_option("--budget", o_.budget, "Simulation step cap (default 10000)");
    sub->add_option("--exploration", o_.exploration, "UCB exploration constant (default sqrt 2)");
    sub->add_option("--width", o_.width, "Untried action slots per sub-goal (default 8)");
    sub->add_option("--pose-tries", o_.pose_tries, "Prior draws per simulation (default 64)");
    sub->add_option("--relocation-tries", o_.relocation_tries,
                    "Uniform draws per relocation (default 64)");
    sub->add_option("--patterns", o_.patterns_file, "Pattern-file overrides (JSON)");
  }

  void build() {
    app_.require_subcommand(1);
    app_.fallthrough();
    app_.add_option("--config", o_.config_file, "Run configuration file (JSON)");
    app_.add_option("--seed", o_.seed, "Planner seed, or suite seed for gen/bench (default 1)");
    app_.add_option("--out", o_.out, "Output directory (default .)");

    CLI::App* plan = app_.add_subcommand("plan", "Plan a rearrangement and verify it");
    plan->add_option("scene", o_.scene_file, "Scene file")->required();
    plan->add_option("--goal", o_.goal, "Goal program, or a file holding one");
    plan->add_option("--llm", o_.llm_text, "Request text translated by the language model");
    plan->add_option("--llm-fixture", o_.llm_fixture, "Answer --llm from recorded exchanges");
    plan->add_option("--llm-record", o_.llm_record, "Write the --llm exchanges to this file");
    plan->add_option("--llm-endpoint", o_.llm_endpoint, "Chat-completion URL");
    plan->add_option("--llm-model", o_.llm_model, "Model name");
    plan->add_flag("--frames", o_.frames, "Write one SVG per plan step");
    plan->add_option("--tol", o_.tol, "Goal check tolerance in sigmas (default 4)");
    add_planner_flags(plan);
    plan->callback([this] { command_ = &Cli::cmd_plan; });

    CLI::App* rep = app_.add_subcommand("replay", "Replay a plan on a scene");
    rep->add_option("scene", o_.scene_file, "Scene file")->required();
    rep->add_option("plan", o_.plan_file, "Plan file")->required();
    rep->callback([this] { command_ = &Cli::cmd_replay; });

    CLI::App* check = app_.add_subcommand("check", "Check a goal against a scene");
    check->add_option("scene", o_.scene_file, "Scene file")->required();
    check->add_option("--goal", o_.goal, "Goal program, or a file holding one")->required();
    check->add_option("--tol", o_.tol, "Tolerance in sigmas (default 4)");
    check->add_option("--patterns", o_.patterns_file, "Pattern-file overrides (JSON)");
    check->callback([this] { command_ = &Cli::cmd_check; });

    CLI::App* gen = app_.add_subcommand("gen", "Generate a benchmark suite");
    gen->add_option("--tasks", o_.tasks, "Number of tasks (default 200)");
    gen->callback([this] { command_ = &Cli::cmd_gen; });

    CLI::App* bench = app_.add_subcommand("bench", "Run the benchmark");
    bench->add_option("--suite", o_.suite_file, "Suite manifest written by gen");
    bench->add_option("--tasks", o_.tasks, "Tasks to generate when no suite is given");
    bench->add_option("--seeds", o_.seeds, "Planner runs per task (default 1)");
    bench->add_option("--jobs", o_.jobs, "Worker threads (default 1)");
    bench->add_flag("--pmcts", o_.pmcts, "Plan towards the stored witness poses");
    bench->add_flag("--no-timing", o_.no_timing, "Omit wall-clock times from the outputs");
    bench->add_flag("--with-plans", o_.with_plans, "Include every plan in the report");
    bench->add_option("--tol", o_.tol, "Goal check tolerance in sigmas (default 4)");
    add_planner_flags(bench);
    bench->callback([this] { command_ = &Cli::cmd_bench; });

    CLI::App* viz = app_.add_subcommand("viz", "Draw a scene, a plan or a prior as SVG");
    viz->add_option("scene", o_.scene_file, "Scene file")->required();
    viz->add_option("--plan", o_.plan_file, "Plan to draw as numbered arrows");
    viz->add_option("--prior", o_.prior, "Pattern whose density is drawn");
    viz->add_option("--total", o_.total, "Objects in the prior's sub-goal (default K + 1)");
    viz->add_option("--sampled", o_.sampled, "Poses drawn so far: \"x,y[,theta[,level]];...\"");
    viz->add_option("--anchor", o_.anchor, "Anchor object id for spatial priors");
    viz->add_option("--resolution", o_.resolution, "Density grid cells per side (default 64)");
    viz->add_option("--patterns", o_.patterns_file, "Pattern-file overrides (JSON)");
    viz->add_option("--name", o_.name, "Output file name (default viz.svg)");
    viz->callback([this] { command_ = &Cli::cmd_viz; });
  }

  // flag > config file > default
  void resolve_config() {
    if (!o_.config_file.empty())
      cfg_ = run_config_from_json(parse_json_with_lines(read_text_file(o_.config_file)).value);
    if (given("--seed")) cfg_.seed = o_.seed;
    if (given("--out")) cfg_.out = o_.out;
    if (given("--budget")) cfg_.planner.budget = o_.budget;
    if (given("--exploration")) cfg_.planner.exploration = o_.exploration;
    if (given("--width")) cfg_.planner.width = o_.width;
    if (given("--pose-tries")) cfg_.planner.pose_tries = o_.pose_tries;
    if (given("--relocation-tries")) cfg_.planner.relocation_tries = o_.relocation_tries;
    if (given("--patterns"))
      cfg_.patterns = parse_json_with_lines(read_text_file(o_.patterns_file)).value;
    if (given("--tol")) cfg_.tol_sigma_mult = o_.tol;
    if (given("--tasks")) cfg_.tasks = o_.tasks;
    if (given("--seeds")) cfg_.seeds = o_.seeds;
    if (given("--jobs")) cfg_.jobs = o_.jobs;
    if (o_.pmcts) cfg_.pmcts = true;
    if (given("--llm-endpoint")) cfg_.llm.endpoint = o_.llm_endpoint;
    if (given("--llm-model")) cfg_.llm.model = o_.llm_model;
    validate(cfg_);
  }

  fs::path out_path(const std::string& file) const {
    const fs::path dir(cfg_.out);
    fs::create_directories(dir);
    return dir / file;
  }

  PatternDb patterns_for(const Scene& scene) const {
    PatternDb db = PatternDb::builtin(scene.workspace());
    if (!cfg_.patterns.empty()) db.apply_overrides(cfg_.patterns);
    return db;
  }

  // A value naming an existing file is read from it.
  GoalSpec read_goal(const Scene& scene, const PatternDb& db) const {
    if (fs::is_regular_file(o_.goal)) {
      try {
        return parse_dsl(read_text_file(o_.goal), db, &scene);
      } catch (const Error& e) {
        Json body = error_body(e);
        body["file"] = o_.goal;
        throw Exit{1, body};
      }
    }
    return parse_dsl(o_.goal, db, &scene);
  }

  GoalSpec llm_goal(const Scene& scene, const PatternDb& db) const {
    if (!o_.llm_fixture.empty()) {
      ReplayCompletionClient client = ReplayCompletionClient::load(o_.llm_fixture);
      return llm_parse(o_.llm_text, scene, db, client);
    }
    HttpCompletionClient http = HttpCompletionClient::from_environment(cfg_.llm);
    if (o_.llm_record.empty()) return llm_parse(o_.llm_text, scene, db, http);
    RecordingCompletionClient recorder(http);
    const GoalSpec goal = llm_parse(o_.llm_text, scene, db, recorder);
    write_text_file(o_.llm_record, dump_json(recorder.fixture()));
    return goal;
  }

  int verify(const Scene& scene, const Plan& plan, const GoalSpec* goal, const PatternDb* db) {
    const ReplayReport report = replay(scene, plan);
    write_text_file(out_path("replay.json"), dump_json(replay_report_to_json(report)));
    if (!report.ok) {
      Json body = {{"error", "replay_failed"},
                   {"message", "plan step " + std::to_string(*report.failed_step) + " failed: " +
                                   std::string(to_string(*report.reason))},
                   {"failed_step", *report.failed_step},
                   {"reason", to_string(*report.reason)}};
      throw Exit{2, body};
    }
    if (goal) {
      const GoalCheck check = check_goal(report.final_scene, *goal, *db, cfg_.tol_sigma_mult);
      if (!check.overall)
        throw Exit{3, {{"error", "goal_not_met"},
                       {"message", "the final arrangement does not satisfy the goal"},
                       {"check", goal_check_to_json(check)}}};
    }
    return 0;
  }

  int cmd_plan() {
    const Scene scene = load_scene(o_.scene_file);
    const PatternDb db = patterns_for(scene);
    if (o_.goal.empty() == o_.llm_text.empty())
      throw Error("usage", "give exactly one of --goal and --llm");
    const GoalSpec goal = o_.goal.empty() ? llm_goal(scene, db) : read_goal(scene, db);

    const SearchResult result = mcts_plan(scene, goal, db, cfg_.planner, cfg_.seed);
    if (!result.solved)
      throw Exit{1, {{"error", "planning_failed"},
                     {"message", "no plan within " + std::to_string(cfg_.planner.budget) +
                                     " simulation steps"},
                     {"best_reward", result.best_reward},
                     {"requirement_count", result.requirement_count},
                     {"steps_used", result.plan.steps_used}}};
    write_text_file(out_path("plan.json"), dump_json(plan_to_json(result.plan)));
    if (o_.frames) {
      Scene s = scene;
      for (std::size_t i = 0; i <= result.plan.actions.size(); ++i) {
        SvgLayers layers;
        layers.title = "step " + std::to_string(i);
        if (i < result.plan.actions.size()) {
          const Action& a = result.plan.actions[i];
          layers.arrows.push_back({s.pose(a.object_id).position(), a.target.position(),
                                   static_cast<int>(i) + 1});
          layers.ghosts.emplace_back(a.object_id, a.target);
        }
        char name[32];
        std::snprintf(name, sizeof name, "frame_%03zu.svg", i);
        write_text_file(out_path(name), render_svg(s, layers));
        if (i < result.plan.actions.size()) {
          const Action& a = result.plan.actions[i];
          if (s.check_action(a.object_id, a.target)) break;
          s = s.apply_action(a.object_id, a.target);
        }
      }
    }
    const int code = verify(scene, result.plan, &goal, &db);
    std::cout << "goal " << render_dsl(goal) << "\nplan " << result.plan.actions.size()
              << " actions, " << result.plan.steps_used << " simulation steps; replay ok; goal met\n";
    return code;
  }

  int cmd_replay() {
    const Scene scene = load_scene(o_.scene_file);
    const Plan plan = plan_from_json(parse_json_with_lines(read_text_file(o_.plan_file)).value);
    const int code = verify(scene, plan, nullptr, nullptr);
    std::cout << "replay ok, " << plan.actions.size() << " actions\n";
    return code;
  }

  int cmd_check() {
    const Scene scene = load_scene(o_.scene_file);
    const PatternDb db = patterns_for(scene);
    const GoalSpec goal = read_goal(scene, db);
    const GoalCheck check = check_goal(scene, goal, db, cfg_.tol_sigma_mult);
    write_text_file(out_path("check.json"), dump_json(goal_check_to_json(check)));
    if (!check.overall)
      throw Exit{3, {{"error", "goal_not_met"},
                     {"message", "the arrangement does not satisfy the goal"},
                     {"check", goal_check_to_json(check)}}};
    std::cout << "goal met\n";
    return 0;
  }

  int cmd_gen() {
    const std::vector<TaskInstance> suite = gen_suite(cfg_.bench, cfg_.seed, cfg_.tasks);
    Json files = Json::array();
    for (std::size_t i = 0; i < suite.size(); ++i) {
      char name[40];
      std::snprintf(name, sizeof name, "tasks/task_%04zu.json", i);
      fs::create_directories(out_path("tasks"));
      write_text_file(out_path(name), dump_json(task_to_json(suite[i])));
      files.push_back(name);
    }
    const Json manifest = {{"suite_seed", cfg_.seed},
                           {"config", bench_config_to_json(cfg_.bench)},
                           {"tasks", files}};
    write_text_file(out_path("suite.json"), dump_json(manifest));
    std::cout << "wrote " << suite.size() << " tasks\n";
    return 0;
  }

  std::vector<TaskInstance> load_suite() const {
    const fs::path manifest_path(o_.suite_file);
    const Json manifest = parse_json_with_lines(read_text_file(manifest_path)).value;
    std::vector<TaskInstance> suite;
    try {
      for (const Json& f : manifest.at("tasks")) {
        const fs::path p = manifest_path.parent_path() / f.get<std::string>();
        suite.push_back(task_from_json(parse_json_with_lines(read_text_file(p)).value));
      }
    } catch (const Json::exception& e) {
      throw Error("invalid_suite", std::string("malformed suite manifest: ") + e.what());
    }
    if (suite.empty()) throw Error("invalid_suite", "the suite lists no tasks");
    return suite;
  }

  int cmd_bench() {
    const std::vector<TaskInstance> suite =
        o_.suite_file.empty() ? gen_suite(cfg_.bench, cfg_.seed, cfg_.tasks) : load_suite();
    EvalConfig ec;
    ec.planner = cfg_.planner;
    ec.pmcts = cfg_.pmcts;
    ec.seeds = cfg_.seeds;
    ec.tol_sigma_mult = cfg_.tol_sigma_mult;
    ec.jobs = cfg_.jobs;
    ec.pattern_overrides = cfg_.patterns;
    BenchReport report = evaluate(suite, ec);
    if (o_.no_timing)
      for (TaskOutcome& t : report.outcomes) t.wall_ms = 0.0;
    write_text_file(out_path("report.json"),
                    dump_json(bench_report_to_json(report, !o_.no_timing, o_.with_plans)));
    write_text_file(out_path("report.csv"), bench_report_csv(report));
    std::cout << (cfg_.pmcts ? "pmcts" : "lgmcts") << " tasks=" << suite.size()
              << " runs=" << report.outcomes.size() << " SR_p=" << fixed3(report.sr_p)
              << " SR_ep=" << fixed3(report.sr_ep) << '\n';
    return 0;
  }

  static std::vector<Pose> parse_poses(const std::string& text) {
    std::vector<Pose> out;
    std::stringstream items(text);
    std::string item;
    while (std::getline(items, item, ';')) {
      if (item.find_first_not_of(" \t") == std::string::npos) continue;
      std::vector<double> v;
      std::stringstream fields(item);
      std::string field;
      while (std::getline(fields, field, ',')) {
        try {
          std::size_t used = 0;
          v.push_back(std::stod(field, &used));
          if (field.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument("");
        } catch (const std::exception&) {
          throw Error("usage", "bad pose \"" + item + "\" in --sampled");
        }
      }
      if (v.size() < 2 || v.size() > 4) throw Error("usage", "bad pose \"" + item + "\" in --sampled");
      out.emplace_back(v[0], v[1], v.size() > 2 ? v[2] : 0.0,
                       v.size() > 3 ? static_cast<int>(v[3]) : 0);
    }
    return out;
  }

  int cmd_viz() {
    const Scene scene = load_scene(o_.scene_file);
    SvgLayers layers;
    Grid grid;
    if (!o_.prior.empty()) {
      const PatternDb db = patterns_for(scene);
      SamplingContext ctx;
      ctx.pattern = &resolve_pattern_key(o_.prior, db);
      ctx.sampled = parse_poses(o_.sampled);
      ctx.total = o_.total > 0 ? o_.total : ctx.k() + 1;
      if (ctx.total <= ctx.k()) throw Error("usage", "--total must exceed the number of sampled poses");
      if (ctx.pattern->is_spatial()) {
        if (o_.anchor == 0) throw Error("usage", "spatial priors need --anchor");
        ctx.anchor = scene.placed(o_.anchor);
      }
      if (o_.resolution < 1 || o_.resolution > 1024)
        throw Error("usage", "--resolution must lie in 1..1024");
      grid = remaining_density_grid(ctx, scene.workspace(), o_.resolution);
      layers.density = &grid;
      layers.title = "prior " + ctx.pattern->name + " K=" + std::to_string(ctx.k());
    }
    if (!o_.plan_file.empty()) {
      const Plan plan = plan_from_json(parse_json_with_lines(read_text_file(o_.plan_file)).value);
      layers.arrows = plan_arrows(scene, plan);
      for (const Action& a : plan.actions) layers.ghosts.emplace_back(a.object_id, a.target);
    }
    write_text_file(out_path(o_.name), render_svg(scene, layers));
    return 0;
  }
};

}  // namespace

int main(int argc, char** argv) {
  Cli cli;
  return cli.main(argc, argv);
}
