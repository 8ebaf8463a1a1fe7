#include "lgplan/run_config.hpp"

#include <cmath>

namespace lgplan {

namespace {

constexpr int kMaxBudget = 100'000'000;

[[noreturn]] void unknown(std::string_view section, const std::string& key) {
  throw Error("invalid_config", "unknown " + std::string(section) + " key \"" + key + "\"");
}

void require_object(const Json& j, std::string_view what) {
  if (!j.is_object()) throw Error("invalid_config", std::string(what) + " must be an object");
}

}  // namespace

void validate(const RunConfig& cfg) {
  validate(cfg.planner);
  if (cfg.planner.budget > kMaxBudget)
    throw Error("invalid_config", "budget must not exceed 100000000");
  validate(cfg.bench);
  if (!cfg.patterns.is_array()) throw Error("invalid_config", "patterns must be a list");
  if (cfg.tasks < 1) throw Error("invalid_config", "tasks must be at least 1");
  if (cfg.seeds < 1) throw Error("invalid_config", "seeds must be at least 1");
  if (cfg.jobs < 1) throw Error("invalid_config", "jobs must be at least 1");
  if (!(cfg.tol_sigma_mult > 0.0) || !std::isfinite(cfg.tol_sigma_mult))
    throw Error("invalid_config", "tol_sigma_mult must be positive");
  if (!(cfg.llm.timeout_s > 0.0)) throw Error("invalid_config", "llm timeout_s must be positive");
  if (cfg.out.empty()) throw Error("invalid_config", "out must name a directory");
}

RunConfig run_config_from_json(const Json& j, RunConfig c) {
  require_object(j, "config");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "planner") {
        require_object(v, "planner");
        for (const auto& [k, x] : v.items()) {
          if (k == "budget") c.planner.budget = x.get<int>();
          else if (k == "exploration") c.planner.exploration = x.get<double>();
          else if (k == "width") c.planner.width = x.get<int>();
          else if (k == "pose_tries") c.planner.pose_tries = x.get<int>();
          else if (k == "relocation_tries") c.planner.relocation_tries = x.get<int>();
          else unknown("planner", k);
        }
      } else if (key == "patterns") {
        c.patterns = v;
      } else if (key == "bench") {
        c.bench = bench_config_from_json(v, c.bench);
      } else if (key == "eval") {
        require_object(v, "eval");
        for (const auto& [k, x] : v.items()) {
          if (k == "tasks") c.tasks = x.get<int>();
          else if (k == "seeds") c.seeds = x.get<int>();
          else if (k == "jobs") c.jobs = x.get<int>();
          else if (k == "tol_sigma_mult") c.tol_sigma_mult = x.get<double>();
          else if (k == "pmcts") c.pmcts = x.get<bool>();
          else unknown("eval", k);
        }
      } else if (key == "llm") {
        require_object(v, "llm");
        for (const auto& [k, x] : v.items()) {
          if (k == "endpoint") c.llm.endpoint = x.get<std::string>();
          else if (k == "model") c.llm.model = x.get<std::string>();
          else if (k == "timeout_s") c.llm.timeout_s = x.get<double>();
          else unknown("llm", k);
        }
      } else if (key == "out") {
        c.out = v.get<std::string>();
      } else if (key == "seed") {
        c.seed = v.get<std::uint64_t>();
      } else {
        unknown("config", key);
      }
    }
  } catch (const Json::exception& e) {
    throw Error("invalid_config", std::string("bad config value: ") + e.what());
  }
  validate(c);
  return c;
}

Json run_config_to_json(const RunConfig& c) {
  return {{"planner",
           {{"budget", c.planner.budget},
            {"exploration", c.planner.exploration},
            {"width", c.planner.width},
            {"pose_tries", c.planner.pose_tries},
            {"relocation_tries", c.planner.relocation_tries}}},
          {"patterns", c.patterns},
          {"bench", bench_config_to_json(c.bench)},
          {"eval",
           {{"tasks", c.tasks},
            {"seeds", c.seeds},
            {"jobs", c.jobs},
            {"tol_sigma_mult", c.tol_sigma_mult},
            {"pmcts", c.pmcts}}},
          {"llm", {{"endpoint", c.llm.endpoint}, {"model", c.llm.model}, {"timeout_s", c.llm.timeout_s}}},
          {"out", c.out},
          {"seed", c.seed}};
}

}  // namespace lgplan
