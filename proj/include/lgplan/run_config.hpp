#pragma once

#include <cstdint>
#include <string>

#include "lgplan/bench.hpp"
#include "lgplan/llm.hpp"
#include "lgplan/planner.hpp"

namespace lgplan {

/// Settings shared by the command-line subcommands. A config file holds any
/// subset of the keys below; flags given on the command line win over the
/// file, the file wins over these defaults.
///
///   planner   {budget 0..1e8, exploration >= 0, width >= 1, pose_tries >= 1,
///              relocation_tries >= 1}
///   patterns  pattern-file document (list of overrides of delta, sigma, ...)
///   bench     generator settings (see BenchConfig)
///   eval      {tasks >= 1, seeds >= 1, jobs >= 1, tol_sigma_mult > 0, pmcts}
///   llm       {endpoint, model, timeout_s > 0}
///   out       output directory
///   seed      unsigned 64-bit
struct RunConfig {
  PlannerConfig planner;
  Json patterns = Json::array();
  BenchConfig bench;
  int tasks = 200;
  int seeds = 1;
  int jobs = 1;
  double tol_sigma_mult = 4.0;
  bool pmcts = false;
  HttpClientConfig llm;
  std::string out = ".";
  std::uint64_t seed = 1;
};

/// Throws Error("invalid_config").
void validate(const RunConfig& cfg);
/// Keys absent from `j` keep their value in `base`; unknown keys raise
/// Error("invalid_config"). The result is validated.
RunConfig run_config_from_json(const Json& j, RunConfig base = {});
Json run_config_to_json(const RunConfig& cfg);

}  // namespace lgplan
