// Serial reference against the OpenMP kernels: benchmark evaluation and
// density grids. Exits nonzero if any result differs.

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include <omp.h>

#include "lgplan/bench.hpp"
#include "lgplan/grid.hpp"

using namespace lgplan;

namespace {

template <class F>
double time_ms(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  const int tasks = argc > 1 ? std::atoi(argv[1]) : 24;
  const int threads = omp_get_max_threads();
  std::printf("threads %d\n", threads);
  bool same = true;

  const std::vector<TaskInstance> suite = gen_suite(BenchConfig{}, 1, tasks);
  EvalConfig cfg;
  BenchReport serial, parallel;
  const double ts = time_ms([&] { serial = evaluate_serial(suite, cfg); });
  cfg.jobs = threads;
  const double tp = time_ms([&] { parallel = evaluate(suite, cfg); });
  const bool eval_same = bench_report_to_json(serial, false, true).dump() ==
                         bench_report_to_json(parallel, false, true).dump();
  same = same && eval_same;
  std::printf("evaluate   %3d tasks  serial %9.1f ms  parallel %9.1f ms  speedup %.2f  %s\n",
              tasks, ts, tp, ts / tp, eval_same ? "identical" : "DIFFERENT");

  const Workspace ws(0.0, 1.0, 0.0, 0.8);
  const PatternDb db = PatternDb::builtin(ws);
  SamplingContext ctx{&db.get("circle"), 8, {Pose(0.3, 0.4, 0.0), Pose(0.7, 0.4, 0.0)}, std::nullopt};
  for (int res : {64, 256, 1024}) {
    Grid gs, gp;
    const double s = time_ms([&] { gs = density_grid(ctx, ws, res, false); });
    const double p = time_ms([&] { gp = density_grid(ctx, ws, res, true); });
    const bool grid_same = gs.values == gp.values;
    same = same && grid_same;
    std::printf("grid %4d^2           serial %9.1f ms  parallel %9.1f ms  speedup %.2f  %s\n", res,
                s, p, s / p, grid_same ? "identical" : "DIFFERENT");
  }

  const Scene& crowded = suite.front().scene;
  double fs = 0.0, fp = 0.0;
  const double ms = time_ms([&] { fs = free_area_ratio(crowded, 0.06, 512, false); });
  const double mp = time_ms([&] { fp = free_area_ratio(crowded, 0.06, 512, true); });
  same = same && fs == fp;
  std::printf("free area 512^2      serial %9.1f ms  parallel %9.1f ms  speedup %.2f  %s\n", ms, mp,
              ms / mp, fs == fp ? "identical" : "DIFFERENT");
  return same ? 0 : 1;
}
