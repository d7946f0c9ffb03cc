// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "fctl/config.hpp"
#include "fctl/kernels.hpp"
#include "fctl/network.hpp"
#include "fctl/simulator.hpp"
#include "fctl/solver.hpp"

using namespace fctl;

namespace {

const QueueSolution& classical() {
  static const QueueSolution sol = solve_q({10, 10, 0}, ArrivalProcess::iid_poisson(20, 0.45));
  return sol;
}

const NetworkSpec& line() {
  static const NetworkSpec spec =
      parse_config_file(FCTL_DATA_DIR "/line10_sidetraffic.json").as_network();
  return spec;
}

template <class Kernel>
void invert(benchmark::State& state, Kernel kernel) {
  const auto& sol = classical();
  const PgfFn pgf = x0_pgf(sol);
  for (auto _ : state) benchmark::DoNotOptimize(kernel(pgf, 0, 64));
}

template <class Kernel>
void push(benchmark::State& state, Kernel kernel) {
  const auto& sol = classical();
  const auto laws = kernels::CycleLaws::from(sol.arrivals(), sol.green());
  const auto x0 = sol.x0_pmf();
  for (auto _ : state) benchmark::DoNotOptimize(kernel(laws, x0));
}

template <class Kernel>
void grid(benchmark::State& state, Kernel kernel) {
  const auto& sol = classical();
  const auto& roots = sol.roots().roots;
  for (auto _ : state)
    benchmark::DoNotOptimize(
        kernel(sol.green(), roots, [&sol](int l, cplx z) { return sol.zeta(l, z); }));
}

template <class Kernel>
void simulate(benchmark::State& state, Kernel kernel) {
  SimConfig cfg;
  cfg.cycles = 20'000;
  cfg.warmup_cycles = 1'000;
  cfg.replications = 4;
  for (auto _ : state) benchmark::DoNotOptimize(kernel(line(), cfg));
}

}  // namespace

BENCHMARK_CAPTURE(invert, serial, kernels::serial::invert_range)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(invert, omp, kernels::omp::invert_range)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(push, serial, kernels::serial::push_through_cycle)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(push, omp, kernels::omp::push_through_cycle)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(grid, serial, kernels::serial::evaluate_grid)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(grid, omp, kernels::omp::evaluate_grid)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(simulate, serial, kernels::serial::replications)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(simulate, omp, kernels::omp::replications)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
