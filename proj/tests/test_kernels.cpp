#include <vector>

#include "doctest.h"
#include "fctl/kernels.hpp"
#include "fctl/simulator.hpp"
#include "fctl/solver.hpp"

using namespace fctl;

TEST_CASE("serial and OpenMP inversion agree bit for bit") {
  const auto sol = solve_q({4, 5, 0}, ArrivalProcess::iid_poisson(9, 0.35));
  const PgfFn f = x0_pgf(sol);
  CHECK(kernels::serial::invert_range(f, 0, 40) == kernels::omp::invert_range(f, 0, 40));
}

TEST_CASE("serial and OpenMP cycle propagation agree bit for bit") {
  const ArrivalProcess p(6, {{0.3, {{1, 0.0}, {0, 0.2}, {0, 0.0}, {0, 0.5}, {0, 0.1}, {2, 0.0}}},
                             {0.7, {{0, 0.4}, {0, 0.4}, {0, 0.1}, {0, 0.0}, {0, 0.3}, {0, 0.1}}}});
  const auto laws = kernels::CycleLaws::from(p, 3);
  const std::vector<double> x0{0.3, 0.25, 0.2, 0.15, 0.1};
  const auto a = kernels::serial::push_through_cycle(laws, x0);
  const auto b = kernels::omp::push_through_cycle(laws, x0);
  CHECK(a == b);
  double mass = 0.0;
  for (double v : a.back()) mass += v;
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("serial and OpenMP grid evaluation agree bit for bit") {
  const std::vector<cplx> pts{{0.1, 0.2}, {0.5, -0.5}, {-0.3, 0.0}, {0.9, 0.1}};
  const auto f = [](int l, cplx z) { return std::pow(z, l) + static_cast<double>(l); };
  CHECK(kernels::serial::evaluate_grid(5, pts, f) == kernels::omp::evaluate_grid(5, pts, f));
}

TEST_CASE("green and red steps") {
  std::vector<double> out;
  const std::vector<double> in{0.5, 0.3, 0.2};
  const std::vector<double> arr{0.6, 0.4};
  kernels::green_step(in, arr, out);
  // 0 stays 0; 1 -> 0 or 1; 2 -> 1 or 2.
  CHECK(out[0] == doctest::Approx(0.5 + 0.3 * 0.6));
  CHECK(out[1] == doctest::Approx(0.3 * 0.4 + 0.2 * 0.6));
  CHECK(out[2] == doctest::Approx(0.2 * 0.4));
  kernels::red_step(in, arr, out);
  CHECK(out[0] == doctest::Approx(0.3));
  CHECK(out[3] == doctest::Approx(0.08));
}

TEST_CASE("serial and OpenMP simulation replications agree bit for bit") {
  NetworkSpec spec = line_network(3, {4, 4, 0}, ArrivalProcess::iid_poisson(8, 0.3), 1,
                                  SideFlow{2, 5, 0.05});
  SimConfig cfg;
  cfg.cycles = 3000;
  cfg.warmup_cycles = 100;
  cfg.replications = 4;
  cfg.seed = 11;
  const auto a = kernels::serial::replications(spec, cfg);
  const auto b = kernels::omp::replications(spec, cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t r = 0; r < a.size(); ++r)
    for (std::size_t v = 0; v < a[r].size(); ++v) {
      CHECK(a[r][v].slot_sum == b[r][v].slot_sum);
      CHECK(a[r][v].green_count == b[r][v].green_count);
      CHECK(a[r][v].departures == b[r][v].departures);
    }
}
