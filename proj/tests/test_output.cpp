#include <cmath>
#include <vector>

#include "doctest.h"
#include "fctl/output.hpp"
#include "fctl/solver.hpp"

using namespace fctl;

namespace {

// Output pgf for independent slots: sum_j P(G=j) z_1..z_j prod_{i>j} Y_i(z_i),
// with the saturated term z_1..z_g.
cplx independent_output(const std::vector<cplx>& z, const std::vector<SlotDistribution>& slots,
                        const std::vector<double>& green) {
  const int g = static_cast<int>(z.size());
  cplx total{};
  for (int j = 0; j <= g; ++j) {
    cplx t = green[j];
    for (int i = 0; i < j; ++i) t *= z[i];
    if (j < g)
      for (int i = j; i < g; ++i) t *= slots[i].pgf(z[i]);
    total += t;
  }
  return total;
}

}  // namespace

TEST_CASE("effective green distribution for the Poisson upstream flows") {
  const auto o = output_pgf(solve_q({10, 10, 0}, ArrivalProcess::iid_poisson(20, 0.3)));
  const std::vector<double> printed{0.0476, 0.107, 0.143, 0.151, 0.138, 0.114,
                                    0.0887, 0.0657, 0.0470, 0.0328, 0.0655};
  for (std::size_t j = 0; j < printed.size(); ++j)
    CHECK(o.green_dist[j] == doctest::Approx(printed[j]).epsilon(0.006));
  const auto o2 = output_pgf(solve_q({3, 17, 0}, ArrivalProcess::iid_poisson(20, 0.075)));
  const std::vector<double> printed2{0.255, 0.317, 0.223, 0.205};
  for (std::size_t j = 0; j < printed2.size(); ++j)
    CHECK(std::abs(o2.green_dist[j] - printed2[j]) < 5e-4);
}

TEST_CASE("output of independent slots matches the closed form") {
  std::vector<SlotDistribution> slots;
  for (int i = 0; i < 9; ++i) slots.push_back({0, 0.1 + 0.05 * (i % 4)});
  const auto sol = solve_q({5, 4, 0}, ArrivalProcess::independent(slots));
  const auto o = output_pgf(sol);
  const std::vector<std::vector<cplx>> pts{
      {0.1, 0.2, 0.3, 0.4, 0.5},
      {{0.5, 0.5}, {0.0, -0.3}, 0.9, {-0.2, 0.1}, 0.0},
      {1.0, 1.0, 1.0, 1.0, 1.0}};
  for (const auto& z : pts)
    CHECK(std::abs(o.joint_pgf(z) - independent_output(z, slots, o.green_dist)) < 1e-12);
}

TEST_CASE("departures conserve arrivals") {
  const ArrivalProcess p(8, {{0.35, {{1, 0.0}, {1, 0.0}, {0, 0.3}, {0, 0.3}, {}, {}, {0, 0.2}, {}}},
                             {0.65, {{0, 0.3}, {0, 0.3}, {0, 0.3}, {0, 0.3}, {}, {}, {1, 0.0}, {}}}});
  const auto o = output_pgf(solve_q({4, 4, 0}, p));
  const auto m = output_mean_per_slot(o);
  double s = 0.0;
  for (double v : m) s += v;
  CHECK(std::abs(s - p.mean_total()) < 1e-9);
  double w = 0.0;
  for (double v : o.green_dist) w += v;
  CHECK(w == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(o.mixture.cycle_length() == 4);
}

TEST_CASE("no arrivals means no departures") {
  const auto o = output_pgf(solve_q({3, 2, 0}, ArrivalProcess::zero(5)));
  CHECK(o.green_dist[0] == doctest::Approx(1.0));
  CHECK(o.mixture.is_zero());
}
