#include <cmath>
#include <vector>

#include "doctest.h"
#include "fctl/network.hpp"
#include "fctl/output.hpp"
#include "fctl/simulator.hpp"
#include "oracles.hpp"

using namespace fctl;

namespace {

SimConfig quick(long long cycles, int reps, std::uint64_t seed = 3) {
  SimConfig cfg;
  cfg.cycles = cycles;
  cfg.warmup_cycles = 1000;
  cfg.replications = reps;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("config validation") {
  SimConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.warmup_cycles = cfg.cycles;
  CHECK_THROWS(cfg.validate());
  cfg = SimConfig{};
  cfg.replications = 0;
  CHECK_THROWS(cfg.validate());
}

TEST_CASE("all-zero arrivals give all-zero statistics") {
  const auto st = simulate_single(ArrivalProcess::zero(5), {2, 3, 0}, quick(3000, 2));
  for (const auto& e : st.slot_mean) CHECK(e.mean == 0.0);
  for (const auto& e : st.tail_xbar) CHECK(e.mean == 0.0);
  CHECK(st.green_hist[0].mean == 1.0);
  CHECK(st.departures_per_cycle.mean == 0.0);
}

TEST_CASE("simulation is reproducible") {
  const auto p = ArrivalProcess::iid_poisson(6, 0.3);
  const auto a = simulate_single(p, {3, 3, 0}, quick(5000, 3, 99));
  const auto b = simulate_single(p, {3, 3, 0}, quick(5000, 3, 99));
  const auto c = simulate_single(p, {3, 3, 0}, quick(5000, 3, 100));
  for (std::size_t k = 0; k < a.slot_mean.size(); ++k) {
    CHECK(a.slot_mean[k].mean == b.slot_mean[k].mean);
    CHECK(a.slot_mean[k].se == b.slot_mean[k].se);
  }
  CHECK(a.xbar_mean.mean != c.xbar_mean.mean);
}

TEST_CASE("stationary law of a small correlated instance") {
  // Two slots of green, two of red, deterministic-count scenarios.
  const ArrivalProcess p(4, {{0.5, {{0, 0.0}, {1, 0.0}, {0, 0.0}, {1, 0.0}}},
                             {0.3, {{2, 0.0}, {0, 0.0}, {0, 0.0}, {0, 0.0}}},
                             {0.2, {{0, 0.0}, {0, 0.0}, {0, 0.0}, {0, 0.0}}}});
  const auto law = oracle::markov_x0_law(p, 2, 80);
  const auto st = simulate_single(p, {2, 2, 0}, quick(200'000, 8));
  double tail = 1.0;
  for (int m = 1; m <= 4; ++m) {
    tail -= law[m - 1];
    CHECK(std::abs(st.tail_x0[m - 1].mean - tail) < 4.0 * st.tail_x0[m - 1].se + 1e-12);
  }
}

TEST_CASE("per-slot means match the analysis") {
  const ArrivalProcess p(8, {{0.35, {{1, 0.0}, {1, 0.0}, {0, 0.3}, {0, 0.3}, {}, {}, {0, 0.2}, {}}},
                             {0.4, {{1, 0.0}, {0, 0.3}, {0, 0.3}, {0, 0.3}, {}, {}, {0, 0.2}, {}}},
                             {0.25, {{0, 0.3}, {0, 0.3}, {0, 0.3}, {0, 0.3}, {}, {}, {1, 0.0}, {}}}});
  const SignalPlan plan{4, 4, 0};
  const auto sol = solve_q(plan, p);
  const auto st = simulate_single(p, plan, quick(200'000, 8));
  const auto m = sol.mean_per_slot();
  for (std::size_t k = 0; k < m.size(); ++k) {
    CAPTURE(k);
    CHECK(std::abs(st.slot_mean[k].mean - m[k]) < 4.0 * st.slot_mean[k].se);
  }
  const auto green = effective_green_dist(sol);
  for (std::size_t j = 0; j < green.size(); ++j)
    CHECK(std::abs(st.green_hist[j].mean - green[j]) < 4.0 * st.green_hist[j].se + 1e-12);
  // Departures balance arrivals.
  CHECK(std::abs(st.departures_per_cycle.mean - st.arrivals_per_cycle.mean) <
        3.0 * std::hypot(st.departures_per_cycle.se, st.arrivals_per_cycle.se) + 1e-3);
}

TEST_CASE("joint output frequencies match the output mixture") {
  const auto p = ArrivalProcess::iid_poisson(5, 0.35);
  const SignalPlan plan{3, 2, 0};
  const auto o = output_pgf(solve_q(plan, p));
  SimConfig cfg = quick(400'000, 5);
  cfg.record_output_vectors = true;
  const auto st = simulate_single(p, plan, cfg);
  int checked = 0;
  for (const auto& [vec, est] : st.output_vectors) {
    double prob = 0.0;
    for (const auto& s : o.mixture.scenarios()) {
      double q = s.weight;
      for (std::size_t i = 0; i < vec.size(); ++i) q *= s.slots[i].pmf(vec[i]);
      prob += q;
    }
    if (prob < 1e-3) continue;
    ++checked;
    const double n = static_cast<double>(cfg.measured_cycles()) * cfg.replications;
    const double sigma = std::sqrt(prob * (1 - prob) / n);
    CAPTURE(vec[0]);
    CHECK(std::abs(est.mean - prob) < 4.0 * sigma);
  }
  CHECK(checked > 10);
}

TEST_CASE("green wave network has empty downstream queues") {
  const auto spec = line_network(4, {10, 10, 0}, ArrivalProcess::iid_poisson(20, 0.45), 0, {});
  const auto st = simulate_network(spec, quick(20'000, 2));
  CHECK(st[0].xbar_mean.mean > 1.0);
  for (std::size_t i = 1; i < st.size(); ++i) CHECK(st[i].xbar_mean.mean == 0.0);
}

TEST_CASE("travel time delays departures") {
  // A queue with 1 green slot of 6 feeds a downstream queue; with travel time
  // 2 and equal offsets, vehicles reach the downstream queue in slot 3.
  NetworkSpec spec;
  spec.cycle = 6;
  spec.nodes.push_back({"up", {1, 5, 0}, ArrivalProcess(6, {{1.0, {{}, {}, {}, {1, 0.0}, {}, {}}}}), {}, true});
  spec.nodes.push_back({"down", {1, 5, 0}, std::nullopt, {{0, 2}}, true});
  SimConfig cfg = quick(3000, 1);
  const auto st = simulate_network(spec, cfg);
  // Upstream: one vehicle waits from slot 4 to the next green.
  CHECK(st[0].slot_mean[4].mean == 1.0);
  CHECK(st[0].output_mean[0].mean == 1.0);
  // Downstream: arrives in red slot 3 and waits for the next green.
  CHECK(st[1].slot_mean[2].mean == 0.0);
  CHECK(st[1].slot_mean[3].mean == 1.0);
  CHECK(st[1].output_mean[0].mean == 1.0);
}
