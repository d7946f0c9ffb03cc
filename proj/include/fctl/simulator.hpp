#pragma once

// Slot-based simulation of single queues and of whole networks.
//
// Networks are simulated as the coupled system: departures of a queue in
// absolute slot t reach each downstream queue in slot t + travel_time, with
// no cross-cycle independence imposed. Statistics are collected per queue in
// the queue's own cycle frame (slot 1 = first green slot).

#include <cstdint>
#include <map>
#include <vector>

#include "fctl/arrival.hpp"
#include "fctl/network.hpp"
#include "fctl/solver.hpp"

namespace fctl {

struct SimConfig {
  /// Total simulated cycles, warmup included.
  long long cycles = 1'010'000;
  long long warmup_cycles = 10'000;
  std::uint64_t seed = 1;
  int replications = 10;
  int tail_levels = 6;
  /// Count every green-phase departure vector (only sensible for short greens).
  bool record_output_vectors = false;

  long long measured_cycles() const { return cycles - warmup_cycles; }
  void validate() const;
};

/// Mean over replications and its standard error.
struct Estimate {
  double mean = 0.0;
  double se = 0.0;
};

struct SimStats {
  int green = 0;
  int cycle = 0;
  long long measured_cycles = 0;
  int replications = 0;
  std::vector<Estimate> slot_mean;    // E[X_k], k = 0..c
  Estimate xbar_mean;                 // (1/c) sum_{k=1..c} E[X_k]
  std::vector<Estimate> tail_x0;      // P(X_0 >= m), m = 1..levels
  std::vector<Estimate> tail_xg;
  std::vector<Estimate> tail_xbar;
  std::vector<Estimate> green_hist;   // P(G = j), j = 0..g
  std::vector<Estimate> output_mean;  // E[O_k], k = 1..g
  Estimate arrivals_per_cycle;
  Estimate departures_per_cycle;
  std::map<std::vector<int>, Estimate> output_vectors;  // frequency of (O_1..O_g)
};

/// Raw counts of one replication at one queue.
struct Tally {
  std::vector<std::int64_t> slot_sum;  // k = 0..c
  std::vector<std::int64_t> tail_x0, tail_xg, tail_xbar;
  std::vector<std::int64_t> green_count;
  std::vector<std::int64_t> output_sum;
  std::int64_t arrivals = 0;
  std::int64_t departures = 0;
  std::map<std::vector<int>, std::int64_t> output_vectors;
};

SimStats simulate_single(const ArrivalProcess& arrivals, const SignalPlan& plan,
                         const SimConfig& cfg);
/// Indexed like spec.nodes.
std::vector<SimStats> simulate_network(const NetworkSpec& spec, const SimConfig& cfg);

/// One replication of the coupled network: tallies indexed like spec.nodes.
std::vector<Tally> run_replication(const NetworkSpec& spec, const SimConfig& cfg,
                                   int replication);

namespace kernels::serial {
std::vector<std::vector<Tally>> replications(const NetworkSpec& spec, const SimConfig& cfg);
}
namespace kernels::omp {
std::vector<std::vector<Tally>> replications(const NetworkSpec& spec, const SimConfig& cfg);
}

/// Reduces per-replication tallies of one queue, in replication order.
SimStats summarize(const std::vector<std::vector<Tally>>& reps, std::size_t node,
                   const SignalPlan& plan, const SimConfig& cfg);

}  // namespace fctl
