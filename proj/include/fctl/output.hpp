#pragma once

// Departures of a solved queue during its green phase.
//
// Given an effective green time j (the slot in which the queue first empties)
// and the cycle's arrival scenario, departures are one vehicle per slot up to
// j and then the arrivals themselves. The joint law of (O_1, ..., O_g) is
// therefore again a mixture of independent shifted-Poisson slots, one
// component per (j, scenario) plus the saturated component (G = g).

#include <span>
#include <vector>

#include "fctl/arrival.hpp"
#include "fctl/solver.hpp"

namespace fctl {

struct OutputProcess {
  int green = 0;
  ArrivalProcess mixture;           // cycle_length == green
  std::vector<double> green_dist;   // P(G = j), j = 0..g

  cplx joint_pgf(std::span<const cplx> z) const { return mixture.joint_pgf(z); }
};

/// P(G = j) for j = 0..g.
std::vector<double> effective_green_dist(const QueueSolution& sol);

OutputProcess output_pgf(const QueueSolution& sol);

std::vector<double> output_mean_per_slot(const OutputProcess& o);

}  // namespace fctl
