#pragma once

// Decomposition of an acyclic network of signalized queues.
//
// Every queue is solved in isolation. A downstream queue sees the superposed
// departures of its upstream queues, shifted by the travel time and by the
// difference in signal offsets, re-read within one cycle frame and treated as
// independent from cycle to cycle.

#include <optional>
#include <string>
#include <vector>

#include "fctl/arrival.hpp"
#include "fctl/output.hpp"
#include "fctl/solver.hpp"

namespace fctl {

struct UpstreamLink {
  std::size_t from = 0;
  int travel_time = 0;  // slots
};

struct NetworkNode {
  std::string name;
  SignalPlan plan;
  std::optional<ArrivalProcess> external;  // in the node's own frame (slot 1 = first green)
  std::vector<UpstreamLink> upstream;
  bool reported = true;  // include in summary tables
};

struct NetworkSpec {
  int cycle = 0;
  std::vector<NetworkNode> nodes;
  double epsilon_weight = 0.0;

  /// Checks cycle lengths, link indices, inputs and acyclicity; returns a
  /// topological order.
  std::vector<std::size_t> validate() const;
  std::size_t index_of(const std::string& name) const;
};

struct NodeResult {
  ArrivalProcess input;
  QueueSolution solution;
  OutputProcess output;
  double rho = 0.0;
};

struct NetworkSolution {
  std::vector<std::size_t> order;
  std::vector<NodeResult> nodes;  // indexed like NetworkSpec::nodes
};

/// Upstream green slot k (1..g) lands in downstream slot mod(k-1+shift, c)+1;
/// other slots get no arrivals.
ArrivalProcess embed_output(const OutputProcess& o, int travel_time, int offset_shift,
                            int cycle);

/// Throws InstabilityError naming the node when any queue has rho >= 1.
NetworkSolution analyze_network(const NetworkSpec& spec);

std::string derived_input_report(const NetworkSolution& sol, const NetworkSpec& spec,
                                 std::size_t node);

struct SideFlow {
  int green = 3;
  int offset = 15;
  double rate = 0.0;
};

/// Line of `n` intersections sharing one signal plan. The first main queue
/// gets `main_arrivals`; every other main queue is fed by its predecessor and,
/// if given, by a side queue attached to that predecessor's intersection.
NetworkSpec line_network(int n, const SignalPlan& main_plan,
                         const ArrivalProcess& main_arrivals, int travel_time,
                         const std::optional<SideFlow>& side);

}  // namespace fctl
