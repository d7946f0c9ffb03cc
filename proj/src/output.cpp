#include "fctl/output.hpp"

#include <fmt/format.h>

#include "fctl/errors.hpp"

namespace fctl {

namespace {

double saturation_mass(double emptied) {
  double sat = 1.0 - emptied;
  if (sat < -1e-9)
    throw NumericsError(fmt::format("effective green masses sum to {:.12g} > 1", emptied));
  return sat < 0.0 ? 0.0 : sat;
}

}  // namespace

std::vector<double> effective_green_dist(const QueueSolution& sol) {
  const int g = sol.green();
  const int ns = static_cast<int>(sol.arrivals().size());
  std::vector<double> dist(g + 1, 0.0);
  double emptied = 0.0;
  for (int j = 0; j < g; ++j) {
    for (int s = 0; s < ns; ++s) dist[j] += sol.green_scenario_mass(j, s);
    emptied += dist[j];
  }
  dist[g] = saturation_mass(emptied);
  return dist;
}

OutputProcess output_pgf(const QueueSolution& sol) {
  const int g = sol.green();
  const auto& sc = sol.arrivals().scenarios();
  std::vector<Scenario> parts;
  double emptied = 0.0;
  for (int j = 0; j < g; ++j)
    for (std::size_t s = 0; s < sc.size(); ++s) {
      const double w = sol.green_scenario_mass(j, static_cast<int>(s));
      if (!(w > 0.0)) continue;
      Scenario out{w, std::vector<SlotDistribution>(g, SlotDistribution::deterministic(1))};
      for (int i = j; i < g; ++i) out.slots[i] = sc[s].slots[i];
      parts.push_back(std::move(out));
      emptied += w;
    }
  const double sat = saturation_mass(emptied);
  if (sat > 0.0)
    parts.push_back(
        Scenario{sat, std::vector<SlotDistribution>(g, SlotDistribution::deterministic(1))});

  OutputProcess o;
  o.green = g;
  o.mixture = compact(ArrivalProcess(g, std::move(parts)), 0.0);
  o.green_dist = effective_green_dist(sol);
  return o;
}

std::vector<double> output_mean_per_slot(const OutputProcess& o) {
  return o.mixture.mean_per_slot();
}

}  // namespace fctl
