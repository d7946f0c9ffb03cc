#include "fctl/network.hpp"

#include <algorithm>
#include <exception>
#include <map>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "fctl/errors.hpp"

namespace fctl {

std::size_t NetworkSpec::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].name == name) return i;
  throw std::invalid_argument(fmt::format("unknown network node '{}'", name));
}

std::vector<std::size_t> NetworkSpec::validate() const {
  if (cycle < 1) throw std::invalid_argument("network cycle must be >= 1");
  const std::size_t n = nodes.size();
  if (n == 0) throw std::invalid_argument("network has no nodes");
  std::vector<int> indegree(n, 0);
  std::vector<std::vector<std::size_t>> children(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& node = nodes[i];
    if (node.plan.cycle() != cycle)
      throw std::invalid_argument(fmt::format("node '{}' has cycle {}, network cycle is {}",
                                              node.name, node.plan.cycle(), cycle));
    if (node.plan.offset < 0 || node.plan.offset >= cycle)
      throw std::invalid_argument(fmt::format("node '{}' offset out of range", node.name));
    if (node.external.has_value() == !node.upstream.empty())
      throw std::invalid_argument(fmt::format(
          "node '{}' needs exactly one of external arrivals or upstream links", node.name));
    if (node.external && node.external->cycle_length() != cycle)
      throw std::invalid_argument(
          fmt::format("node '{}' external arrivals have the wrong cycle", node.name));
    for (const auto& link : node.upstream) {
      if (link.from >= n)
        throw std::invalid_argument(fmt::format("node '{}' links to a missing node", node.name));
      if (link.travel_time < 0)
        throw std::invalid_argument(fmt::format("node '{}' has negative travel time", node.name));
      children[link.from].push_back(i);
      ++indegree[i];
    }
  }
  std::vector<std::size_t> order;
  std::vector<std::size_t> ready;
  for (std::size_t i = 0; i < n; ++i)
    if (indegree[i] == 0) ready.push_back(i);
  while (!ready.empty()) {
    const std::size_t v = ready.front();
    ready.erase(ready.begin());
    order.push_back(v);
    for (std::size_t w : children[v])
      if (--indegree[w] == 0) ready.push_back(w);
  }
  if (order.size() != n) throw std::invalid_argument("network contains a cycle");
  return order;
}

ArrivalProcess embed_output(const OutputProcess& o, int travel_time, int offset_shift,
                            int cycle) {
  if (o.green > cycle) throw std::invalid_argument("embed_output: green exceeds cycle");
  if (travel_time < 0) throw std::invalid_argument("embed_output: negative travel time");
  const int shift = ((offset_shift + travel_time) % cycle + cycle) % cycle;
  std::vector<Scenario> out;
  out.reserve(o.mixture.size());
  for (const auto& s : o.mixture.scenarios()) {
    Scenario e{s.weight, std::vector<SlotDistribution>(cycle)};
    for (int k = 1; k <= o.green; ++k) e.slots[(k - 1 + shift) % cycle] = s.slots[k - 1];
    out.push_back(std::move(e));
  }
  return ArrivalProcess(cycle, std::move(out));
}

NetworkSolution analyze_network(const NetworkSpec& spec) {
  NetworkSolution result;
  result.order = spec.validate();
  const std::size_t n = spec.nodes.size();

  std::vector<int> depth(n, 0);
  int max_depth = 0;
  for (std::size_t v : result.order) {
    for (const auto& link : spec.nodes[v].upstream)
      depth[v] = std::max(depth[v], depth[link.from] + 1);
    max_depth = std::max(max_depth, depth[v]);
  }

  std::vector<std::optional<NodeResult>> solved(n);
  for (int level = 0; level <= max_depth; ++level) {
    std::vector<std::size_t> batch;
    for (std::size_t v : result.order)
      if (depth[v] == level) batch.push_back(v);
    std::vector<std::exception_ptr> errors(batch.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (int b = 0; b < static_cast<int>(batch.size()); ++b) {
      const std::size_t v = batch[b];
      const auto& node = spec.nodes[v];
      try {
        ArrivalProcess input;
        if (node.external) {
          input = *node.external;
        } else {
          bool first = true;
          for (const auto& link : node.upstream) {
            const auto& up = spec.nodes[link.from];
            const ArrivalProcess part =
                embed_output(solved[link.from]->output, link.travel_time,
                             up.plan.offset - node.plan.offset, spec.cycle);
            input = first ? part : superpose(input, part);
            first = false;
          }
        }
        input = compact(input, spec.epsilon_weight);
        const double rho = input.mean_total() / node.plan.green;
        if (!(rho < 1.0))
          throw InstabilityError(
              fmt::format("node '{}' is unstable: rho = {:.6f}", node.name, rho), rho);
        NodeResult r{input, solve_q(node.plan, input), {}, rho};
        r.output = output_pgf(r.solution);
        solved[v] = std::move(r);
      } catch (const InstabilityError& e) {
        errors[b] = std::make_exception_ptr(InstabilityError(
            fmt::format("node '{}': {}", node.name, e.what()), e.rho()));
      } catch (...) {
        errors[b] = std::current_exception();
      }
    }
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  result.nodes.reserve(n);
  for (auto& r : solved) result.nodes.push_back(std::move(*r));
  return result;
}

std::string derived_input_report(const NetworkSolution& sol, const NetworkSpec& spec,
                                 std::size_t node) {
  if (node >= sol.nodes.size()) throw std::out_of_range("derived_input_report: bad node");
  std::ostringstream os;
  os << "input of '" << spec.nodes[node].name << "' (rho = "
     << fmt::format("{:.6f}", sol.nodes[node].rho) << ")\n";
  os << describe(sol.nodes[node].input);
  return os.str();
}

NetworkSpec line_network(int n, const SignalPlan& main_plan,
                         const ArrivalProcess& main_arrivals, int travel_time,
                         const std::optional<SideFlow>& side) {
  if (n < 1) throw std::invalid_argument("line_network: need at least one intersection");
  NetworkSpec spec;
  spec.cycle = main_plan.cycle();
  std::vector<std::size_t> main_ids;
  for (int i = 1; i <= n; ++i) {
    NetworkNode m;
    m.name = fmt::format("Q{}_0", i);
    m.plan = main_plan;
    if (i == 1) {
      m.external = main_arrivals;
    } else {
      m.upstream.push_back({main_ids.back(), travel_time});
      if (side) m.upstream.push_back({spec.nodes.size() - 1, travel_time});
    }
    main_ids.push_back(spec.nodes.size());
    spec.nodes.push_back(std::move(m));
    if (side && i < n) {
      NetworkNode s;
      s.name = fmt::format("Q{}_1", i);
      s.plan = SignalPlan{side->green, spec.cycle - side->green, side->offset};
      s.external = ArrivalProcess::iid_poisson(spec.cycle, side->rate);
      s.reported = false;
      spec.nodes.push_back(std::move(s));
    }
  }
  return spec;
}

}  // namespace fctl
