#include "fctl/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <unordered_map>

#include "fctl/rng.hpp"

namespace fctl {

void SimConfig::validate() const {
  if (warmup_cycles < 0) throw std::invalid_argument("warmup_cycles must be >= 0");
  if (cycles <= warmup_cycles) throw std::invalid_argument("cycles must exceed warmup_cycles");
  if (replications < 1) throw std::invalid_argument("replications must be >= 1");
  if (tail_levels < 0) throw std::invalid_argument("tail_levels must be >= 0");
}

namespace {

// Inverse-cdf Poisson sampler; the table covers all but ~1e-16 of the mass
// and the scan continues with the pmf recursion beyond it.
class PoissonSampler {
 public:
  explicit PoissonSampler(double rate) : rate_(rate) {
    double p = std::exp(-rate);
    double c = p;
    cdf_.push_back(c);
    for (int k = 1; c < 1.0 - 1e-16 && k < 10000; ++k) {
      p *= rate / k;
      c += p;
      cdf_.push_back(c);
      if (p == 0.0 && k > rate) break;
    }
  }

  int operator()(double u) const {
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it != cdf_.end()) return static_cast<int>(it - cdf_.begin());
    int k = static_cast<int>(cdf_.size()) - 1;
    double c = cdf_.back();
    double p = std::exp(-rate_ + k * std::log(rate_) - std::lgamma(k + 1.0));
    while (c <= u && p > 0.0) {
      ++k;
      p *= rate_ / k;
      c += p;
    }
    return k;
  }

 private:
  double rate_;
  std::vector<double> cdf_;
};

struct SlotSampler {
  int shift = 0;
  int table = -1;  // -1: deterministic
};

struct ExternalSampler {
  std::vector<double> cumulative;               // [s]
  std::vector<std::vector<SlotSampler>> slots;  // [s][slot]
  std::vector<PoissonSampler> tables;

  explicit ExternalSampler(const ArrivalProcess& p) {
    std::map<double, int> index;
    double acc = 0.0;
    for (const auto& s : p.scenarios()) {
      acc += s.weight;
      cumulative.push_back(acc);
      std::vector<SlotSampler> row;
      for (const auto& d : s.slots) {
        SlotSampler ss{d.shift, -1};
        if (d.rate > 0.0) {
          auto [it, fresh] = index.emplace(d.rate, static_cast<int>(tables.size()));
          if (fresh) tables.emplace_back(d.rate);
          ss.table = it->second;
        }
        row.push_back(ss);
      }
      slots.push_back(std::move(row));
    }
  }

  void draw(RandomStream& rng, std::vector<int>& out) const {
    std::size_t s = 0;
    if (cumulative.size() > 1) {
      const double u = rng.uniform() * cumulative.back();
      while (s + 1 < cumulative.size() && u >= cumulative[s]) ++s;
    }
    const auto& row = slots[s];
    for (std::size_t k = 0; k < row.size(); ++k)
      out[k] = row[k].shift + (row[k].table >= 0 ? tables[row[k].table](rng.uniform()) : 0);
  }
};

struct QueueState {
  int green = 0;
  int cycle = 0;
  int offset = 0;
  std::vector<std::pair<std::size_t, int>> links;
  const ExternalSampler* sampler = nullptr;
  std::vector<int> frame_arrivals;
  std::vector<int> departures_vec;
  std::int64_t x = 0;
  bool emptied = false;
};

Estimate estimate(const std::vector<double>& v) {
  Estimate e;
  const double n = static_cast<double>(v.size());
  for (double x : v) e.mean += x;
  e.mean /= n;
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - e.mean) * (x - e.mean);
    e.se = std::sqrt(ss / (n - 1.0) / n);
  }
  return e;
}

}  // namespace

std::vector<Tally> run_replication(const NetworkSpec& spec, const SimConfig& cfg,
                                   int replication) {
  const std::vector<std::size_t> order = spec.validate();
  const std::size_t n = spec.nodes.size();
  const int c = spec.cycle;
  const int levels = cfg.tail_levels;

  std::vector<std::optional<ExternalSampler>> samplers(n);
  std::vector<QueueState> q(n);
  std::vector<RandomStream> rng;
  rng.reserve(n);
  std::vector<Tally> tally(n);
  int max_travel = 0;
  for (std::size_t v = 0; v < n; ++v) {
    const auto& node = spec.nodes[v];
    rng.emplace_back(cfg.seed, static_cast<std::uint64_t>(replication), v);
    if (node.external) samplers[v].emplace(*node.external);
    auto& s = q[v];
    s.green = node.plan.green;
    s.cycle = c;
    s.offset = node.plan.offset;
    s.sampler = samplers[v] ? &*samplers[v] : nullptr;
    s.frame_arrivals.assign(c, 0);
    s.departures_vec.assign(s.green, 0);
    for (const auto& l : node.upstream) {
      s.links.emplace_back(l.from, l.travel_time);
      max_travel = std::max(max_travel, l.travel_time);
    }
    auto& t = tally[v];
    t.slot_sum.assign(c + 1, 0);
    t.tail_x0.assign(levels, 0);
    t.tail_xg.assign(levels, 0);
    t.tail_xbar.assign(levels, 0);
    t.green_count.assign(s.green + 1, 0);
    t.output_sum.assign(s.green, 0);
  }

  // Departure history, one ring buffer per queue (power-of-two length).
  int hist = 1;
  while (hist < max_travel + 1) hist <<= 1;
  const int mask = hist - 1;
  std::vector<std::vector<int>> departed(n, std::vector<int>(hist, 0));

  // Frame position and frame index advance incrementally; frame -1 is the
  // partial frame before a queue's first green slot.
  std::vector<int> pos(n);
  std::vector<long long> frame(n);
  for (std::size_t v = 0; v < n; ++v) {
    pos[v] = (c - q[v].offset) % c;
    frame[v] = q[v].offset == 0 ? 0 : -1;
  }

  const long long total_slots = (cfg.cycles + 1) * c;
  for (long long t = 0; t < total_slots; ++t) {
    const int ring = static_cast<int>(t & mask);
    for (std::size_t v : order) {
      auto& s = q[v];
      auto& tl = tally[v];
      const int p = pos[v];
      const bool measuring = frame[v] >= cfg.warmup_cycles && frame[v] < cfg.cycles;

      if (p == 0) {
        if (s.sampler) s.sampler->draw(rng[v], s.frame_arrivals);
        s.emptied = s.x == 0;
        if (measuring) {
          tl.slot_sum[0] += s.x;
          for (int m = 1; m <= levels && s.x >= m; ++m) ++tl.tail_x0[m - 1];
          if (s.emptied) ++tl.green_count[0];
        }
      }

      int a = 0;
      if (s.sampler) {
        a = s.frame_arrivals[p];
      } else {
        for (const auto& [from, d] : s.links)
          if (t >= d) a += departed[from][(t - d) & mask];
      }

      int dep = 0;
      if (p < s.green) {
        if (s.x > 0) {
          dep = 1;
          s.x += a - 1;
        } else {
          dep = a;
        }
      } else {
        s.x += a;
      }
      departed[v][ring] = dep;

      if (measuring) {
        const int k = p + 1;
        tl.slot_sum[k] += s.x;
        for (int m = 1; m <= levels && s.x >= m; ++m) ++tl.tail_xbar[m - 1];
        tl.arrivals += a;
        tl.departures += dep;
        if (p < s.green) {
          tl.output_sum[p] += dep;
          s.departures_vec[p] = dep;
          if (k < s.green && !s.emptied && s.x == 0) {
            s.emptied = true;
            ++tl.green_count[k];
          }
          if (k == s.green) {
            for (int m = 1; m <= levels && s.x >= m; ++m) ++tl.tail_xg[m - 1];
            if (!s.emptied) ++tl.green_count[s.green];
            if (cfg.record_output_vectors) ++tl.output_vectors[s.departures_vec];
          }
        }
      }
      if (++pos[v] == c) {
        pos[v] = 0;
        ++frame[v];
      }
    }
  }
  return tally;
}

namespace kernels::serial {
std::vector<std::vector<Tally>> replications(const NetworkSpec& spec, const SimConfig& cfg) {
  cfg.validate();
  std::vector<std::vector<Tally>> out(cfg.replications);
  for (int r = 0; r < cfg.replications; ++r) out[r] = run_replication(spec, cfg, r);
  return out;
}
}  // namespace kernels::serial

namespace kernels::omp {
std::vector<std::vector<Tally>> replications(const NetworkSpec& spec, const SimConfig& cfg) {
  cfg.validate();
  spec.validate();
  std::vector<std::vector<Tally>> out(cfg.replications);
#pragma omp parallel for schedule(dynamic, 1)
  for (int r = 0; r < cfg.replications; ++r) out[r] = run_replication(spec, cfg, r);
  return out;
}
}  // namespace kernels::omp

SimStats summarize(const std::vector<std::vector<Tally>>& reps, std::size_t node,
                   const SignalPlan& plan, const SimConfig& cfg) {
  SimStats st;
  st.green = plan.green;
  st.cycle = plan.cycle();
  st.measured_cycles = cfg.measured_cycles();
  st.replications = static_cast<int>(reps.size());
  const double frames = static_cast<double>(cfg.measured_cycles());
  const int c = st.cycle;
  const int g = st.green;

  auto over = [&](auto&& f) {
    std::vector<double> v;
    v.reserve(reps.size());
    for (const auto& r : reps) v.push_back(f(r[node]));
    return estimate(v);
  };
  auto series = [&](int len, auto&& member) {
    std::vector<Estimate> out;
    for (int i = 0; i < len; ++i)
      out.push_back(over([&](const Tally& t) { return member(t)[i] / frames; }));
    return out;
  };

  st.slot_mean = series(c + 1, [](const Tally& t) -> const auto& { return t.slot_sum; });
  st.xbar_mean = over([&](const Tally& t) {
    double s = 0.0;
    for (int k = 1; k <= c; ++k) s += static_cast<double>(t.slot_sum[k]);
    return s / (frames * c);
  });
  const int levels = cfg.tail_levels;
  st.tail_x0 = series(levels, [](const Tally& t) -> const auto& { return t.tail_x0; });
  st.tail_xg = series(levels, [](const Tally& t) -> const auto& { return t.tail_xg; });
  st.tail_xbar.clear();
  for (int m = 0; m < levels; ++m)
    st.tail_xbar.push_back(
        over([&](const Tally& t) { return t.tail_xbar[m] / (frames * c); }));
  st.green_hist = series(g + 1, [](const Tally& t) -> const auto& { return t.green_count; });
  st.output_mean = series(g, [](const Tally& t) -> const auto& { return t.output_sum; });
  st.arrivals_per_cycle = over([&](const Tally& t) { return t.arrivals / frames; });
  st.departures_per_cycle = over([&](const Tally& t) { return t.departures / frames; });

  if (cfg.record_output_vectors) {
    std::map<std::vector<int>, int> keys;
    for (const auto& r : reps)
      for (const auto& [k, _] : r[node].output_vectors) keys.emplace(k, 0);
    for (const auto& [k, _] : keys)
      st.output_vectors[k] = over([&](const Tally& t) {
        const auto it = t.output_vectors.find(k);
        return it == t.output_vectors.end() ? 0.0 : it->second / frames;
      });
  }
  return st;
}

std::vector<SimStats> simulate_network(const NetworkSpec& spec, const SimConfig& cfg) {
  const auto reps = kernels::omp::replications(spec, cfg);
  std::vector<SimStats> out;
  for (std::size_t v = 0; v < spec.nodes.size(); ++v)
    out.push_back(summarize(reps, v, spec.nodes[v].plan, cfg));
  return out;
}

SimStats simulate_single(const ArrivalProcess& arrivals, const SignalPlan& plan,
                         const SimConfig& cfg) {
  NetworkSpec spec;
  spec.cycle = plan.cycle();
  NetworkNode node;
  node.name = "Q";
  node.plan = plan;
  node.plan.offset = 0;
  node.external = arrivals;
  spec.nodes.push_back(std::move(node));
  return simulate_network(spec, cfg).front();
}

}  // namespace fctl
