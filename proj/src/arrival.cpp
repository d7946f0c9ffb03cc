#include "fctl/arrival.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <fmt/format.h>

namespace fctl {

cplx ipow(cplx z, int n) {
  cplx result{1.0, 0.0};
  while (n > 0) {
    if (n & 1) result *= z;
    z *= z;
    n >>= 1;
  }
  return result;
}

double ipow(double x, int n) {
  double result = 1.0;
  while (n > 0) {
    if (n & 1) result *= x;
    x *= x;
    n >>= 1;
  }
  return result;
}

cplx SlotDistribution::pgf(cplx z) const {
  cplx v = ipow(z, shift);
  if (rate != 0.0) v *= std::exp(rate * (z - 1.0));
  return v;
}

double SlotDistribution::pmf(int n) const {
  const int k = n - shift;
  if (k < 0) return 0.0;
  if (rate == 0.0) return k == 0 ? 1.0 : 0.0;
  return std::exp(-rate + k * std::log(rate) - std::lgamma(k + 1.0));
}

cplx slot_pgf(const SlotDistribution& d, cplx z) { return d.pgf(z); }
double slot_pmf(const SlotDistribution& d, int n) { return d.pmf(n); }

int Scenario::total_shift() const {
  int s = 0;
  for (const auto& d : slots) s += d.shift;
  return s;
}

double Scenario::total_rate() const {
  double r = 0.0;
  for (const auto& d : slots) r += d.rate;
  return r;
}

ArrivalProcess::ArrivalProcess(int cycle_length, std::vector<Scenario> scenarios)
    : cycle_(cycle_length), scenarios_(std::move(scenarios)) {
  if (cycle_ < 1) throw std::invalid_argument("cycle length must be >= 1");
  if (scenarios_.empty())
    throw std::invalid_argument("arrival process needs at least one scenario");
  double total = 0.0;
  for (const auto& s : scenarios_) {
    if (static_cast<int>(s.slots.size()) != cycle_)
      throw std::invalid_argument(
          fmt::format("scenario has {} slots, cycle length is {}",
                      s.slots.size(), cycle_));
    if (!(s.weight > 0.0))
      throw std::invalid_argument("scenario weight must be positive");
    for (const auto& d : s.slots)
      if (d.shift < 0 || !(d.rate >= 0.0) || !std::isfinite(d.rate))
        throw std::invalid_argument("slot shift and rate must be nonnegative");
    total += s.weight;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument(
        fmt::format("scenario weights sum to {:.17g}, expected 1", total));
}

ArrivalProcess ArrivalProcess::zero(int cycle_length) {
  return ArrivalProcess(
      cycle_length,
      {Scenario{1.0, std::vector<SlotDistribution>(cycle_length)}});
}

ArrivalProcess ArrivalProcess::iid_poisson(int cycle_length, double rate) {
  return ArrivalProcess(
      cycle_length,
      {Scenario{1.0, std::vector<SlotDistribution>(
                         cycle_length, SlotDistribution::poisson(rate))}});
}

ArrivalProcess ArrivalProcess::independent(std::vector<SlotDistribution> slots) {
  const int c = static_cast<int>(slots.size());
  return ArrivalProcess(c, {Scenario{1.0, std::move(slots)}});
}

cplx ArrivalProcess::joint_pgf(std::span<const cplx> y) const {
  if (static_cast<int>(y.size()) != cycle_)
    throw std::invalid_argument("joint_pgf: argument length != cycle length");
  cplx total{0.0, 0.0};
  for (const auto& s : scenarios_) {
    cplx prod{1.0, 0.0};
    for (int i = 0; i < cycle_; ++i) prod *= s.slots[i].pgf(y[i]);
    total += s.weight * prod;
  }
  return total;
}

cplx ArrivalProcess::total_pgf(cplx z) const {
  cplx total{0.0, 0.0};
  for (const auto& s : scenarios_) {
    const double lam = s.total_rate();
    cplx v = ipow(z, s.total_shift());
    if (lam != 0.0) v *= std::exp(lam * (z - 1.0));
    total += s.weight * v;
  }
  return total;
}

cplx ArrivalProcess::total_pgf_derivative(cplx z) const {
  cplx total{0.0, 0.0};
  for (const auto& s : scenarios_) {
    const int shift = s.total_shift();
    const double lam = s.total_rate();
    const cplx e = lam != 0.0 ? std::exp(lam * (z - 1.0)) : cplx{1.0, 0.0};
    cplx d = lam * ipow(z, shift);
    if (shift > 0) d += static_cast<double>(shift) * ipow(z, shift - 1);
    total += s.weight * d * e;
  }
  return total;
}

cplx ArrivalProcess::h_eval(int m, cplx z, std::span<const cplx> tail,
                            std::span<const int> prefix) const {
  const int j = static_cast<int>(prefix.size());
  if (j > m || m > cycle_)
    throw std::invalid_argument("h_eval: need 0 <= j <= m <= c");
  if (static_cast<int>(tail.size()) != cycle_ - m)
    throw std::invalid_argument("h_eval: tail length must be c - m");
  if (m > j && z == cplx{0.0, 0.0})
    throw std::domain_error("h_eval: pole at z = 0");
  const cplx scale = ipow(z, m - j);
  cplx total{0.0, 0.0};
  for (const auto& s : scenarios_) {
    double mass = s.weight;
    for (int i = 0; i < j && mass != 0.0; ++i) mass *= s.slots[i].pmf(prefix[i]);
    if (mass == 0.0) continue;
    cplx prod{1.0, 0.0};
    for (int i = j; i < m; ++i) prod *= s.slots[i].pgf(z);
    for (int i = m; i < cycle_; ++i) prod *= s.slots[i].pgf(tail[i - m]);
    total += mass * prod;
  }
  return total / scale;
}

double ArrivalProcess::prefix_prob(std::span<const int> prefix) const {
  if (static_cast<int>(prefix.size()) > cycle_)
    throw std::invalid_argument("prefix longer than cycle");
  double total = 0.0;
  for (const auto& s : scenarios_) {
    double mass = s.weight;
    for (std::size_t i = 0; i < prefix.size() && mass != 0.0; ++i)
      mass *= s.slots[i].pmf(prefix[i]);
    total += mass;
  }
  return total;
}

std::vector<double> ArrivalProcess::mean_per_slot() const {
  std::vector<double> m(cycle_, 0.0);
  for (const auto& s : scenarios_)
    for (int i = 0; i < cycle_; ++i) m[i] += s.weight * s.slots[i].mean();
  return m;
}

double ArrivalProcess::mean_total() const {
  double m = 0.0;
  for (const auto& s : scenarios_) m += s.weight * (s.total_shift() + s.total_rate());
  return m;
}

double ArrivalProcess::factorial_moment2_total() const {
  // Per scenario the total is shift + Poisson(rate): E[Y(Y-1)] = var + mean^2 - mean.
  double m2 = 0.0;
  for (const auto& s : scenarios_) {
    const double mu = s.total_shift() + s.total_rate();
    m2 += s.weight * (s.total_rate() + mu * mu - mu);
  }
  return m2;
}

bool ArrivalProcess::is_zero() const {
  return std::all_of(scenarios_.begin(), scenarios_.end(), [](const Scenario& s) {
    return std::all_of(s.slots.begin(), s.slots.end(),
                       [](const SlotDistribution& d) { return d.is_zero(); });
  });
}

ArrivalProcess superpose(const ArrivalProcess& a, const ArrivalProcess& b) {
  if (a.cycle_length() != b.cycle_length())
    throw std::invalid_argument("superpose: cycle lengths differ");
  const int c = a.cycle_length();
  std::vector<Scenario> out;
  out.reserve(a.size() * b.size());
  for (const auto& sa : a.scenarios())
    for (const auto& sb : b.scenarios()) {
      Scenario s{sa.weight * sb.weight, std::vector<SlotDistribution>(c)};
      for (int i = 0; i < c; ++i) s.slots[i] = convolve(sa.slots[i], sb.slots[i]);
      out.push_back(std::move(s));
    }
  // Products of weights summing to one can drift by a few ulps.
  const double total = std::accumulate(
      out.begin(), out.end(), 0.0,
      [](double acc, const Scenario& s) { return acc + s.weight; });
  for (auto& s : out) s.weight /= total;
  return compact(ArrivalProcess(c, std::move(out)), 0.0);
}

namespace {

using Signature = std::vector<std::pair<int, std::uint64_t>>;

Signature signature_of(const Scenario& s) {
  Signature sig;
  sig.reserve(s.slots.size());
  for (const auto& d : s.slots)
    sig.emplace_back(d.shift, std::bit_cast<std::uint64_t>(d.rate));
  return sig;
}

}  // namespace

ArrivalProcess compact(const ArrivalProcess& p, double epsilon_weight) {
  if (epsilon_weight < 0.0)
    throw std::invalid_argument("compact: epsilon_weight must be >= 0");
  std::map<Signature, std::size_t> index;
  std::vector<Scenario> merged;
  for (const auto& s : p.scenarios()) {
    auto [it, fresh] = index.try_emplace(signature_of(s), merged.size());
    if (fresh)
      merged.push_back(s);
    else
      merged[it->second].weight += s.weight;
  }
  std::vector<Scenario> kept;
  kept.reserve(merged.size());
  for (auto& s : merged)
    if (s.weight >= epsilon_weight) kept.push_back(std::move(s));
  if (kept.empty()) throw std::invalid_argument("compact: every scenario dropped");
  double total = 0.0;
  for (const auto& s : kept) total += s.weight;
  for (auto& s : kept) s.weight /= total;
  return ArrivalProcess(p.cycle_length(), std::move(kept));
}

std::string describe(const ArrivalProcess& p) {
  std::ostringstream os;
  os << fmt::format("cycle {} slots, {} scenario(s), mean arrivals per cycle {:.6f}\n",
                    p.cycle_length(), p.size(), p.mean_total());
  int idx = 0;
  for (const auto& s : p.scenarios()) {
    os << fmt::format("  [{}] weight {:.6g}:", idx++, s.weight);
    for (int i = 0; i < p.cycle_length(); ++i) {
      const auto& d = s.slots[i];
      if (d.is_zero()) continue;
      os << fmt::format(" {}:", i + 1);
      if (d.shift > 0) os << fmt::format("det({})", d.shift);
      if (d.shift > 0 && d.rate > 0.0) os << '+';
      if (d.rate > 0.0) os << fmt::format("poi({:.6g})", d.rate);
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace fctl
