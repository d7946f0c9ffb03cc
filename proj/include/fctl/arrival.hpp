#pragma once

// Cyclic arrival processes with within-cycle correlation.
//
// A process is a finite mixture of scenarios. Each scenario fixes, for every
// slot of the cycle, an independent shifted-Poisson law (a deterministic
// number of vehicles plus a Poisson number). One scenario is drawn per cycle,
// independently across cycles. Every process the analysis produces (external
// Poisson inputs, outputs of signalized queues, superpositions of those)
// stays inside this class.

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace fctl {

using cplx = std::complex<double>;

/// z^n for integer n >= 0 by repeated squaring (exact at z = 0).
cplx ipow(cplx z, int n);
double ipow(double x, int n);

/// Law of the arrivals in one slot: `shift` vehicles plus Poisson(`rate`).
struct SlotDistribution {
  int shift = 0;
  double rate = 0.0;

  static SlotDistribution deterministic(int n) { return {n, 0.0}; }
  static SlotDistribution poisson(double rate) { return {0, rate}; }

  cplx pgf(cplx z) const;
  double pmf(int n) const;
  double mean() const { return shift + rate; }
  double variance() const { return rate; }
  bool is_zero() const { return shift == 0 && rate == 0.0; }

  friend SlotDistribution convolve(const SlotDistribution& a,
                                   const SlotDistribution& b) {
    return {a.shift + b.shift, a.rate + b.rate};
  }
  friend bool operator==(const SlotDistribution&,
                         const SlotDistribution&) = default;
};

cplx slot_pgf(const SlotDistribution& d, cplx z);
double slot_pmf(const SlotDistribution& d, int n);

struct Scenario {
  double weight = 1.0;
  std::vector<SlotDistribution> slots;

  int total_shift() const;
  double total_rate() const;
};

class ArrivalProcess {
 public:
  ArrivalProcess() = default;
  /// Validates slot counts, weights > 0 and sum(weights) = 1 within 1e-12.
  ArrivalProcess(int cycle_length, std::vector<Scenario> scenarios);

  static ArrivalProcess zero(int cycle_length);
  static ArrivalProcess iid_poisson(int cycle_length, double rate);
  /// Single scenario with the given per-slot laws.
  static ArrivalProcess independent(std::vector<SlotDistribution> slots);

  int cycle_length() const { return cycle_; }
  const std::vector<Scenario>& scenarios() const { return scenarios_; }
  std::size_t size() const { return scenarios_.size(); }

  /// Y(y_1, ..., y_c).
  cplx joint_pgf(std::span<const cplx> y) const;
  /// Y(z, ..., z).
  cplx total_pgf(cplx z) const;
  /// d/dz Y(z, ..., z).
  cplx total_pgf_derivative(cplx z) const;

  /// Coefficient extraction h_m(z, tail, n_1..n_j): the prefix slots are
  /// pinned to the given counts, slots j+1..m are evaluated at z and divided
  /// by z^(m-j), slots m+1..c take the tail arguments.
  cplx h_eval(int m, cplx z, std::span<const cplx> tail,
              std::span<const int> prefix) const;

  /// P(Y_1 = n_1, ..., Y_j = n_j).
  double prefix_prob(std::span<const int> prefix) const;

  std::vector<double> mean_per_slot() const;
  double mean_total() const;
  /// E[Y(Y-1)] for the cycle total Y.
  double factorial_moment2_total() const;

  bool is_zero() const;

  friend bool operator==(const ArrivalProcess&,
                         const ArrivalProcess&) = default;

 private:
  int cycle_ = 0;
  std::vector<Scenario> scenarios_;
};

/// Independent superposition: the mixture over scenario pairs with slot-wise
/// convolution. The result is merged losslessly.
ArrivalProcess superpose(const ArrivalProcess& a, const ArrivalProcess& b);

/// Merges scenarios with bitwise-identical slot signatures, then drops
/// scenarios lighter than `epsilon_weight` and renormalizes.
ArrivalProcess compact(const ArrivalProcess& p, double epsilon_weight = 0.0);

/// Multi-line human-readable dump of the mixture.
std::string describe(const ArrivalProcess& p);

}  // namespace fctl
