#pragma once

// Stationary analysis of one fixed-cycle traffic-light queue with
// within-cycle-correlated arrivals.
//
// Slots 1..g of the (local) cycle are green and g+1..c are red. X_k is the
// queue length at the end of slot k; X_0 is the length at the cycle start.

#include <memory>
#include <string>
#include <vector>

#include "fctl/arrival.hpp"
#include "fctl/lattice.hpp"
#include "fctl/numerics.hpp"

namespace fctl {

struct SignalPlan {
  int green = 1;
  int red = 0;
  /// Red slots of the common cycle that precede this queue's green phase.
  int offset = 0;

  int cycle() const { return green + red; }
};

struct TailTable {
  std::vector<double> x0;    // P(X_0 >= m), m = 1..levels
  std::vector<double> xg;    // P(X_g >= m)
  std::vector<double> xbar;  // P(X_bar >= m)
};

class QueueSolution {
 public:
  const SignalPlan& plan() const { return plan_; }
  const ArrivalProcess& arrivals() const { return arrivals_; }
  const std::vector<double>& q() const { return q_; }
  const RootSet& roots() const { return roots_; }
  const GTable& g_table() const { return *table_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  int green() const { return plan_.green; }
  int cycle() const { return plan_.cycle(); }
  /// E[Y_total] / g.
  double occupation() const { return arrivals_.mean_total() / plan_.green; }

  /// sum_{un in G(j,l)} P_s(un) for scenario s (unweighted).
  double prefix_mass(int s, int l, int j) const;
  /// sum_l q_l sum_{un in G(j,l)} w_s P_s(un): mass of {G = j, scenario s}.
  double green_scenario_mass(int j, int s) const;

  cplx zeta(int l, cplx z) const;
  /// b_l = zeta_l'(1) from conditional means.
  double zeta_derivative_at_one(int l) const;
  cplx numerator(cplx z) const;
  cplx denominator(cplx z) const;

  /// Linear-system residual in max norm (complex q before rounding).
  double system_residual() const { return system_residual_; }

  cplx x0(cplx z) const;
  /// X_k(z), 0 <= k <= c. Pole at z = 0 for k >= 1.
  cplx xk(int k, cplx z) const;
  cplx xbar(cplx z) const;

  double mean_x0() const;
  /// E[X_k], 0 <= k <= c, via the slot recursions.
  double mean_xk(int k) const;
  std::vector<double> mean_per_slot() const;  // k = 0..c
  /// (1/c) sum_{k=1..c} E[X_k].
  double mean_xbar() const;

  /// P(X_0 = n) by inversion of x0 until the captured mass reaches
  /// 1 - tail_mass (or max_states).
  std::vector<double> x0_pmf(double tail_mass = 1e-12, int max_states = 4000) const;
  /// Distributions of X_0..X_c obtained by pushing the X_0 law through one
  /// cycle scenario by scenario.
  std::vector<std::vector<double>> slot_pmfs(const std::vector<double>& x0_law) const;
  std::vector<double> xbar_pmf(const std::vector<std::vector<double>>& slot_laws) const;

  TailTable tail_table(int levels) const;

 private:
  friend QueueSolution solve_q(const SignalPlan&, const ArrivalProcess&,
                               const RootOptions&);

  struct ScenarioSums {
    std::vector<int> shift_prefix;    // sum of shifts over slots [0, i)
    std::vector<double> rate_prefix;  // sum of rates over slots [0, i)
    std::vector<double> mean;         // per-slot mean
  };
  // z^{shifts} exp(rates (z-1)) over slots a+1..b (1-based, a < b).
  cplx segment_pgf(int s, int a, int b, cplx z) const;
  cplx x0_raw(cplx z) const;

  SignalPlan plan_;
  ArrivalProcess arrivals_;
  std::shared_ptr<const GTable> table_;
  RootSet roots_;
  std::vector<double> q_;
  std::vector<ScenarioSums> sums_;
  std::vector<double> prefix_mass_;  // [s][l][j] flattened
  std::vector<double> b_;            // [s][j] = sum_l q_l prefix_mass
  std::vector<std::string> warnings_;
  double system_residual_ = 0.0;
  bool trivial_ = false;  // no arrivals at all: queue always empty
};

/// Builds the boundary system from the roots and b_l, solves for q.
/// Throws InstabilityError if g <= E[Y], NumericsError on numerical failure.
QueueSolution solve_q(const SignalPlan& plan, const ArrivalProcess& arrivals,
                      const RootOptions& opt = {});

// Evaluators borrow the solution; it must outlive them.
PgfFn x0_pgf(const QueueSolution& sol);
PgfFn xk_pgf(const QueueSolution& sol, int k);
PgfFn xbar_pgf(const QueueSolution& sol);

}  // namespace fctl
