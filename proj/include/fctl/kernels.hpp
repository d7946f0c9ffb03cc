#pragma once

// Data-parallel inner loops. Every kernel has a serial reference in
// kernels::serial and an OpenMP version in kernels::omp with identical
// results: parallel loops write disjoint slots and reductions run in a
// fixed order afterwards.

#include <functional>
#include <span>
#include <vector>

#include "fctl/arrival.hpp"
#include "fctl/numerics.hpp"

namespace fctl::kernels {

/// Per-scenario slot pmfs for pushing a queue-length law through one cycle.
struct CycleLaws {
  int green = 0;
  std::vector<double> weights;                              // [s]
  std::vector<std::vector<std::vector<double>>> slot_pmf;   // [s][slot][n]

  static CycleLaws from(const ArrivalProcess& p, int green, double cutoff = 1e-17);
  int cycle() const { return slot_pmf.empty() ? 0 : static_cast<int>(slot_pmf[0].size()); }
};

/// One step of the slot recursion applied to a pmf.
void green_step(std::span<const double> in, std::span<const double> arrivals,
                std::vector<double>& out);
void red_step(std::span<const double> in, std::span<const double> arrivals,
              std::vector<double>& out);

namespace serial {
/// invert_pgf(pgf, k) for k = first..last-1.
std::vector<double> invert_range(const PgfFn& pgf, int first, int last);
/// Laws of X_0..X_c given the law of X_0.
std::vector<std::vector<double>> push_through_cycle(const CycleLaws& laws,
                                                    const std::vector<double>& x0);
/// out[i][l] = f(l, points[i]).
std::vector<std::vector<cplx>> evaluate_grid(int columns, std::span<const cplx> points,
                                             const std::function<cplx(int, cplx)>& f);
}  // namespace serial

namespace omp {
std::vector<double> invert_range(const PgfFn& pgf, int first, int last);
std::vector<std::vector<double>> push_through_cycle(const CycleLaws& laws,
                                                    const std::vector<double>& x0);
std::vector<std::vector<cplx>> evaluate_grid(int columns, std::span<const cplx> points,
                                             const std::function<cplx(int, cplx)>& f);
}  // namespace omp

}  // namespace fctl::kernels
