#pragma once

#include <functional>
#include <vector>

#include "fctl/arrival.hpp"

namespace fctl {

using PgfFn = std::function<cplx(cplx)>;

/// D(z) = z^g - Y(z, ..., z) and its derivative.
cplx denominator(const ArrivalProcess& p, int green, cplx z);
cplx denominator_derivative(const ArrivalProcess& p, int green, cplx z);

/// Taylor coefficients a_0..a_n of D about z = 0, from the Poisson series of
/// each scenario (no differentiation).
std::vector<double> taylor_coeffs(const ArrivalProcess& p, int green, int n);

struct RootOptions {
  int initial_truncation_offset = 90;  // first truncation is g + offset + step
  int truncation_step = 10;
  int max_truncation_offset = 500;
  double distinct_tol = 1e-8;
  double newton_tol = 1e-13;
  int newton_max_iter = 100;
  double residual_tol = 1e-10;
};

/// The g-1 zeros of D strictly inside the unit disk (z = 1 excluded). A zero
/// at the origin (every scenario carries a deterministic arrival) is kept out
/// of `roots` and recorded by its multiplicity.
struct RootSet {
  std::vector<cplx> roots;
  int zero_order = 0;
  std::vector<double> residuals;
  int truncation = 0;  // Taylor order that produced the accepted seeds

  std::size_t size() const { return roots.size(); }
  double max_residual() const;
};

/// Throws InstabilityError when E[Y] >= g and NumericsError when the count
/// g-1 cannot be reached, a root sits on the unit circle, or a residual
/// exceeds tolerance. Roots are sorted by (real, imaginary).
RootSet find_roots(const ArrivalProcess& p, int green, const RootOptions& opt = {});

/// Polish a single seed with Newton's method on the exact D. Returns false
/// when the iteration does not converge.
bool newton_polish(const ArrivalProcess& p, int green, cplx& z,
                   const RootOptions& opt = {});

/// P(X = k) from the pgf by the Fourier-series inversion on a circle of
/// radius 10^(-gamma/(2k)), gamma = 10, one term per half-period (l = 1).
/// Values in [-1e-8, 0) are clamped to 0.
double invert_pgf(const PgfFn& pgf, int k);

}  // namespace fctl
