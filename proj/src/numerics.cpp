#include "fctl/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Core>
#include <fmt/format.h>
#include <unsupported/Eigen/Polynomials>

#include "fctl/errors.hpp"

namespace fctl {

cplx denominator(const ArrivalProcess& p, int green, cplx z) {
  return ipow(z, green) - p.total_pgf(z);
}

cplx denominator_derivative(const ArrivalProcess& p, int green, cplx z) {
  cplx d = green > 0 ? static_cast<double>(green) * ipow(z, green - 1) : cplx{};
  return d - p.total_pgf_derivative(z);
}

std::vector<double> taylor_coeffs(const ArrivalProcess& p, int green, int n) {
  std::vector<double> a(n + 1, 0.0);
  if (green <= n) a[green] = 1.0;
  for (const auto& s : p.scenarios()) {
    const int shift = s.total_shift();
    const double lam = s.total_rate();
    if (lam == 0.0) {
      if (shift <= n) a[shift] -= s.weight;
      continue;
    }
    const double log_lam = std::log(lam);
    for (int k = shift; k <= n; ++k) {
      const int m = k - shift;
      a[k] -= s.weight * std::exp(-lam + m * log_lam - std::lgamma(m + 1.0));
    }
  }
  return a;
}

double RootSet::max_residual() const {
  double r = 0.0;
  for (double v : residuals) r = std::max(r, v);
  return r;
}

bool newton_polish(const ArrivalProcess& p, int green, cplx& z,
                   const RootOptions& opt) {
  for (int it = 0; it < opt.newton_max_iter; ++it) {
    const cplx d = denominator(p, green, z);
    const cplx dd = denominator_derivative(p, green, z);
    if (dd == cplx{}) return false;
    const cplx step = d / dd;
    z -= step;
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    if (std::abs(step) <= opt.newton_tol * std::max(1.0, std::abs(z))) return true;
  }
  return false;
}

namespace {

// Trailing coefficients far below the bulk cannot move zeros inside the
// closed unit disk; dropping them keeps the companion matrix well scaled.
// The first `skip` coefficients are exactly zero and are divided out.
Eigen::VectorXd trimmed_polynomial(const std::vector<double>& a, int skip) {
  double scale = 0.0;
  for (double v : a) scale = std::max(scale, std::abs(v));
  std::size_t deg = a.size() - 1;
  while (deg > static_cast<std::size_t>(skip) && std::abs(a[deg]) <= 1e-18 * scale) --deg;
  Eigen::VectorXd poly(deg + 1 - skip);
  for (std::size_t k = skip; k <= deg; ++k) poly[k - skip] = a[k];
  return poly;
}

bool same_root(cplx a, cplx b, double tol) { return std::abs(a - b) < tol; }

}  // namespace

RootSet find_roots(const ArrivalProcess& p, int green, const RootOptions& opt) {
  if (green < 1) throw std::invalid_argument("find_roots: green must be >= 1");
  const double mean = p.mean_total();
  if (!(mean < green))
    throw InstabilityError(
        fmt::format("unstable queue: E[Y] = {:.6f} >= g = {}", mean, green),
        mean / green);
  RootSet result;
  if (green == 1) return result;
  int zero_order = green;
  for (const auto& s : p.scenarios()) zero_order = std::min(zero_order, s.total_shift());
  result.zero_order = zero_order;
  const std::size_t wanted = static_cast<std::size_t>(green - 1 - zero_order);

  int n = green + opt.initial_truncation_offset;
  std::vector<cplx> found;
  std::vector<cplx> on_circle;
  while (found.size() != wanted) {
    n += opt.truncation_step;
    if (n > green + opt.max_truncation_offset)
      throw NumericsError(fmt::format(
          "find_roots: found {} of {} roots inside the unit disk up to truncation {}{}",
          found.size(), wanted, n - opt.truncation_step,
          on_circle.empty() ? "" : " (roots detected on the unit circle)"));

    const Eigen::VectorXd poly = trimmed_polynomial(taylor_coeffs(p, green, n), zero_order);
    if (poly.size() < 2) continue;
    Eigen::PolynomialSolver<double, Eigen::Dynamic> solver;
    solver.compute(poly);
    const auto& seeds = solver.roots();

    std::vector<cplx> polished(seeds.size());
    std::vector<char> ok(seeds.size(), 0);
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < seeds.size(); ++i) {
      cplx z = seeds[i];
      // Seeds far outside the disk cannot polish into it.
      if (std::abs(z) > 2.0) continue;
      ok[i] = newton_polish(p, green, z, opt) ? 1 : 0;
      polished[i] = z;
    }

    found.clear();
    on_circle.clear();
    for (Eigen::Index i = 0; i < seeds.size(); ++i) {
      if (!ok[i]) continue;
      cplx z = polished[i];
      if (std::abs(z.imag()) < 1e-10) {
        z = {z.real(), 0.0};
        newton_polish(p, green, z, opt);
        z = {z.real(), 0.0};
      }
      if (same_root(z, 1.0, opt.distinct_tol)) continue;
      if (zero_order > 0 && std::abs(z) < opt.distinct_tol) continue;
      const double modulus = std::abs(z);
      if (std::abs(modulus - 1.0) < 1e-9) {
        on_circle.push_back(z);
        continue;
      }
      if (modulus >= 1.0) continue;
      const bool dup = std::any_of(found.begin(), found.end(), [&](cplx w) {
        return same_root(w, z, opt.distinct_tol);
      });
      if (!dup) found.push_back(z);
    }
    if (!on_circle.empty())
      throw NumericsError(fmt::format(
          "find_roots: {} zero(s) of z^g - Y(z) lie on the unit circle away from z = 1 "
          "(periodic arrival pattern); first at {:.12g}{:+.12g}i",
          on_circle.size(), on_circle.front().real(), on_circle.front().imag()));
    if (found.size() > wanted)
      throw NumericsError(fmt::format(
          "find_roots: {} distinct zeros inside the disk, expected {}", found.size(), wanted));
  }

  std::sort(found.begin(), found.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  result.roots = std::move(found);
  result.truncation = n;
  for (cplx z : result.roots) {
    const double res = std::abs(denominator(p, green, z));
    if (res >= opt.residual_tol)
      throw NumericsError(
          fmt::format("find_roots: residual {:.3e} at root {:.12g}{:+.12g}i", res,
                      z.real(), z.imag()));
    result.residuals.push_back(res);
  }
  return result;
}

double invert_pgf(const PgfFn& pgf, int k) {
  constexpr int l = 1;
  constexpr double gamma = 10.0;
  double p = 0.0;
  if (k < 0) return 0.0;
  if (k == 0) {
    p = pgf(cplx{std::pow(10.0, -gamma), 0.0}).real();
  } else {
    const double r = std::pow(10.0, -gamma / (2.0 * l * k));
    double sum = pgf(cplx{r, 0.0}).real();
    sum += ((k % 2 == 0) ? 1.0 : -1.0) * pgf(cplx{-r, 0.0}).real();
    for (int j = 1; j <= l * k - 1; ++j) {
      const cplx weight = std::polar(1.0, -std::numbers::pi * j / l);
      sum += 2.0 * (weight * pgf(std::polar(r, std::numbers::pi * j / (l * k)))).real();
    }
    p = sum / (2.0 * l * k * std::pow(r, k));
  }
  if (p < 0.0 && p >= -1e-8) p = 0.0;
  return p;
}

}  // namespace fctl
