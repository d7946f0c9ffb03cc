#include "fctl/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "fctl/errors.hpp"
#include "fctl/kernels.hpp"

namespace fctl {

namespace {

// Removable singularities of X_0 (z = 1 and the roots) are handled by the
// mean value property: X_0 at the centre of a small circle equals the
// average over equally spaced points on it.
constexpr double kSingularRadius = 1e-4;
constexpr double kCircleRadius = 1e-3;
constexpr int kCirclePoints = 16;

}  // namespace

cplx QueueSolution::segment_pgf(int s, int a, int b, cplx z) const {
  const auto& sum = sums_[s];
  const int shift = sum.shift_prefix[b] - sum.shift_prefix[a];
  const double rate = sum.rate_prefix[b] - sum.rate_prefix[a];
  cplx v = ipow(z, shift);
  if (rate != 0.0) v *= std::exp(rate * (z - 1.0));
  return v;
}

double QueueSolution::prefix_mass(int s, int l, int j) const {
  const int g = plan_.green;
  return prefix_mass_[(static_cast<std::size_t>(s) * g + l) * g + j];
}

double QueueSolution::green_scenario_mass(int j, int s) const {
  const int g = plan_.green;
  return arrivals_.scenarios()[s].weight * b_[static_cast<std::size_t>(s) * g + j];
}

cplx QueueSolution::zeta(int l, cplx z) const {
  const int g = plan_.green;
  const int c = plan_.cycle();
  if (l < 0 || l >= g) throw std::out_of_range("zeta: l out of range");
  cplx total{};
  const auto& sc = arrivals_.scenarios();
  const cplx zg = ipow(z, g);
  for (std::size_t s = 0; s < sc.size(); ++s) {
    const cplx replacement = zg * segment_pgf(static_cast<int>(s), g, c, z);
    for (int j = l; j < g; ++j) {
      const double mass = prefix_mass(static_cast<int>(s), l, j);
      if (mass == 0.0) continue;
      total += sc[s].weight * mass *
               (replacement - ipow(z, j) * segment_pgf(static_cast<int>(s), j, c, z));
    }
  }
  return total;
}

double QueueSolution::zeta_derivative_at_one(int l) const {
  const int g = plan_.green;
  double b = 0.0;
  const auto& sc = arrivals_.scenarios();
  for (std::size_t s = 0; s < sc.size(); ++s) {
    const auto& sum = sums_[s];
    for (int j = l; j < g; ++j) {
      const double mass = prefix_mass(static_cast<int>(s), l, j);
      if (mass == 0.0) continue;
      double green_mean = 0.0;
      for (int i = j; i < g; ++i) green_mean += sum.mean[i];
      b += sc[s].weight * mass * (g - j - green_mean);
    }
  }
  return b;
}

cplx QueueSolution::numerator(cplx z) const {
  const int g = plan_.green;
  const int c = plan_.cycle();
  const auto& sc = arrivals_.scenarios();
  const cplx zg = ipow(z, g);
  cplx total{};
  for (std::size_t s = 0; s < sc.size(); ++s) {
    const int si = static_cast<int>(s);
    const cplx replacement = zg * segment_pgf(si, g, c, z);
    cplx part{};
    for (int j = 0; j < g; ++j) {
      const double mass = b_[s * g + j];
      if (mass == 0.0) continue;
      part += mass * (replacement - ipow(z, j) * segment_pgf(si, j, c, z));
    }
    total += sc[s].weight * part;
  }
  return total;
}

cplx QueueSolution::denominator(cplx z) const {
  return fctl::denominator(arrivals_, plan_.green, z);
}

cplx QueueSolution::x0_raw(cplx z) const { return numerator(z) / denominator(z); }

cplx QueueSolution::x0(cplx z) const {
  if (trivial_) return 1.0;
  bool near = std::abs(z - 1.0) < kSingularRadius ||
              (roots_.zero_order > 0 && std::abs(z) < kSingularRadius);
  for (cplx r : roots_.roots)
    if (near || std::abs(z - r) < kSingularRadius) {
      near = true;
      break;
    }
  if (!near) return x0_raw(z);
  cplx acc{};
  for (int m = 0; m < kCirclePoints; ++m) {
    const double theta = 2.0 * std::numbers::pi * (m + 0.5) / kCirclePoints;
    acc += x0_raw(z + std::polar(kCircleRadius, theta));
  }
  return acc / static_cast<double>(kCirclePoints);
}

cplx QueueSolution::xk(int k, cplx z) const {
  const int g = plan_.green;
  const int c = plan_.cycle();
  if (k < 0 || k > c) throw std::out_of_range("xk: slot index out of range");
  if (trivial_) return 1.0;
  if (k == 0) return x0(z);
  if (z == cplx{}) throw std::domain_error("xk: pole at z = 0 for k >= 1");
  const auto& sc = arrivals_.scenarios();
  const cplx x0z = x0(z);
  cplx carried{};
  cplx correction{};
  if (k <= g) {
    for (std::size_t s = 0; s < sc.size(); ++s) {
      const int si = static_cast<int>(s);
      carried += sc[s].weight * segment_pgf(si, 0, k, z);
      cplx part{};
      for (int j = 0; j < k; ++j) {
        const double mass = b_[s * g + j];
        if (mass == 0.0) continue;
        part += mass * (1.0 - segment_pgf(si, j, k, z) / ipow(z, k - j));
      }
      correction += sc[s].weight * part;
    }
    return x0z * carried / ipow(z, k) + correction;
  }
  for (std::size_t s = 0; s < sc.size(); ++s) {
    const int si = static_cast<int>(s);
    carried += sc[s].weight * segment_pgf(si, 0, k, z);
    const cplx red = segment_pgf(si, g, k, z);
    cplx part{};
    for (int j = 0; j < g; ++j) {
      const double mass = b_[s * g + j];
      if (mass == 0.0) continue;
      part += mass * (red - segment_pgf(si, j, k, z) / ipow(z, g - j));
    }
    correction += sc[s].weight * part;
  }
  return x0z * carried / ipow(z, g) + correction;
}

cplx QueueSolution::xbar(cplx z) const {
  const int c = plan_.cycle();
  cplx acc{};
  for (int k = 1; k <= c; ++k) acc += xk(k, z);
  return acc / static_cast<double>(c);
}

double QueueSolution::mean_x0() const {
  if (trivial_) return 0.0;
  const int g = plan_.green;
  const int c = plan_.cycle();
  const auto& sc = arrivals_.scenarios();
  // E[(a+U)(a+U-1)] for U a sum of independent slots with mean mu, var v.
  auto fact2 = [](double a, double mu, double v) {
    const double m = a + mu;
    return v + m * m - m;
  };
  double n2 = 0.0;
  for (std::size_t s = 0; s < sc.size(); ++s) {
    const auto& sum = sums_[s];
    auto mean_of = [&](int a, int b) {
      return (sum.shift_prefix[b] - sum.shift_prefix[a]) +
             (sum.rate_prefix[b] - sum.rate_prefix[a]);
    };
    auto var_of = [&](int a, int b) { return sum.rate_prefix[b] - sum.rate_prefix[a]; };
    const double replacement = fact2(g, mean_of(g, c), var_of(g, c));
    double part = 0.0;
    for (int j = 0; j < g; ++j) {
      const double mass = b_[s * g + j];
      if (mass == 0.0) continue;
      part += mass * (replacement - fact2(j, mean_of(j, c), var_of(j, c)));
    }
    n2 += sc[s].weight * part;
  }
  const double d1 = g - arrivals_.mean_total();
  const double d2 = static_cast<double>(g) * (g - 1) - arrivals_.factorial_moment2_total();
  return (n2 - d2) / (2.0 * d1);
}

double QueueSolution::mean_xk(int k) const {
  const int c = plan_.cycle();
  if (k < 0 || k > c) throw std::out_of_range("mean_xk: slot index out of range");
  return mean_per_slot()[k];
}

std::vector<double> QueueSolution::mean_per_slot() const {
  const int g = plan_.green;
  const int c = plan_.cycle();
  std::vector<double> m(c + 1, 0.0);
  if (trivial_) return m;
  const auto& sc = arrivals_.scenarios();
  const auto slot_mean = arrivals_.mean_per_slot();
  m[0] = mean_x0();
  m[c] = m[0];
  // Green: one departure per slot unless the queue emptied at some j < k.
  for (int k = 1; k <= g && k < c; ++k) {
    double correction = 0.0;
    for (std::size_t s = 0; s < sc.size(); ++s) {
      double part = 0.0;
      for (int j = 0; j < k; ++j) part += b_[s * g + j];
      correction += sc[s].weight * part * (sums_[s].mean[k - 1] - 1.0);
    }
    m[k] = m[k - 1] + slot_mean[k - 1] - 1.0 - correction;
  }
  // Red: pure accumulation, run backwards from X_c = X_0.
  for (int k = c - 1; k > g; --k) m[k] = m[k + 1] - slot_mean[k];
  return m;
}

double QueueSolution::mean_xbar() const {
  const auto m = mean_per_slot();
  double acc = 0.0;
  for (std::size_t k = 1; k < m.size(); ++k) acc += m[k];
  return acc / plan_.cycle();
}

std::vector<double> QueueSolution::x0_pmf(double tail_mass, int max_states) const {
  if (trivial_) return {1.0};
  const PgfFn pgf = [this](cplx z) { return x0(z); };
  constexpr int kBlock = 32;
  std::vector<double> law;
  double captured = 0.0;
  while (static_cast<int>(law.size()) < max_states) {
    const int first = static_cast<int>(law.size());
    const auto block = kernels::omp::invert_range(pgf, first, first + kBlock);
    double block_max = 0.0;
    for (double v : block) {
      law.push_back(v);
      captured += v;
      block_max = std::max(block_max, std::abs(v));
    }
    if (captured >= 1.0 - tail_mass) break;
    // Inversion noise floor: nothing left to resolve.
    if (first >= plan_.green && block_max < 1e-11) break;
  }
  while (law.size() > 1 && std::abs(law.back()) < 1e-300) law.pop_back();
  return law;
}

std::vector<std::vector<double>> QueueSolution::slot_pmfs(
    const std::vector<double>& x0_law) const {
  const auto laws = kernels::CycleLaws::from(arrivals_, plan_.green);
  return kernels::omp::push_through_cycle(laws, x0_law);
}

std::vector<double> QueueSolution::xbar_pmf(
    const std::vector<std::vector<double>>& slot_laws) const {
  const int c = plan_.cycle();
  std::size_t len = 0;
  for (int k = 1; k <= c; ++k) len = std::max(len, slot_laws[k].size());
  std::vector<double> avg(len, 0.0);
  for (int k = 1; k <= c; ++k)
    for (std::size_t n = 0; n < slot_laws[k].size(); ++n) avg[n] += slot_laws[k][n] / c;
  return avg;
}

namespace {

std::vector<double> tails(const std::vector<double>& law, int levels) {
  std::vector<double> out(levels, 0.0);
  double above = 0.0;
  for (int n = static_cast<int>(law.size()) - 1; n >= 1; --n) {
    above += law[n];
    if (n <= levels) out[n - 1] = std::clamp(above, 0.0, 1.0);
  }
  return out;
}

}  // namespace

TailTable QueueSolution::tail_table(int levels) const {
  TailTable t;
  const auto x0_law = x0_pmf();
  const auto laws = slot_pmfs(x0_law);
  t.x0 = tails(x0_law, levels);
  t.xg = tails(laws[plan_.green], levels);
  t.xbar = tails(xbar_pmf(laws), levels);
  return t;
}

QueueSolution solve_q(const SignalPlan& plan, const ArrivalProcess& arrivals,
                      const RootOptions& opt) {
  const int g = plan.green;
  const int c = plan.cycle();
  if (g < 1 || plan.red < 0) throw std::invalid_argument("signal plan needs g >= 1, r >= 0");
  if (arrivals.cycle_length() != c)
    throw std::invalid_argument(fmt::format(
        "arrival process has cycle {} but the signal plan has cycle {}",
        arrivals.cycle_length(), c));
  const double eta = g - arrivals.mean_total();
  if (!(eta > 0.0))
    throw InstabilityError(fmt::format("unstable queue: E[Y] = {:.6f} >= g = {}",
                                       arrivals.mean_total(), g),
                           arrivals.mean_total() / g);

  QueueSolution sol;
  sol.plan_ = plan;
  sol.arrivals_ = arrivals;
  sol.table_ = std::make_shared<const GTable>(enumerate_G(g));

  const auto& sc = arrivals.scenarios();
  const std::size_t ns = sc.size();
  sol.sums_.resize(ns);
  for (std::size_t s = 0; s < ns; ++s) {
    auto& sum = sol.sums_[s];
    sum.shift_prefix.assign(c + 1, 0);
    sum.rate_prefix.assign(c + 1, 0.0);
    sum.mean.resize(c);
    for (int i = 0; i < c; ++i) {
      sum.shift_prefix[i + 1] = sum.shift_prefix[i] + sc[s].slots[i].shift;
      sum.rate_prefix[i + 1] = sum.rate_prefix[i] + sc[s].slots[i].rate;
      sum.mean[i] = sc[s].slots[i].mean();
    }
  }

  // Mass of each emptiness pattern per scenario.
  sol.prefix_mass_.assign(ns * g * g, 0.0);
  for (std::size_t s = 0; s < ns; ++s) {
    std::vector<std::vector<double>> pmf(g, std::vector<double>(g + 1));
    for (int i = 0; i < g; ++i)
      for (int n = 0; n <= g; ++n) pmf[i][n] = sc[s].slots[i].pmf(n);
    for (int l = 0; l < g; ++l)
      for (int j = l; j < g; ++j) {
        double mass = 0.0;
        for (const auto& v : sol.table_->sets(j, l)) {
          double p = 1.0;
          for (int i = 0; i < j && p != 0.0; ++i) p *= pmf[i][v[i]];
          mass += p;
        }
        sol.prefix_mass_[(s * g + l) * g + j] = mass;
      }
  }

  sol.q_.assign(g, 0.0);
  if (arrivals.is_zero()) {
    sol.trivial_ = true;
    sol.q_[0] = 1.0;
  } else {
    sol.roots_ = find_roots(arrivals, g, opt);
    Eigen::MatrixXcd m(g, g);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(g);
    for (int l = 0; l < g; ++l) m(0, l) = sol.zeta_derivative_at_one(l);
    rhs(0) = eta;
    const auto grid = kernels::omp::evaluate_grid(
        g, sol.roots_.roots, [&sol](int l, cplx z) { return sol.zeta(l, z); });
    const int nroots = static_cast<int>(sol.roots_.roots.size());
    for (int i = 0; i < nroots; ++i)
      for (int l = 0; l < g; ++l) m(i + 1, l) = grid[i][l];
    // A zero of D at the origin is shared by every zeta_l and yields no
    // equation. Replace each lost row by q_k = [z^k] X_0(z), the coefficient
    // taken over a circle inside the smallest nonzero root.
    if (const int order = sol.roots_.zero_order; order > 0) {
      double radius = 1.0;
      for (cplx r : sol.roots_.roots) radius = std::min(radius, std::abs(r));
      radius *= 0.5;
      constexpr int kPoints = 64;
      std::vector<cplx> pts(kPoints);
      for (int p = 0; p < kPoints; ++p)
        pts[p] = std::polar(radius, 2.0 * std::numbers::pi * (p + 0.5) / kPoints);
      const auto ring = kernels::omp::evaluate_grid(
          g, pts, [&sol](int l, cplx z) { return sol.zeta(l, z) / sol.denominator(z); });
      // Coefficients below g - order follow from the functional equation
      // itself; only the top ones carry information.
      for (int k = g - order; k < g; ++k) {
        const int row = 1 + nroots + k - (g - order);
        for (int l = 0; l < g; ++l) {
          cplx acc{};
          for (int p = 0; p < kPoints; ++p) acc += ring[p][l] / ipow(pts[p], k);
          m(row, l) = acc / static_cast<double>(kPoints);
        }
        m(row, k) -= 1.0;
      }
    }
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-14))
      throw NumericsError(fmt::format(
          "boundary system is singular (reciprocal condition estimate {:.3e})", rcond));
    const Eigen::VectorXcd qc = lu.solve(rhs);
    sol.system_residual_ = (m * qc - rhs).cwiseAbs().maxCoeff();
    if (!(sol.system_residual_ < 1e-9))
      throw NumericsError(fmt::format("boundary system residual {:.3e} exceeds 1e-9",
                                      sol.system_residual_));
    double max_imag = 0.0;
    for (int l = 0; l < g; ++l) max_imag = std::max(max_imag, std::abs(qc(l).imag()));
    if (max_imag > 1e-7)
      throw NumericsError(
          fmt::format("boundary probabilities have imaginary part {:.3e}", max_imag));
    for (int l = 0; l < g; ++l) {
      double v = qc(l).real();
      if (v < -1e-10)
        throw NumericsError(fmt::format("q_{} = {:.3e} is negative", l, v));
      if (v < 0.0) {
        sol.warnings_.push_back(fmt::format("q_{} = {:.3e} clamped to 0", l, v));
        v = 0.0;
      }
      sol.q_[l] = v;
    }
  }

  sol.b_.assign(ns * g, 0.0);
  for (std::size_t s = 0; s < ns; ++s)
    for (int j = 0; j < g; ++j) {
      double acc = 0.0;
      for (int l = 0; l <= j; ++l) acc += sol.q_[l] * sol.prefix_mass(static_cast<int>(s), l, j);
      sol.b_[s * g + j] = acc;
    }
  return sol;
}

PgfFn x0_pgf(const QueueSolution& sol) {
  return [&sol](cplx z) { return sol.x0(z); };
}

PgfFn xk_pgf(const QueueSolution& sol, int k) {
  if (k < 0 || k > sol.cycle()) throw std::out_of_range("xk_pgf: k out of range");
  return [&sol, k](cplx z) { return sol.xk(k, z); };
}

PgfFn xbar_pgf(const QueueSolution& sol) {
  return [&sol](cplx z) { return sol.xbar(z); };
}

}  // namespace fctl
