#include "fctl/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace fctl::kernels {

CycleLaws CycleLaws::from(const ArrivalProcess& p, int green, double cutoff) {
  CycleLaws laws;
  laws.green = green;
  for (const auto& s : p.scenarios()) {
    laws.weights.push_back(s.weight);
    std::vector<std::vector<double>> slots;
    slots.reserve(s.slots.size());
    for (const auto& d : s.slots) {
      std::vector<double> pmf(d.shift, 0.0);
      for (int k = 0;; ++k) {
        const double v = d.pmf(d.shift + k);
        pmf.push_back(v);
        if (d.rate == 0.0 || (k > d.rate && v < cutoff)) break;
      }
      slots.push_back(std::move(pmf));
    }
    laws.slot_pmf.push_back(std::move(slots));
  }
  return laws;
}

namespace {

void trim(std::vector<double>& v) {
  while (v.size() > 1 && v.back() < 1e-300) v.pop_back();
}

}  // namespace

void green_step(std::span<const double> in, std::span<const double> arrivals,
                std::vector<double>& out) {
  const std::size_t n = in.size();
  out.assign(std::max<std::size_t>(1, n + arrivals.size()), 0.0);
  out[0] += in[0];  // empty queue stays empty; arrivals pass
  for (std::size_t x = 1; x < n; ++x) {
    const double px = in[x];
    if (px == 0.0) continue;
    for (std::size_t y = 0; y < arrivals.size(); ++y) out[x - 1 + y] += px * arrivals[y];
  }
  trim(out);
}

void red_step(std::span<const double> in, std::span<const double> arrivals,
              std::vector<double>& out) {
  const std::size_t n = in.size();
  out.assign(n + arrivals.size(), 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    const double px = in[x];
    if (px == 0.0) continue;
    for (std::size_t y = 0; y < arrivals.size(); ++y) out[x + y] += px * arrivals[y];
  }
  trim(out);
}

namespace {

std::vector<std::vector<double>> push_one(const CycleLaws& laws, std::size_t s,
                                          const std::vector<double>& x0) {
  const int c = laws.cycle();
  std::vector<std::vector<double>> seq(c + 1);
  seq[0] = x0;
  for (int k = 1; k <= c; ++k) {
    const auto& a = laws.slot_pmf[s][k - 1];
    if (k <= laws.green)
      green_step(seq[k - 1], a, seq[k]);
    else
      red_step(seq[k - 1], a, seq[k]);
  }
  return seq;
}

std::vector<std::vector<double>> mix(const CycleLaws& laws,
                                     const std::vector<std::vector<std::vector<double>>>& per) {
  const int c = laws.cycle();
  std::vector<std::vector<double>> out(c + 1);
  for (int k = 0; k <= c; ++k) {
    std::size_t len = 0;
    for (const auto& seq : per) len = std::max(len, seq[k].size());
    out[k].assign(len, 0.0);
    for (std::size_t s = 0; s < per.size(); ++s) {
      const double w = laws.weights[s];
      const auto& v = per[s][k];
      for (std::size_t n = 0; n < v.size(); ++n) out[k][n] += w * v[n];
    }
  }
  return out;
}

}  // namespace

namespace serial {

std::vector<double> invert_range(const PgfFn& pgf, int first, int last) {
  std::vector<double> out(std::max(0, last - first));
  for (int k = first; k < last; ++k) out[k - first] = invert_pgf(pgf, k);
  return out;
}

std::vector<std::vector<double>> push_through_cycle(const CycleLaws& laws,
                                                    const std::vector<double>& x0) {
  std::vector<std::vector<std::vector<double>>> per(laws.weights.size());
  for (std::size_t s = 0; s < per.size(); ++s) per[s] = push_one(laws, s, x0);
  return mix(laws, per);
}

std::vector<std::vector<cplx>> evaluate_grid(int columns, std::span<const cplx> points,
                                             const std::function<cplx(int, cplx)>& f) {
  std::vector<std::vector<cplx>> out(points.size(), std::vector<cplx>(columns));
  for (std::size_t i = 0; i < points.size(); ++i)
    for (int l = 0; l < columns; ++l) out[i][l] = f(l, points[i]);
  return out;
}

}  // namespace serial

namespace omp {

std::vector<double> invert_range(const PgfFn& pgf, int first, int last) {
  const int n = std::max(0, last - first);
  std::vector<double> out(n);
#pragma omp parallel for schedule(dynamic, 4)
  for (int i = 0; i < n; ++i) out[i] = invert_pgf(pgf, first + i);
  return out;
}

std::vector<std::vector<double>> push_through_cycle(const CycleLaws& laws,
                                                    const std::vector<double>& x0) {
  const int n = static_cast<int>(laws.weights.size());
  std::vector<std::vector<std::vector<double>>> per(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (int s = 0; s < n; ++s) per[s] = push_one(laws, s, x0);
  return mix(laws, per);
}

std::vector<std::vector<cplx>> evaluate_grid(int columns, std::span<const cplx> points,
                                             const std::function<cplx(int, cplx)>& f) {
  const int rows = static_cast<int>(points.size());
  std::vector<std::vector<cplx>> out(rows, std::vector<cplx>(columns));
#pragma omp parallel for collapse(2) schedule(static)
  for (int i = 0; i < rows; ++i)
    for (int l = 0; l < columns; ++l) out[i][l] = f(l, points[i]);
  return out;
}

}  // namespace omp

}  // namespace fctl::kernels
