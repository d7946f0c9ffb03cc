#include <cmath>
#include <vector>

#include "doctest.h"
#include "fctl/arrival.hpp"
#include "oracles.hpp"

using namespace fctl;

namespace {

ArrivalProcess two_scenarios() {
  return ArrivalProcess(3, {{0.25, {{1, 0.0}, {0, 0.5}, {0, 0.0}}},
                            {0.75, {{0, 0.2}, {2, 0.1}, {0, 0.3}}}});
}

}  // namespace

TEST_CASE("ipow is exact on small integers and at zero") {
  CHECK(ipow(cplx{0.0, 0.0}, 0) == cplx{1.0, 0.0});
  CHECK(ipow(cplx{0.0, 0.0}, 3) == cplx{0.0, 0.0});
  CHECK(ipow(2.0, 10) == 1024.0);
  const cplx z{0.3, -0.7};
  CHECK(std::abs(ipow(z, 7) - std::pow(z, 7)) < 1e-15);
}

TEST_CASE("slot pmf matches the Poisson recursion") {
  const SlotDistribution d{2, 1.7};
  const auto ref = oracle::poisson_pmf(1.7);
  CHECK(d.pmf(0) == 0.0);
  CHECK(d.pmf(1) == 0.0);
  for (int k = 0; k < 20; ++k) CHECK(d.pmf(k + 2) == doctest::Approx(ref[k]).epsilon(1e-13));
  CHECK(SlotDistribution::deterministic(3).pmf(3) == 1.0);
  CHECK(SlotDistribution{}.pmf(0) == 1.0);
}

TEST_CASE("slot pgf and moments") {
  const SlotDistribution d{1, 0.4};
  const cplx z{0.2, 0.5};
  CHECK(std::abs(d.pgf(z) - z * std::exp(0.4 * (z - 1.0))) < 1e-15);
  CHECK(d.mean() == doctest::Approx(1.4));
  CHECK(d.variance() == doctest::Approx(0.4));
  const auto c = convolve(d, SlotDistribution{2, 0.1});
  CHECK(c.shift == 3);
  CHECK(c.rate == doctest::Approx(0.5));
}

TEST_CASE("construction validates weights and slot counts") {
  CHECK_THROWS_AS(ArrivalProcess(2, {{0.5, {{}, {}}}}), std::invalid_argument);
  CHECK_THROWS_AS(ArrivalProcess(2, {{1.0, {{}}}}), std::invalid_argument);
  CHECK_THROWS_AS(ArrivalProcess(2, {{1.5, {{}, {}}}, {-0.5, {{}, {}}}}), std::invalid_argument);
  CHECK_THROWS_AS(ArrivalProcess(2, {}), std::invalid_argument);
  CHECK_NOTHROW(two_scenarios());
}

TEST_CASE("joint pgf at ones is one and total pgf agrees with joint pgf") {
  const auto p = two_scenarios();
  const std::vector<cplx> ones(3, 1.0);
  CHECK(std::abs(p.joint_pgf(ones) - 1.0) < 1e-15);
  const cplx z{0.4, -0.3};
  const std::vector<cplx> same(3, z);
  CHECK(std::abs(p.joint_pgf(same) - p.total_pgf(z)) < 1e-15);
}

TEST_CASE("total pgf derivative matches a central difference") {
  const auto p = two_scenarios();
  const double h = 1e-6;
  const double fd = (p.total_pgf(0.7 + h) - p.total_pgf(0.7 - h)).real() / (2 * h);
  CHECK(p.total_pgf_derivative(0.7).real() == doctest::Approx(fd).epsilon(1e-8));
  CHECK(p.total_pgf_derivative(1.0).real() == doctest::Approx(p.mean_total()).epsilon(1e-13));
}

TEST_CASE("moments of the cycle total") {
  const auto p = two_scenarios();
  // Scenario totals: 1 + Poi(0.5) and 2 + Poi(0.6).
  CHECK(p.mean_total() == doctest::Approx(0.25 * 1.5 + 0.75 * 2.6));
  auto f2 = [](double a, double r) { return r + (a + r) * (a + r) - (a + r); };
  CHECK(p.factorial_moment2_total() == doctest::Approx(0.25 * f2(1, 0.5) + 0.75 * f2(2, 0.6)));
  const auto m = p.mean_per_slot();
  CHECK(m[0] == doctest::Approx(0.25 * 1.0 + 0.75 * 0.2));
  CHECK(m[1] == doctest::Approx(0.25 * 0.5 + 0.75 * 2.1));
  CHECK(m[2] == doctest::Approx(0.75 * 0.3));
}

TEST_CASE("prefix probabilities") {
  const auto p = two_scenarios();
  const std::vector<int> pre{1, 2};
  const double s1 = 1.0 * std::exp(-0.5) * 0.5 * 0.5 / 2.0;
  const double s2 = std::exp(-0.2) * 0.2 * std::exp(-0.1);
  CHECK(p.prefix_prob(pre) == doctest::Approx(0.25 * s1 + 0.75 * s2).epsilon(1e-13));
  CHECK(p.prefix_prob(std::vector<int>{}) == doctest::Approx(1.0));
}

TEST_CASE("h_eval reduces to the joint pgf without a prefix") {
  const auto p = two_scenarios();
  const cplx z{0.5, 0.2};
  const std::vector<cplx> tail{cplx{0.3, 0.1}};
  // m = 2, no prefix: slots 1..2 at z divided by z^2, slot 3 at the tail value.
  const std::vector<cplx> args{z, z, tail[0]};
  CHECK(std::abs(p.h_eval(2, z, tail, {}) - p.joint_pgf(args) / (z * z)) < 1e-14);
  CHECK_THROWS_AS(p.h_eval(2, 0.0, tail, {}), std::domain_error);
}

TEST_CASE("superposition convolves slotwise over scenario pairs") {
  const auto a = two_scenarios();
  const auto b = ArrivalProcess::iid_poisson(3, 0.1);
  const auto s = superpose(a, b);
  CHECK(s.size() == 2);
  CHECK(s.mean_total() == doctest::Approx(a.mean_total() + b.mean_total()));
  const std::vector<cplx> z{{0.1, 0.2}, {0.5, -0.1}, {0.9, 0.0}};
  CHECK(std::abs(s.joint_pgf(z) - a.joint_pgf(z) * b.joint_pgf(z)) < 1e-15);
}

TEST_CASE("compact merges identical scenarios and drops light ones") {
  const ArrivalProcess p(2, {{0.5, {{1, 0.0}, {0, 0.2}}},
                             {0.3, {{1, 0.0}, {0, 0.2}}},
                             {0.2, {{0, 0.0}, {0, 0.1}}}});
  const auto m = compact(p, 0.0);
  REQUIRE(m.size() == 2);
  CHECK(m.scenarios()[0].weight == doctest::Approx(0.8));
  const auto d = compact(p, 0.25);
  REQUIRE(d.size() == 1);
  CHECK(d.scenarios()[0].weight == doctest::Approx(1.0));
}

TEST_CASE("zero process") {
  const auto z = ArrivalProcess::zero(4);
  CHECK(z.is_zero());
  CHECK(z.mean_total() == 0.0);
  CHECK_FALSE(ArrivalProcess::iid_poisson(4, 0.1).is_zero());
}
