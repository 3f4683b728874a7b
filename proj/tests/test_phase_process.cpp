#include <cmath>

#include "doctest.h"
#include "gapq/phase_process.hpp"
#include "oracles.hpp"

using namespace gapq;

namespace {
constexpr double kVph = 1.0 / 3600.0;
PhaseProcess example1(double q2_vph = 50.0) {
  return PhaseProcess::two_phase(3 * q2_vph * kVph, q2_vph * kVph, 1.0 / 60, 1.0 / 240);
}
}  // namespace

TEST_CASE("generator validation") {
  CHECK_THROWS_AS(PhaseProcess(Matrix<double>{{-1.0, 0.5}, {1.0, -1.0}}, {0.1, 0.1}), ModelError);
  CHECK_THROWS_AS(PhaseProcess(Matrix<double>{{0.0, 0.0}, {1.0, -1.0}}, {0.1, 0.1}), ModelError);  // reducible
  CHECK_THROWS_AS(PhaseProcess(Matrix<double>{{-1.0, 1.0}, {1.0, -1.0}}, {0.0, 0.0}), ModelError);
  CHECK_THROWS_AS(PhaseProcess(Matrix<double>{{-1.0, 1.0}, {1.0, -1.0}}, {-0.1, 0.2}), ModelError);
  CHECK_THROWS_AS(PhaseProcess(Matrix<double>{{1.0, -1.0}, {1.0, -1.0}}, {0.1, 0.2}), ModelError);
  CHECK_NOTHROW(example1());
}

TEST_CASE("phi examples and properties") {
  const auto p = example1();
  const auto i0 = phi(p, 0.0);
  CHECK(i0(0, 0) == 1.0);
  CHECK(i0(0, 1) == 0.0);
  const auto s = phi(PhaseProcess::poisson(0.3), 2.0);
  CHECK(s(0, 0) == doctest::Approx(std::exp(-0.6)).epsilon(1e-14));

  const oracle::TwoPhase o{150 * kVph, 50 * kVph, 1.0 / 60, 1.0 / 240};
  const auto f7 = phi(p, 7.0);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(std::abs(f7(i, j) - oracle::phi2(o, i, j, 7.0)) < 1e-10);

  std::vector<double> prev{1.0, 1.0};
  for (double t : {0.5, 3.0, 10.0, 40.0}) {
    const auto m = phi(p, t);
    const auto r = row_sums(m);
    for (int i = 0; i < 2; ++i) {
      CHECK(r[i] > 0.0);
      CHECK(r[i] <= prev[i]);
      for (int j = 0; j < 2; ++j) CHECK(m(i, j) >= 0.0);
    }
    prev = r;
  }
  const auto a = phi(p, 3.0) * phi(p, 11.0);
  const auto b = phi(p, 14.0);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(std::abs(a(i, j) - b(i, j)) < 1e-10);
  CHECK_THROWS_AS(phi(p, -1.0), ModelError);
}

TEST_CASE("psi examples") {
  const auto p1 = PhaseProcess::poisson(0.2);
  CHECK(psi(p1, 3.0)(0, 0) == doctest::Approx(0.2 * std::exp(-0.6)));
  const auto p = example1();
  const auto f = phi(p, 7.0), g = psi(p, 7.0);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(g(i, j) == doctest::Approx(p.rates()[j] * f(i, j)));
  // integral to infinity of psi has unit row sums: psi_hat(0, large T)
  const auto h = psi_hat(p, Jet<double>(0.0, 0), 20000.0);
  for (int i = 0; i < 2; ++i) CHECK((h(i, 0) + h(i, 1)).value() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("psi_hat examples") {
  const auto p = example1();
  const auto z = psi_hat(p, Jet<double>(0.3, 2), 0.0);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(z(i, j).value() == 0.0);
  const double q = 0.05, T = 9.0;
  const auto s = Jet<double>::variable(0.1, 3);
  const auto expected = q * (1.0 - exp(-(s + q) * T)) / (s + q);
  const auto got = psi_hat(PhaseProcess::poisson(q), s, T)(0, 0);
  for (std::size_t k = 0; k <= 3; ++k) CHECK(got[k] == doctest::Approx(expected[k]).epsilon(1e-12));
}

TEST_CASE("pbar examples") {
  CHECK(pbar(PhaseProcess::poisson(0.1), 0.5)(0, 0) == doctest::Approx(1.0));
  const double mu = 0.3;
  const auto sym = PhaseProcess(Matrix<double>{{-mu, mu}, {mu, -mu}}, {0.1, 0.1});
  const auto pb = pbar(sym, mu);
  CHECK(pb(0, 0) == doctest::Approx(2.0 / 3));
  CHECK(pb(0, 1) == doctest::Approx(1.0 / 3));
  const auto e = pbar(example1(), 50 * kVph);
  for (double r : row_sums(e)) CHECK(r == doctest::Approx(1.0).epsilon(1e-12));
  const auto fast = pbar(example1(), 1e9);
  CHECK(fast(0, 0) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK_THROWS_AS(pbar(example1(), 0.0), ModelError);
}

TEST_CASE("stationary phase and mean flow") {
  CHECK(stationary_phase(PhaseProcess::poisson(0.1))[0] == doctest::Approx(1.0));
  const auto pi = stationary_phase(example1());
  CHECK(pi[0] == doctest::Approx(0.2));
  CHECK(pi[1] == doctest::Approx(0.8));
  const auto sym = PhaseProcess(Matrix<double>{{-2.0, 1.0, 1.0}, {1.0, -2.0, 1.0}, {1.0, 1.0, -2.0}}, {1, 2, 3});
  for (double x : stationary_phase(sym)) CHECK(x == doctest::Approx(1.0 / 3));

  CHECK(mean_flow_rate(example1()) * 3600 == doctest::Approx(70.0));
  const auto flat = PhaseProcess::two_phase(0.2, 0.2, 0.01, 0.03);
  CHECK(mean_flow_rate(flat) == doctest::Approx(0.2));
  CHECK(mean_flow_rate(PhaseProcess::poisson(0.7)) == doctest::Approx(0.7));
  CHECK(mean_flow_rate(example1().with_mean_flow(420 * kVph)) * 3600 == doctest::Approx(420.0));
}

TEST_CASE("two-phase transform zeros are real, distinct and non-positive") {
  for (double q2 : {10.0, 50.0, 140.0}) {
    const oracle::TwoPhase o{3 * q2 * kVph, q2 * kVph, 1.0 / 60, 1.0 / 240};
    const auto [w1, w2] = oracle::omegas(o);
    CHECK(w1 > w2);
    CHECK(w1 <= 0.0);
  }
}
