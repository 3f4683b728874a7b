#include <cmath>

#include "doctest.h"
#include "gapq/gap_service.hpp"
#include "oracles.hpp"

using namespace gapq;

namespace {
constexpr double kVph = 1.0 / 3600.0;
PhaseProcess example1(double qbar_vph) {
  return PhaseProcess::two_phase(3.0, 1.0, 1.0 / 60, 1.0 / 240).with_mean_flow(qbar_vph * kVph);
}
const BehaviorModel kB2{Behavior::B2, {{6.22, 0.9}, {14.0, 0.1}}};
const BehaviorModel kB3{Behavior::B3, {{6.22, 0.9}, {14.0, 0.1}}};
}  // namespace

TEST_CASE("behavior validation") {
  CHECK_THROWS_AS(BehaviorModel(Behavior::B1, {{7.0, 0.5}, {8.0, 0.5}}), ModelError);
  CHECK_THROWS_AS(BehaviorModel(Behavior::B2, {{7.0, 0.5}, {8.0, 0.4}}), ModelError);
  CHECK_THROWS_AS(BehaviorModel(Behavior::B2, {{-7.0, 1.0}}), ModelError);
  CHECK(kB2.mean_gap() == doctest::Approx(6.998));
  CHECK(behavior_from_string("B3") == Behavior::B3);
  CHECK_THROWS_AS(behavior_from_string("B4"), ModelError);
}

TEST_CASE("B1 scalar closed form over a (q, T) grid") {
  for (double q : {0.005, 0.02, 0.1, 0.3})
    for (double T : {2.0, 7.0, 14.0})
      for (cplx s : {cplx{0.0}, cplx{0.05}, cplx{0.02, 0.04}}) {
        const auto g = service_lst_b1(PhaseProcess::poisson(q), T, Jet<cplx>(s, 0))(0, 0);
        CHECK(std::abs(g.value() - oracle::g1_lst(q, T, s)) < 1e-10);
      }
  for (double q : {0.005, 0.02, 0.1, 0.3})
    for (double T : {2.0, 7.0, 14.0}) {
      const auto g = service_lst_b1(PhaseProcess::poisson(q), T, Jet<double>::variable(0.0, 3))(0, 0);
      CHECK(-g[1] == doctest::Approx(oracle::g1_m1(q, T)).epsilon(1e-10));
      CHECK(2 * g[2] == doctest::Approx(oracle::g1_m2(q, T)).epsilon(1e-10));
      CHECK(-6 * g[3] == doctest::Approx(oracle::g1_m3(q, T)).epsilon(1e-10));
    }
}

TEST_CASE("B1 without conflicting traffic is deterministic T") {
  const auto p = PhaseProcess::two_phase(1e-14, 1e-14, 0.02, 0.01);
  const auto g = service_lst_b1(p, 7.0, Jet<double>::variable(0.0, 2));
  const auto e = phi(p, 7.0);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      CHECK(g(i, j)[0] == doctest::Approx(e(i, j)).epsilon(1e-10));
      CHECK(g(i, j)[1] == doctest::Approx(-7.0 * e(i, j)).epsilon(1e-10));
    }
}

TEST_CASE("B1 two-phase solution equals the explicit two-equation system") {
  const auto p = example1(70.0);
  const oracle::TwoPhase o{p.rates()[0], p.rates()[1], 1.0 / 60, 1.0 / 240};
  for (cplx s : {cplx{0.01}, cplx{0.1}, cplx{0.03, -0.02}}) {
    const auto g = service_lst_b1(p, 7.0, Jet<cplx>(s, 0));
    const auto ref = oracle::g2_explicit(o, 7.0, s);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) CHECK(std::abs(g(i, j).value() - ref[i][j]) < 1e-10);
  }
}

TEST_CASE("stochasticity and monotone dominance") {
  for (double qbar : {70.0, 420.0})
    for (const auto& b : {BehaviorModel::constant(7.0), kB2, kB3}) {
      const ServiceTransform st(example1(qbar), b, 50 * kVph);
      for (const auto* m : {&st.P(), &st.P_star(), &st.pbar()})
        for (double r : row_sums(*m)) CHECK(r == doctest::Approx(1.0).epsilon(1e-10));
      const auto d = coefficient(st.regular(Jet<double>::variable(0.0, 1)), 1);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(-d(i, j) >= 0.0);
      for (double s : {0.01, 0.1, 1.0}) {
        const auto g = values(st.regular(Jet<double>(s, 0)));
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) {
            CHECK(g(i, j) >= 0.0);
            CHECK(g(i, j) <= st.P()(i, j) + 1e-15);
          }
      }
    }
}

TEST_CASE("degenerate gap distributions collapse B2 and B3 to B1") {
  const auto p = example1(250.0);
  const auto s = Jet<double>::variable(0.02, 3);
  const auto b1 = service_lst_b1(p, 7.0, s);
  const auto b2 = service_lst_b2(p, BehaviorModel(Behavior::B2, {{7.0, 1.0}}), s);
  const auto b3 = service_lst_b3(p, BehaviorModel(Behavior::B3, {{7.0, 1.0}}), s);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (std::size_t k = 0; k <= 3; ++k) {
        CHECK(b2(i, j)[k] == doctest::Approx(b1(i, j)[k]).epsilon(1e-12));
        CHECK(b3(i, j)[k] == doctest::Approx(b1(i, j)[k]).epsilon(1e-12));
      }
}

TEST_CASE("B2 scalar two-point reduction") {
  const double q = 0.08;
  const BehaviorModel b(Behavior::B2, {{4.0, 0.7}, {11.0, 0.3}});
  for (double s : {0.0, 0.1, 0.5}) {
    double num = 0, blocked = 0;
    for (const auto& g : b.gaps()) {
      num += g.p * std::exp(-(s + q) * g.T);
      blocked += g.p * q * (1 - std::exp(-(s + q) * g.T)) / (s + q);
    }
    const auto got = service_lst_b2(PhaseProcess::poisson(q), b, Jet<double>(s, 0))(0, 0).value();
    CHECK(got == doctest::Approx(num / (1 - blocked)).epsilon(1e-12));
  }
}

TEST_CASE("B3 is the mixture of B1 transforms and differs from B2") {
  const auto p = example1(300.0);
  const Jet<double> s(0.1, 0);
  const auto b3 = service_lst_b3(p, kB3, s);
  const auto mix = scaled(service_lst_b1(p, 6.22, s), Jet<double>(0.9, 0)) +
                   scaled(service_lst_b1(p, 14.0, s), Jet<double>(0.1, 0));
  const auto b2 = service_lst_b2(p, kB2, s);
  double diff = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      CHECK(b3(i, j).value() == doctest::Approx(mix(i, j).value()).epsilon(1e-14));
      diff += std::abs(b3(i, j).value() - b2(i, j).value());
    }
  CHECK(diff > 1e-6);
}

TEST_CASE("Example 2 gaps: B3 mean service exceeds B2 at every flow level") {
  const BehaviorModel b2(Behavior::B2, {{5.0, 0.9}, {25.0, 0.1}});
  const BehaviorModel b3(Behavior::B3, {{5.0, 0.9}, {25.0, 0.1}});
  for (double qbar : {50.0, 150.0, 300.0, 450.0}) {
    const auto p = example1(qbar);
    CHECK(service_moments(ServiceTransform(p, b3, 50 * kVph)).mean >
          service_moments(ServiceTransform(p, b2, 50 * kVph)).mean);
  }
}

TEST_CASE("first service transform") {
  const auto p1 = PhaseProcess::poisson(0.05);
  const ServiceTransform st1(p1, BehaviorModel::constant(7.0), 0.01);
  const auto s = Jet<double>::variable(0.0, 2);
  const auto a = first_service_lst(p1, st1, 0.01, s)(0, 0), b = st1.regular(s)(0, 0);
  for (std::size_t k = 0; k <= 2; ++k) CHECK(a[k] == doctest::Approx(b[k]));

  const auto p = example1(420.0);
  const ServiceTransform st(p, kB2, 50 * kVph);
  const auto ex = values(first_service_lst(p, st, 50 * kVph, Jet<double>(0.0, 0)));
  for (double r : row_sums(ex)) CHECK(r == doctest::Approx(1.0).epsilon(1e-10));
  const auto fast = values(first_service_lst(p, st, 1e9, Jet<double>(0.05, 0)));
  const auto reg = values(st.regular(Jet<double>(0.05, 0)));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) CHECK(fast(i, j) == doctest::Approx(reg(i, j)).epsilon(1e-7));
}

TEST_CASE("service moments") {
  const double q = 0.04, T = 7.0;
  const ServiceTransform st(PhaseProcess::poisson(q), BehaviorModel::constant(T), 0.01);
  const auto m = service_moments(st);
  CHECK(m.mean == doctest::Approx(oracle::g1_m1(q, T)).epsilon(1e-12));
  CHECK(m.second_moment == doctest::Approx(oracle::g1_m2(q, T)).epsilon(1e-12));
  const ServiceTransform free(PhaseProcess::poisson(1e-15), BehaviorModel::constant(T), 0.01);
  CHECK(service_moments(free).mean == doctest::Approx(T).epsilon(1e-10));

  // Example 3: B1, T = 7 s, qbar = 500 veh/h; rho = lambda E[B] E[G] = 45.67 lambda (lambda per second)
  const ServiceTransform ex3(example1(500.0), BehaviorModel::constant(7.0), 0.001);
  CHECK(4.0 * service_moments(ex3).mean == doctest::Approx(45.67).epsilon(0.005));
}

TEST_CASE("cached expansion agrees with a fresh evaluation") {
  const ServiceTransform st(example1(420.0), kB3, 50 * kVph);
  const auto s = Jet<double>(std::vector<double>{0.0, -0.3, 0.2, 0.05});
  const auto cached = st.regular(s);
  const auto fresh = service_lst(st.process(), st.behavior(), s);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (std::size_t k = 0; k <= 3; ++k) CHECK(cached(i, j)[k] == doctest::Approx(fresh(i, j)[k]).epsilon(1e-10));
}
