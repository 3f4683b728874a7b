#include <cmath>

#include "doctest.h"
#include "gapq/approx.hpp"
#include "gapq/delay.hpp"
#include "oracles.hpp"

using namespace gapq;

namespace {
constexpr double kVph = 1.0 / 3600.0;
const BatchDistribution kUniform = BatchDistribution::uniform(1, 7);

// Example 3: B1, T = 7 s, qbar = 500 veh/h, uniform batches; lambda set from rho.
struct Example3 {
  PhaseProcess p = PhaseProcess::two_phase(3.0, 1.0, 1.0 / 60, 1.0 / 240).with_mean_flow(500 * kVph);
  double rho_per_lambda = load(std::make_shared<ServiceTransform>(p, BehaviorModel::constant(7.0), 1e-3), 1e-3,
                               kUniform) / 1e-3;
  std::shared_ptr<const ServiceTransform> service(double rho) const {
    return std::make_shared<ServiceTransform>(p, BehaviorModel::constant(7.0), rho / rho_per_lambda);
  }
  DelayMoments exact(double rho) const {
    const double lambda = rho / rho_per_lambda;
    return delay_moments(DelayTransforms(service(rho), kUniform, lambda));
  }
  double ex(double rho) const {
    const double lambda = rho / rho_per_lambda;
    return queue_length_moments(solve_queue(build_system(service(rho), lambda, kUniform))).mean;
  }
};
}  // namespace

TEST_CASE("light-traffic delta") {
  CHECK(lt_limit_delta(kUniform) == doctest::Approx(2.0));
  CHECK(lt_limit_delta(BatchDistribution({{1, 0.5}, {7, 0.5}})) == doctest::Approx(2.625));
  CHECK(lt_limit_delta(BatchDistribution::single()) == 0.0);
}

TEST_CASE("ex_approx endpoints and value") {
  CHECK(ex_approx({2.0, 0.343, 1e-12}) == doctest::Approx(2.0));
  CHECK((1 - 0.999999) * ex_approx({2.0, 0.343, 0.999999}) == doctest::Approx(1 / 0.343).epsilon(1e-5));
  CHECK(ex_approx({2.0, 0.343, 0.5}) == doctest::Approx((2 + 0.5 * (1 / 0.343 - 2)) / 0.5));
  CHECK(ex_approx({2.0, 0.343, 0.5}) == doctest::Approx(4.915).epsilon(1e-3));
  CHECK_THROWS_AS(ex_approx({2.0, 0.0, 0.5}), ModelError);
  CHECK_THROWS_AS(ex_approx({2.0, 0.3, 1.0}), ModelError);
}

TEST_CASE("sojourn_approx is increasing in rho and drops the batch term for single arrivals") {
  double prev = 0.0;
  for (double rho : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const double s = sojourn_approx({2.0, 0.343, rho}, rho / 45.67, kUniform);
    CHECK(s > prev);
    prev = s;
  }
  const ApproxParams p{0.0, 0.5, 0.4};
  CHECK(sojourn_approx(p, 0.01, BatchDistribution::single()) == doctest::Approx(ex_approx(p) / 0.01));
}

TEST_CASE("Example 3: load reconciles to 45.67 per (batch per second)") {
  const Example3 ex;
  CHECK(ex.rho_per_lambda == doctest::Approx(45.67).epsilon(0.005));
}

TEST_CASE("Example 3: sojourn approximation at the endpoints") {
  const Example3 ex;
  for (double rho : {0.02, 0.98}) {
    const double lambda = rho / ex.rho_per_lambda;
    const double approx = sojourn_approx({2.0, 0.343, rho}, lambda, kUniform);
    const double exact = ex.exact(rho).ES;
    CHECK(std::abs(approx / exact - 1) < (rho < 0.5 ? 0.02 : 0.05));
  }
}

TEST_CASE("Example 3: sojourn approximation within 5% on [0.1, 0.9]") {
  const Example3 ex;
  for (double rho = 0.1; rho <= 0.9 + 1e-9; rho += 0.1) {
    const double lambda = rho / ex.rho_per_lambda;
    const double approx = sojourn_approx({2.0, 0.343, rho}, lambda, kUniform);
    CAPTURE(rho);
    CHECK(std::abs(approx / ex.exact(rho).ES - 1) < 0.05);
  }
}

TEST_CASE("wait approximation at high load") {
  const Example3 ex;
  const double rho = 0.8, lambda = rho / ex.rho_per_lambda;
  const double approx = wait_approx({2.0, 0.343, rho}, lambda, kUniform, *ex.service(rho));
  CHECK(std::abs(approx / ex.exact(rho).EW - 1) < 0.05);

  // single arrivals: ratio approx/exact -> 1 as rho -> 1
  const auto p = PhaseProcess::poisson(0.05);
  const double m1 = oracle::g1_m1(0.05, 6.0), m2 = oracle::g1_m2(0.05, 6.0);
  const double eta = 2 * m1 * m1 / m2;  // 1/eta = (1 + c^2)/2
  const double r = 0.995, lambda1 = r / m1;
  const ServiceTransform st(p, BehaviorModel::constant(6.0), lambda1);
  const double exact = oracle::mg1_wait_mean(lambda1, m1, m2);
  CHECK(wait_approx({0.0, eta, r}, lambda1, BatchDistribution::single(), st) / exact == doctest::Approx(1.0).epsilon(0.01));

  const ServiceTransform free(PhaseProcess::poisson(1e-15), BehaviorModel::constant(7.0), 0.01);
  CHECK(service_moments(free).mean == doctest::Approx(7.0));
}

TEST_CASE("estimate_eta") {
  CHECK(estimate_eta([](double r) { return 2.5 / (1 - r); }) == doctest::Approx(0.4));
  const Example3 ex;
  const double eta = estimate_eta([&](double rho) { return ex.ex(rho); });
  CHECK(1 / eta == doctest::Approx(1 / 0.343).epsilon(0.03));

  // single-phase, single arrivals: 1/eta = (1 + c^2)/2
  const double q = 0.05, T = 6.0, m1 = oracle::g1_m1(q, T), m2 = oracle::g1_m2(q, T);
  const auto p = PhaseProcess::poisson(q);
  const double est = estimate_eta([&](double rho) {
    const double lambda = rho / m1;
    auto st = std::make_shared<ServiceTransform>(p, BehaviorModel::constant(T), lambda);
    return queue_length_moments(solve_queue(build_system(st, lambda, BatchDistribution::single()))).mean;
  });
  CHECK(1 / est == doctest::Approx(m2 / (2 * m1 * m1)).epsilon(0.03));
}
