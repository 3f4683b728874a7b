#pragma once

// Random stable model instances for property tests.

#include <memory>
#include <random>

#include "gapq/delay.hpp"

struct RandomModel {
  std::shared_ptr<const gapq::ServiceTransform> service;
  gapq::BatchDistribution batch;
  double lambda;
};

/// N in {1,2,3}, any behavior, batches up to size 5, load drawn in [0.1, 0.8].
inline RandomModel random_model(std::mt19937_64& rng) {
  using namespace gapq;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t n = 1 + rng() % 3;
  Matrix<double> Q(n, n, 0.0);
  std::vector<double> q(n);
  for (std::size_t i = 0; i < n; ++i) {
    double out = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) out += Q(i, j) = 0.002 + 0.03 * u(rng);
    Q(i, i) = -out;
    q[i] = 0.01 + 0.12 * u(rng);
  }
  const PhaseProcess p(Q, q);
  const Behavior kind = static_cast<Behavior>(rng() % 3);
  std::vector<Gap> gaps;
  if (kind == Behavior::B1) {
    gaps.push_back({3.0 + 5.0 * u(rng), 1.0});
  } else {
    const double a = 0.5 + 0.4 * u(rng);
    gaps = {{3.0 + 3.0 * u(rng), a}, {7.0 + 6.0 * u(rng), 1.0 - a}};
  }
  std::vector<BatchMass> pmf;
  const unsigned kmax = 1 + rng() % 5;
  double total = 0.0;
  std::vector<double> w;
  for (unsigned k = 1; k <= kmax; ++k) total += w.emplace_back(0.1 + u(rng));
  for (unsigned k = 1; k <= kmax; ++k) pmf.push_back({k, w[k - 1] / total});
  BatchDistribution batch(pmf);
  // pick lambda for a target load using the load's linearity in lambda (pbar does not affect rho)
  const double target = 0.1 + 0.7 * u(rng);
  auto probe = std::make_shared<const ServiceTransform>(p, BehaviorModel(kind, gaps), 1.0);
  const double rho1 = load(probe, 1.0, batch);
  const double lambda = target / rho1;
  return {std::make_shared<const ServiceTransform>(p, BehaviorModel(kind, gaps), lambda), batch, lambda};
}
