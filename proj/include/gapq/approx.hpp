#pragma once

#include <functional>
#include <vector>

#include "gapq/gap_service.hpp"
#include "gapq/queue_core.hpp"

namespace gapq {

/// Light/heavy-traffic interpolation inputs: delta = lim E[X] as rho -> 0,
/// 1/eta = lim (1 - rho) E[X] as rho -> 1.
struct ApproxParams {
  double delta;
  double eta;
  double rho;
  void validate() const;
};

/// Mean number of batch-mates behind an arbitrary customer: sum_k k r_{k+1}.
double lt_limit_delta(const BatchDistribution& batch);

/// E[X] ~ (delta + rho (1/eta - delta)) / (1 - rho).
double ex_approx(const ApproxParams& p);

/// E[S] from Little's law on the approximate E[X].
double sojourn_approx(const ApproxParams& p, double lambda, const BatchDistribution& batch);

/// E[W] ~ E[S] minus the mean regular service time.
double wait_approx(const ApproxParams& p, double lambda, const BatchDistribution& batch, const ServiceTransform& st);

/// Numerical fallback for eta: quadratic extrapolation of (1 - rho) E[X]
/// to rho = 1 from `rho_grid` (default 0.95, 0.97, 0.99).
double estimate_eta(const std::function<double(double rho)>& exact_ex,
                    const std::vector<double>& rho_grid = {0.95, 0.97, 0.99});

}  // namespace gapq
