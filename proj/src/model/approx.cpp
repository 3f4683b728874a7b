#include "gapq/approx.hpp"

#include <cmath>

#include "gapq/delay.hpp"

namespace gapq {

void ApproxParams::validate() const {
  if (!(delta >= 0.0)) throw ModelError("approximation: delta must be >= 0");
  if (!(eta > 0.0)) throw ModelError("approximation: eta must be > 0");
  if (!(rho > 0.0 && rho < 1.0)) throw ModelError("approximation: rho must lie in (0, 1)");
}

double lt_limit_delta(const BatchDistribution& batch) {
  const auto r = position_probabilities(batch);
  double delta = 0.0;
  for (std::size_t k = 1; k < r.size(); ++k) delta += static_cast<double>(k) * r[k];
  return delta;
}

double ex_approx(const ApproxParams& p) {
  p.validate();
  return (p.delta + p.rho * (1.0 / p.eta - p.delta)) / (1.0 - p.rho);
}

double sojourn_approx(const ApproxParams& p, double lambda, const BatchDistribution& batch) {
  if (!(lambda > 0.0)) throw ModelError("approximation: lambda must be > 0");
  const double EB = batch.mean();
  return (ex_approx(p) - batch.second_factorial() / (2.0 * EB)) / (lambda * EB);
}

double wait_approx(const ApproxParams& p, double lambda, const BatchDistribution& batch, const ServiceTransform& st) {
  return sojourn_approx(p, lambda, batch) - service_moments(st).mean;
}

double estimate_eta(const std::function<double(double rho)>& exact_ex, const std::vector<double>& rho_grid) {
  if (rho_grid.size() < 2) throw ModelError("estimate_eta needs at least two load levels");
  // Lagrange extrapolation of h(rho) = (1 - rho) E[X] to rho = 1
  std::vector<double> h;
  for (double r : rho_grid) {
    if (!(r > 0.0 && r < 1.0)) throw ModelError("estimate_eta: loads must lie in (0, 1)");
    h.push_back((1.0 - r) * exact_ex(r));
  }
  double limit = 0.0;
  for (std::size_t i = 0; i < rho_grid.size(); ++i) {
    double w = 1.0;
    for (std::size_t j = 0; j < rho_grid.size(); ++j)
      if (j != i) w *= (1.0 - rho_grid[j]) / (rho_grid[i] - rho_grid[j]);
    limit += w * h[i];
  }
  if (!(limit > 0.0)) throw NumericalError("estimate_eta: extrapolated limit is not positive");
  return 1.0 / limit;
}

}  // namespace gapq
