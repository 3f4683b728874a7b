#pragma once

#include <memory>
#include <vector>

#include "gapq/gap_service.hpp"
#include "gapq/numerics/policy.hpp"

namespace gapq {

struct BatchMass {
  unsigned k;
  double p;
};

/// Batch-size distribution on {1, 2, ...} with finite support.
class BatchDistribution {
 public:
  explicit BatchDistribution(std::vector<BatchMass> pmf);
  static BatchDistribution single() { return BatchDistribution({{1, 1.0}}); }
  static BatchDistribution uniform(unsigned lo, unsigned hi);

  const std::vector<BatchMass>& pmf() const { return pmf_; }
  unsigned max_size() const { return pmf_.back().k; }
  double mean() const;
  /// B''(1) = E[B(B-1)].
  double second_factorial() const;
  /// P(B >= m).
  double tail(unsigned m) const;
  bool degenerate() const { return pmf_.size() == 1; }

  template <class T>
  Jet<T> pgf(const Jet<T>& z) const {
    Jet<T> acc(T{}, z.order());
    Jet<T> power(T{1}, z.order());
    unsigned k = 0;
    for (const auto& m : pmf_) {
      for (; k < m.k; ++k) power = power * z;
      acc += power * T{m.p};
    }
    return acc;
  }

 private:
  std::vector<BatchMass> pmf_;
};

/// Coefficients of the embedded-chain equation  f(z) D(z) = f(0) C(z)
/// with D = zI - A(z) and C = B(z) A*(z) - A(z).
template <class T>
struct ChainCoefficients {
  JetMatrix<T> A, A_star, D, C;
};

/// A(z) = G~(lambda (1 - B(z))), A*(z) = G~*(lambda (1 - B(z))).
class MarkedPGFSystem {
 public:
  MarkedPGFSystem(std::shared_ptr<const ServiceKernel> kernel, double lambda, BatchDistribution batch);

  std::size_t phases() const { return kernel_->phases(); }
  double lambda() const { return lambda_; }
  const BatchDistribution& batch() const { return batch_; }
  const ServiceKernel& kernel() const { return *kernel_; }

  template <class T>
  ChainCoefficients<T> at(const Jet<T>& z) const;

 private:
  std::shared_ptr<const ServiceKernel> kernel_;
  double lambda_;
  BatchDistribution batch_;
};

MarkedPGFSystem build_system(std::shared_ptr<const ServiceKernel> st, double lambda, BatchDistribution batch);

/// rho = pi_P A'(1) 1; for a service transform this is lambda E[B] E[G].
double load(const MarkedPGFSystem& sys);
double load(std::shared_ptr<const ServiceKernel> st, double lambda, const BatchDistribution& batch);

/// Stationary departure-epoch solution f_i(z) = E[z^X 1{J = i}].
class QueueSolution {
 public:
  QueueSolution(MarkedPGFSystem sys, std::vector<double> boundary, std::vector<cplx> roots, double rho,
                NumericPolicy policy);

  const std::vector<double>& boundary() const { return f0_; }
  const std::vector<cplx>& roots() const { return roots_; }
  double rho() const { return rho_; }
  const MarkedPGFSystem& system() const { return sys_; }

  /// Taylor coefficients of f_i(1 + e) in e, through `order`.
  std::vector<Jet<double>> expand_at_one(std::size_t order) const;
  /// f_i(z); z = 1 is served by the expansion above, other points by solving
  /// the chain equation (undefined at the interior determinant roots).
  template <class T>
  std::vector<Jet<T>> evaluate(const Jet<T>& z) const;

 private:
  MarkedPGFSystem sys_;
  std::vector<double> f0_;
  std::vector<cplx> roots_;
  double rho_;
  NumericPolicy policy_;
};

QueueSolution solve_queue(const MarkedPGFSystem& sys, const NumericPolicy& policy = {});

struct QueueMoments {
  double mean;
  double variance;
};
QueueMoments queue_length_moments(const QueueSolution& qs);

}  // namespace gapq
