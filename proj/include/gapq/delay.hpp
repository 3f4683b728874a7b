#pragma once

#include <memory>
#include <vector>

#include "gapq/queue_core.hpp"

namespace gapq {

/// A whole batch served as one customer:
///   regular     = E[G~(s)^B],
///   exceptional = G~*(s) E[G~(s)^(B-1)].
class SuperServiceTransform final : public ServiceKernel {
 public:
  SuperServiceTransform(std::shared_ptr<const ServiceKernel> base, BatchDistribution batch);

  std::size_t phases() const override { return base_->phases(); }
  KernelValue<double> at(const Jet<double>& s) const override;
  KernelValue<cplx> at(const Jet<cplx>& s) const override;

  const ServiceKernel& base() const { return *base_; }
  const BatchDistribution& batch() const { return batch_; }

 private:
  template <class T>
  KernelValue<T> evaluate(const Jet<T>& s) const;

  std::shared_ptr<const ServiceKernel> base_;
  BatchDistribution batch_;
};

KernelValue<double> super_service(std::shared_ptr<const ServiceKernel> st, const BatchDistribution& batch,
                                  const Jet<double>& s);

/// Departure-epoch chain of super customers (batch size one, B(z) = z).
QueueSolution super_chain(std::shared_ptr<const SuperServiceTransform> ss, double lambda,
                          const NumericPolicy& policy = {});

/// Per type i: P(X^d = 0, J = i) and E[z^(X^d - 1) 1{X^d >= 1, J = i}].
struct BeginServiceSplit {
  std::vector<Jet<double>> empty;
  std::vector<Jet<double>> nonempty;
};
BeginServiceSplit begin_service_split(const QueueSolution& qs, const Jet<double>& z);

/// Distributional Little's law at z = 1 - s/lambda, per type.
struct LittleTransforms {
  std::vector<Jet<double>> wait_empty;     // E[e^{-sW} 1{arrived to empty, J = i}]
  std::vector<Jet<double>> wait_nonempty;  // E[e^{-sW} 1{arrived to busy, J = i}]
  std::vector<Jet<double>> sojourn;        // E[e^{-sS} 1{J = i}]
  Jet<double> wait() const;
  Jet<double> sojourn_total() const;
};
LittleTransforms little_transforms(const QueueSolution& qs, double lambda, const Jet<double>& s);

/// r_m = P(B >= m) / E[B]: probability that a customer is m-th in its batch.
std::vector<double> position_probabilities(const BatchDistribution& batch);

/// Waiting and sojourn transforms of batch customers by position, built on
/// the super-customer solution.
class DelayTransforms {
 public:
  DelayTransforms(std::shared_ptr<const ServiceKernel> customer, BatchDistribution batch, double lambda,
                  const NumericPolicy& policy = {});

  const QueueSolution& super_solution() const { return super_; }
  const BatchDistribution& batch() const { return batch_; }
  double lambda() const { return lambda_; }
  const ServiceKernel& customer() const { return *customer_; }

  LittleTransforms little(const Jet<double>& s) const { return little_transforms(super_, lambda_, s); }
  /// W^(m)(s) for every m = 1..count.
  std::vector<Jet<double>> position_waits(unsigned count, const Jet<double>& s) const;

 private:
  std::shared_ptr<const ServiceKernel> customer_;
  BatchDistribution batch_;
  double lambda_;
  QueueSolution super_;
};

Jet<double> position_wait_lst(const DelayTransforms& dt, unsigned m, const Jet<double>& s);
/// S^(m) = W^(m+1): the sojourn of the m-th ends when the (m+1)-th would start.
Jet<double> position_sojourn_lst(const DelayTransforms& dt, unsigned m, const Jet<double>& s);

struct DelayLst {
  Jet<double> wait;
  Jet<double> sojourn;
};
DelayLst arbitrary_delay(const DelayTransforms& dt, const Jet<double>& s);

struct DelayMoments {
  double EW, VarW, ES, VarS;
};
DelayMoments delay_moments(const DelayTransforms& dt);

}  // namespace gapq
