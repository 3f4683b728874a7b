#pragma once

#include <memory>
#include <string_view>
#include <vector>

#include "gapq/phase_process.hpp"

namespace gapq {

enum class Behavior { B1, B2, B3 };

std::string_view to_string(Behavior b);
Behavior behavior_from_string(std::string_view name);

struct Gap {
  double T;  // critical headway, seconds
  double p;
};

/// Driver gap-acceptance behavior with a finite-support critical headway.
class BehaviorModel {
 public:
  BehaviorModel(Behavior kind, std::vector<Gap> gaps);
  static BehaviorModel constant(double T) { return {Behavior::B1, {{T, 1.0}}}; }

  Behavior kind() const { return kind_; }
  const std::vector<Gap>& gaps() const { return gaps_; }
  double mean_gap() const;

 private:
  Behavior kind_;
  std::vector<Gap> gaps_;
};

/// Regular and exceptional (first in busy period) service LST matrices.
template <class T>
struct KernelValue {
  JetMatrix<T> regular;
  JetMatrix<T> exceptional;
};

/// Anything that yields the pair (G~(s), G~*(s)) of N x N service transforms.
class ServiceKernel {
 public:
  virtual ~ServiceKernel() = default;
  virtual std::size_t phases() const = 0;
  virtual KernelValue<double> at(const Jet<double>& s) const = 0;
  virtual KernelValue<cplx> at(const Jet<cplx>& s) const = 0;
};

/// G~(s) and G~*(s) = P̄ G~(s) for a phase process, behavior and batch rate.
/// The expansion at s = 0 is cached; other points are evaluated afresh.
class ServiceTransform final : public ServiceKernel {
 public:
  ServiceTransform(PhaseProcess process, BehaviorModel behavior, double lambda, std::size_t cache_order = 12);

  std::size_t phases() const override { return process_.phases(); }
  KernelValue<double> at(const Jet<double>& s) const override;
  KernelValue<cplx> at(const Jet<cplx>& s) const override;

  JetMatrix<double> regular(const Jet<double>& s) const { return at(s).regular; }
  JetMatrix<double> exceptional(const Jet<double>& s) const { return at(s).exceptional; }

  const Matrix<double>& P() const { return P_; }
  const Matrix<double>& P_star() const { return P_star_; }
  const Matrix<double>& pbar() const { return pbar_; }
  const PhaseProcess& process() const { return process_; }
  const BehaviorModel& behavior() const { return behavior_; }
  double lambda() const { return lambda_; }

 private:
  template <class T>
  KernelValue<T> evaluate(const Jet<T>& s) const;

  PhaseProcess process_;
  BehaviorModel behavior_;
  double lambda_;
  Matrix<double> pbar_;
  JetMatrix<double> at_zero_;  // G~ expanded at s = 0
  Matrix<double> P_, P_star_;
};

template <class T>
JetMatrix<T> service_lst_b1(const PhaseProcess& p, double T_gap, const Jet<T>& s);
template <class T>
JetMatrix<T> service_lst_b2(const PhaseProcess& p, const BehaviorModel& b, const Jet<T>& s);
template <class T>
JetMatrix<T> service_lst_b3(const PhaseProcess& p, const BehaviorModel& b, const Jet<T>& s);
/// Dispatches on b.kind().
template <class T>
JetMatrix<T> service_lst(const PhaseProcess& p, const BehaviorModel& b, const Jet<T>& s);

JetMatrix<double> first_service_lst(const PhaseProcess& p, const ServiceTransform& base, double lambda,
                                    const Jet<double>& s);

struct ServiceMoments {
  std::vector<double> pi;  // stationary distribution of P
  double mean;
  double second_moment;
};

/// Stationary-type moments of the regular service time.
ServiceMoments service_moments(const ServiceTransform& st);
/// Raw moments E[G^k 1{J'=j} | J=i] (k = 0..order) of a kernel at s = 0.
std::vector<Matrix<double>> raw_moments(const JetMatrix<double>& at_zero);

}  // namespace gapq
