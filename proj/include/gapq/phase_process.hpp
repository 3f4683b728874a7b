#pragma once

#include <cstddef>
#include <vector>

#include "gapq/numerics/matrix.hpp"

namespace gapq {

/// Markov-modulated Poisson process on the major road. Rates are per second.
class PhaseProcess {
 public:
  /// Validates that Q is an irreducible generator and q >= 0 with some q_i > 0.
  PhaseProcess(Matrix<double> generator, std::vector<double> rates);

  static PhaseProcess poisson(double rate);
  /// Two phases with mean sojourns 1/mu1, 1/mu2 and arrival rates q1, q2.
  static PhaseProcess two_phase(double q1, double q2, double mu1, double mu2);
  /// Same generator, rates rescaled so that mean_flow_rate() equals `qbar`.
  PhaseProcess with_mean_flow(double qbar) const;

  std::size_t phases() const { return q_.size(); }
  const Matrix<double>& generator() const { return Q_; }
  const std::vector<double>& rates() const { return q_; }
  /// Q - diag(q): generator of the phase process killed at a major-road arrival.
  const Matrix<double>& killed_generator() const { return M_; }

 private:
  Matrix<double> Q_;
  std::vector<double> q_;
  Matrix<double> M_;
};

/// P(no major arrival in [0,t], J(t) = j | J(0) = i) = exp((Q - diag q) t).
Matrix<double> phi(const PhaseProcess& p, double t);
/// Density of the first major arrival at t, jointly with the phase: phi(t) diag(q).
Matrix<double> psi(const PhaseProcess& p, double t);
/// int_0^T e^{-s t} psi(t) dt as a jet in s.
template <class T>
JetMatrix<T> psi_hat(const PhaseProcess& p, const Jet<T>& s, double T_gap);
/// Phase redistribution over an Exp(lambda) idle period: (I - Q/lambda)^{-1}.
Matrix<double> pbar(const PhaseProcess& p, double lambda);
std::vector<double> stationary_phase(const PhaseProcess& p);
/// Long-run major-road flow sum_i pi_i q_i (per second).
double mean_flow_rate(const PhaseProcess& p);

/// Stationary distribution of an irreducible stochastic matrix.
std::vector<double> stationary_of_stochastic(const Matrix<double>& P);

}  // namespace gapq
