#include "gapq/phase_process.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "gapq/numerics/expm.hpp"

namespace gapq {
namespace {

bool irreducible(const Matrix<double>& Q) {
  const std::size_t n = Q.rows();
  // every state reaches every other iff state 0 reaches all and all reach 0
  auto reach_all = [&](bool forward) {
    std::vector<bool> seen(n, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      for (std::size_t j = 0; j < n; ++j) {
        const double rate = forward ? Q(i, j) : Q(j, i);
        if (j != i && rate > 0.0 && !seen[j]) {
          seen[j] = true;
          stack.push_back(j);
        }
      }
    }
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
  };
  return reach_all(true) && reach_all(false);
}

// Solves x A = 0, sum x = 1 for a generator-like A (rows sum to zero).
std::vector<double> left_kernel_distribution(Matrix<double> A) {
  const std::size_t n = A.rows();
  for (std::size_t i = 0; i < n; ++i) A(i, n - 1) = 1.0;
  std::vector<double> e(n, 0.0);
  e[n - 1] = 1.0;
  return solve_linear(A.transposed(), e);
}

}  // namespace

PhaseProcess::PhaseProcess(Matrix<double> generator, std::vector<double> rates)
    : Q_(std::move(generator)), q_(std::move(rates)) {
  const std::size_t n = q_.size();
  if (n == 0) throw ModelError("phase process needs at least one phase");
  if (Q_.rows() != n || Q_.cols() != n) throw ModelError("generator Q must be N x N with N = number of rates");
  if (!all_finite(Q_)) throw ModelError("generator Q has non-finite entries");
  bool any_positive = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(q_[i] >= 0.0) || !std::isfinite(q_[i]))
      throw ModelError("arrival rate q[" + std::to_string(i) + "] must be finite and >= 0");
    any_positive = any_positive || q_[i] > 0.0;
    double sum = 0.0, scale = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && Q_(i, j) < 0.0) throw ModelError("generator Q has a negative off-diagonal entry");
      sum += Q_(i, j);
      scale = std::max(scale, std::abs(Q_(i, j)));
    }
    if (std::abs(sum) > 1e-12 * std::max(1.0, scale))
      throw ModelError("generator row " + std::to_string(i) + " does not sum to zero");
  }
  if (!any_positive) throw ModelError("at least one phase must have a positive arrival rate");
  if (!irreducible(Q_)) throw ModelError("generator Q is not irreducible");
  M_ = Q_;
  for (std::size_t i = 0; i < n; ++i) M_(i, i) -= q_[i];
}

PhaseProcess PhaseProcess::poisson(double rate) { return PhaseProcess(Matrix<double>{{0.0}}, {rate}); }

PhaseProcess PhaseProcess::two_phase(double q1, double q2, double mu1, double mu2) {
  return PhaseProcess(Matrix<double>{{-mu1, mu1}, {mu2, -mu2}}, {q1, q2});
}

PhaseProcess PhaseProcess::with_mean_flow(double qbar) const {
  const double current = mean_flow_rate(*this);
  std::vector<double> q = q_;
  for (auto& x : q) x *= qbar / current;
  return PhaseProcess(Q_, std::move(q));
}

Matrix<double> phi(const PhaseProcess& p, double t) {
  if (t < 0.0) throw ModelError("phi: t must be >= 0");
  return mat_exp(p.killed_generator(), t);
}

Matrix<double> psi(const PhaseProcess& p, double t) {
  Matrix<double> m = phi(p, t);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) *= p.rates()[j];
  return m;
}

template <class T>
JetMatrix<T> psi_hat(const PhaseProcess& p, const Jet<T>& s, double T_gap) {
  if (T_gap < 0.0) throw ModelError("psi_hat: T must be >= 0");
  const Matrix<T> M = p.killed_generator().map([](double x) { return T{x}; });
  JetMatrix<T> r = transient_integral(M, s, T_gap);
  for (std::size_t i = 0; i < r.rows(); ++i)
    for (std::size_t j = 0; j < r.cols(); ++j) r(i, j) *= T{p.rates()[j]};
  return r;
}

template JetMatrix<double> psi_hat(const PhaseProcess&, const Jet<double>&, double);
template JetMatrix<cplx> psi_hat(const PhaseProcess&, const Jet<cplx>&, double);

Matrix<double> pbar(const PhaseProcess& p, double lambda) {
  if (!(lambda > 0.0)) throw ModelError("pbar: lambda must be > 0");
  const std::size_t n = p.phases();
  Matrix<double> a = Matrix<double>::identity(n) - scaled(p.generator(), 1.0 / lambda);
  return solve_linear(a, Matrix<double>::identity(n));
}

std::vector<double> stationary_phase(const PhaseProcess& p) { return left_kernel_distribution(p.generator()); }

double mean_flow_rate(const PhaseProcess& p) {
  const auto pi = stationary_phase(p);
  return std::inner_product(pi.begin(), pi.end(), p.rates().begin(), 0.0);
}

std::vector<double> stationary_of_stochastic(const Matrix<double>& P) {
  return left_kernel_distribution(P - Matrix<double>::identity(P.rows()));
}

}  // namespace gapq
