#include "gapq/queue_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "gapq/numerics/roots.hpp"

namespace gapq {

BatchDistribution::BatchDistribution(std::vector<BatchMass> pmf) : pmf_(std::move(pmf)) {
  if (pmf_.empty()) throw ModelError("batch distribution is empty");
  std::sort(pmf_.begin(), pmf_.end(), [](const BatchMass& a, const BatchMass& b) { return a.k < b.k; });
  double total = 0.0;
  for (std::size_t i = 0; i < pmf_.size(); ++i) {
    if (pmf_[i].k == 0) throw ModelError("zero-sized batches are not allowed");
    if (i > 0 && pmf_[i].k == pmf_[i - 1].k) throw ModelError("batch size listed twice");
    if (!(pmf_[i].p > 0.0)) throw ModelError("batch probabilities must be > 0");
    total += pmf_[i].p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ModelError("batch probabilities must sum to 1 (got " + std::to_string(total) + ")");
}

BatchDistribution BatchDistribution::uniform(unsigned lo, unsigned hi) {
  std::vector<BatchMass> pmf;
  for (unsigned k = lo; k <= hi; ++k) pmf.push_back({k, 1.0 / (hi - lo + 1)});
  return BatchDistribution(std::move(pmf));
}

double BatchDistribution::mean() const {
  return std::accumulate(pmf_.begin(), pmf_.end(), 0.0, [](double a, const BatchMass& m) { return a + m.k * m.p; });
}

double BatchDistribution::second_factorial() const {
  return std::accumulate(pmf_.begin(), pmf_.end(), 0.0,
                         [](double a, const BatchMass& m) { return a + m.k * (m.k - 1.0) * m.p; });
}

double BatchDistribution::tail(unsigned m) const {
  double t = 0.0;
  for (const auto& x : pmf_)
    if (x.k >= m) t += x.p;
  return t;
}

MarkedPGFSystem::MarkedPGFSystem(std::shared_ptr<const ServiceKernel> kernel, double lambda, BatchDistribution batch)
    : kernel_(std::move(kernel)), lambda_(lambda), batch_(std::move(batch)) {
  if (!kernel_) throw ModelError("missing service kernel");
  if (!(lambda_ > 0.0)) throw ModelError("batch arrival rate lambda must be > 0");
}

template <class T>
ChainCoefficients<T> MarkedPGFSystem::at(const Jet<T>& z) const {
  const Jet<T> bz = batch_.pgf(z);
  Jet<T> s = (T{1} - bz) * T{lambda_};
  if (z.value() == T{1}) s[0] = T{};  // B(1) = 1 exactly
  KernelValue<T> kv = kernel_->at(s);
  const std::size_t n = phases();
  JetMatrix<T> D = JetMatrix<T>::identity(n, z) - kv.regular;
  JetMatrix<T> C = kv.exceptional;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) C(i, j) = C(i, j) * bz - kv.regular(i, j);
  return {std::move(kv.regular), std::move(kv.exceptional), std::move(D), std::move(C)};
}

template ChainCoefficients<double> MarkedPGFSystem::at(const Jet<double>&) const;
template ChainCoefficients<cplx> MarkedPGFSystem::at(const Jet<cplx>&) const;

MarkedPGFSystem build_system(std::shared_ptr<const ServiceKernel> st, double lambda, BatchDistribution batch) {
  return MarkedPGFSystem(std::move(st), lambda, std::move(batch));
}

double load(const MarkedPGFSystem& sys) {
  const auto c = sys.at(Jet<double>::variable(1.0, 1));
  const auto pi = stationary_of_stochastic(values(c.A));
  const auto d = row_sums(coefficient(c.A, 1));
  return std::inner_product(pi.begin(), pi.end(), d.begin(), 0.0);
}

double load(std::shared_ptr<const ServiceKernel> st, double lambda, const BatchDistribution& batch) {
  return load(build_system(std::move(st), lambda, batch));
}

namespace {

// D̂ = [D0 columns 0..N-2 | D1 1]; same layout for Ĉ.
Matrix<double> hat(const Matrix<double>& m0, const Matrix<double>& m1) {
  Matrix<double> h = m0;
  const auto last = row_sums(m1);
  for (std::size_t i = 0; i < h.rows(); ++i) h(i, h.cols() - 1) = last[i];
  return h;
}

}  // namespace

QueueSolution::QueueSolution(MarkedPGFSystem sys, std::vector<double> boundary, std::vector<cplx> roots, double rho,
                             NumericPolicy policy)
    : sys_(std::move(sys)), f0_(std::move(boundary)), roots_(std::move(roots)), rho_(rho), policy_(policy) {}

std::vector<Jet<double>> QueueSolution::expand_at_one(std::size_t order) const {
  const std::size_t n = sys_.phases();
  const auto c = sys_.at(Jet<double>::variable(1.0, order + 1));
  std::vector<Matrix<double>> Dk, Ck;
  for (std::size_t k = 0; k <= order + 1; ++k) {
    Dk.push_back(coefficient(c.D, k));
    Ck.push_back(coefficient(c.C, k));
  }
  const Matrix<double> Dt = hat(Dk[0], Dk[1]).transposed();
  std::vector<std::vector<double>> f;  // f[k] = coefficient k of the row vector f(1 + e)
  for (std::size_t k = 0; k <= order; ++k) {
    std::vector<double> r = row_times(f0_, Ck[k]);
    std::vector<double> r1 = row_times(f0_, Ck[k + 1]);
    for (std::size_t m = 0; m < k; ++m) {
      const auto a = row_times(f[m], Dk[k - m]);
      const auto b = row_times(f[m], Dk[k + 1 - m]);
      for (std::size_t j = 0; j < n; ++j) {
        r[j] -= a[j];
        r1[j] -= b[j];
      }
    }
    r[n - 1] = std::accumulate(r1.begin(), r1.end(), 0.0);
    f.push_back(solve_linear(Dt, r));
  }
  std::vector<Jet<double>> out(n, Jet<double>(order));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k <= order; ++k) out[i][k] = f[k][i];
  return out;
}

template <class T>
std::vector<Jet<T>> QueueSolution::evaluate(const Jet<T>& z) const {
  const std::size_t n = sys_.phases();
  if (z.value() == T{1}) {
    const auto series = expand_at_one(z.order());
    std::vector<Jet<T>> out;
    for (const auto& s : series) {
      std::vector<T> c(s.coefficients().begin(), s.coefficients().end());
      out.push_back(compose(Jet<T>(std::move(c)), z));
    }
    return out;
  }
  const auto c = sys_.at(z);
  std::vector<Jet<T>> f0(n);
  for (std::size_t i = 0; i < n; ++i) f0[i] = Jet<T>(T{f0_[i]}, z.order());
  const auto rhs = row_times(f0, c.C);
  return solve_linear(c.D.transposed(), rhs, policy_);
}

template std::vector<Jet<double>> QueueSolution::evaluate(const Jet<double>&) const;
template std::vector<Jet<cplx>> QueueSolution::evaluate(const Jet<cplx>&) const;

QueueSolution solve_queue(const MarkedPGFSystem& sys, const NumericPolicy& policy) {
  const std::size_t n = sys.phases();
  const double rho = load(sys);
  if (!(rho < policy.max_load))
    throw UnstableError("offered load rho = " + std::to_string(rho) + " is at or above the supported maximum " +
                            std::to_string(policy.max_load),
                        rho);

  // Interior zeros of det(zI - A(z)), with the known zero at z = 1 divided out.
  const AnalyticFunction g = [&sys](const Jet<cplx>& z) {
    return determinant(sys.at(z).D) / (z - cplx{1.0});
  };
  std::vector<cplx> roots;
  try {
    roots = unit_disk_roots(g, static_cast<int>(n) - 1, policy);
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("boundary roots: ") + e.what() + " (model unstable or ill-posed?)");
  }
  for (std::size_t a = 0; a < roots.size(); ++a)
    for (std::size_t b = a + 1; b < roots.size(); ++b)
      if (std::abs(roots[a] - roots[b]) < 1e-7)
        throw NumericalError("repeated interior root: boundary conditions need distinct roots");

  // One condition per interior root: f(0) C(z) v = 0 for D(z) v = 0; then F(1) = 1.
  Matrix<cplx> system(n, n, cplx{});
  std::vector<cplx> rhs(n, cplx{});
  for (std::size_t r = 0; r < roots.size(); ++r) {
    const auto c = sys.at(Jet<cplx>(roots[r], 0));
    const auto v = null_vector(values(c.D), policy.rank_tolerance);
    const auto cv = times_col(values(c.C), v);
    double scale = 0.0;
    for (const auto& x : cv) scale = std::max(scale, std::abs(x));
    if (scale == 0.0) throw NumericalError("degenerate boundary condition at an interior root");
    for (std::size_t i = 0; i < n; ++i) system(r, i) = cv[i] / scale;
  }
  {
    const auto c = sys.at(Jet<double>::variable(1.0, 1));
    const Matrix<double> Dh = hat(coefficient(c.D, 0), coefficient(c.D, 1));
    const Matrix<double> Ch = hat(coefficient(c.C, 0), coefficient(c.C, 1));
    const auto w = times_col(Ch, solve_linear(Dh, std::vector<double>(n, 1.0), policy));
    for (std::size_t i = 0; i < n; ++i) system(n - 1, i) = w[i];
    rhs[n - 1] = 1.0;
  }
  const auto f0c = solve_linear(system, rhs, policy);
  std::vector<double> f0(n);
  double biggest = 0.0;
  for (const auto& x : f0c) biggest = std::max(biggest, std::abs(x));
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(f0c[i].imag()) > 1e-8 * std::max(biggest, 1e-300))
      throw NumericalError("boundary probabilities are not real");
    f0[i] = f0c[i].real();
    if (f0[i] < -1e-9) throw NumericalError("negative boundary probability f_" + std::to_string(i) + "(0)");
    f0[i] = std::max(f0[i], 0.0);
  }
  return QueueSolution(sys, std::move(f0), std::move(roots), rho, policy);
}

QueueMoments queue_length_moments(const QueueSolution& qs) {
  const auto f = qs.expand_at_one(2);
  double f1 = 0.0, f2 = 0.0;
  for (const auto& fi : f) {
    f1 += fi[1];
    f2 += fi[2];
  }
  return {f1, 2 * f2 + f1 - f1 * f1};
}

}  // namespace gapq
