#include "gapq/gap_service.hpp"

#include <cmath>
#include <string>

#include "gapq/numerics/expm.hpp"

namespace gapq {

std::string_view to_string(Behavior b) {
  switch (b) {
    case Behavior::B1: return "B1";
    case Behavior::B2: return "B2";
    case Behavior::B3: return "B3";
  }
  return "?";
}

Behavior behavior_from_string(std::string_view name) {
  if (name == "B1") return Behavior::B1;
  if (name == "B2") return Behavior::B2;
  if (name == "B3") return Behavior::B3;
  throw ModelError("unknown behavior '" + std::string(name) + "' (expected B1, B2 or B3)");
}

BehaviorModel::BehaviorModel(Behavior kind, std::vector<Gap> gaps) : kind_(kind), gaps_(std::move(gaps)) {
  if (gaps_.empty()) throw ModelError("behavior needs at least one critical gap");
  double total = 0.0;
  for (const auto& g : gaps_) {
    if (!(g.T > 0.0) || !std::isfinite(g.T)) throw ModelError("critical gap T must be finite and > 0");
    if (!(g.p > 0.0)) throw ModelError("critical gap probabilities must be > 0");
    total += g.p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ModelError("critical gap probabilities must sum to 1");
  if (kind_ == Behavior::B1 && gaps_.size() != 1) throw ModelError("behavior B1 takes exactly one critical gap");
}

double BehaviorModel::mean_gap() const {
  double m = 0.0;
  for (const auto& g : gaps_) m += g.p * g.T;
  return m;
}

namespace {

// e^{-sT} phi(T) and psi_hat(s, T) as jets in s, from one block exponential.
template <class T>
struct GapTerms {
  JetMatrix<T> pass;      // e^{-sT} phi(T)
  JetMatrix<T> blocked;   // psi_hat(s, T)
};

template <class T>
GapTerms<T> gap_terms(const PhaseProcess& p, double T_gap, const Jet<T>& s) {
  const std::size_t n = p.phases(), K = s.order();
  const Matrix<T> M = p.killed_generator().map([](double x) { return T{x}; });
  Matrix<T> prop;
  const JetMatrix<T> integral = transient_integral(M, s.value(), T_gap, K, &prop);
  JetMatrix<T> pass(n, n, Jet<T>(K)), blocked(n, n, Jet<T>(K));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Jet<T> e(K);
      T f{1};
      for (std::size_t k = 0; k <= K; ++k) {
        e[k] = prop(i, j) * f;
        f *= T{-T_gap / static_cast<double>(k + 1)};
      }
      pass(i, j) = compose(e, s);
      blocked(i, j) = compose(integral(i, j), s) * T{p.rates()[j]};
    }
  return {std::move(pass), std::move(blocked)};
}

template <class T>
JetMatrix<T> identity_like(std::size_t n, std::size_t order) {
  return JetMatrix<T>::identity(n, Jet<T>(T{1}, order));
}

template <class T>
JetMatrix<T> solve_fixed_point(const JetMatrix<T>& blocked, const JetMatrix<T>& pass) {
  const std::size_t n = pass.rows();
  try {
    return solve_linear(identity_like<T>(n, pass(0, 0).order()) - blocked, pass);
  } catch (const NumericalError&) {
    throw ModelError("I - psi_hat is singular: service never completes from some phase");
  }
}

template <class T>
JetMatrix<T> lift(const JetMatrix<double>& m) {
  if constexpr (std::is_same_v<T, double>) {
    return m;
  } else {
    return m.map([](const Jet<double>& x) {
      std::vector<T> c(x.coefficients().begin(), x.coefficients().end());
      return Jet<T>(std::move(c));
    });
  }
}

}  // namespace

template <class T>
JetMatrix<T> service_lst_b1(const PhaseProcess& p, double T_gap, const Jet<T>& s) {
  if (!(T_gap > 0.0)) throw ModelError("critical gap T must be > 0");
  const auto g = gap_terms(p, T_gap, s);
  return solve_fixed_point(g.blocked, g.pass);
}

template <class T>
JetMatrix<T> service_lst_b2(const PhaseProcess& p, const BehaviorModel& b, const Jet<T>& s) {
  if (b.kind() != Behavior::B2) throw ModelError("service_lst_b2 needs a B2 behavior");
  const std::size_t n = p.phases();
  JetMatrix<T> pass(n, n, Jet<T>(s.order())), blocked(n, n, Jet<T>(s.order()));
  for (const auto& gap : b.gaps()) {
    const auto g = gap_terms(p, gap.T, s);
    pass += scaled(g.pass, T{gap.p});
    blocked += scaled(g.blocked, T{gap.p});
  }
  return solve_fixed_point(blocked, pass);
}

template <class T>
JetMatrix<T> service_lst_b3(const PhaseProcess& p, const BehaviorModel& b, const Jet<T>& s) {
  if (b.kind() != Behavior::B3) throw ModelError("service_lst_b3 needs a B3 behavior");
  const std::size_t n = p.phases();
  JetMatrix<T> mix(n, n, Jet<T>(s.order()));
  for (const auto& gap : b.gaps()) mix += scaled(service_lst_b1(p, gap.T, s), T{gap.p});
  return mix;
}

template <class T>
JetMatrix<T> service_lst(const PhaseProcess& p, const BehaviorModel& b, const Jet<T>& s) {
  switch (b.kind()) {
    case Behavior::B1: return service_lst_b1(p, b.gaps().front().T, s);
    case Behavior::B2: return service_lst_b2(p, b, s);
    case Behavior::B3: return service_lst_b3(p, b, s);
  }
  throw ModelError("unknown behavior");
}

#define GAPQ_INSTANTIATE(T)                                                                    \
  template JetMatrix<T> service_lst_b1(const PhaseProcess&, double, const Jet<T>&);            \
  template JetMatrix<T> service_lst_b2(const PhaseProcess&, const BehaviorModel&, const Jet<T>&); \
  template JetMatrix<T> service_lst_b3(const PhaseProcess&, const BehaviorModel&, const Jet<T>&); \
  template JetMatrix<T> service_lst(const PhaseProcess&, const BehaviorModel&, const Jet<T>&);
GAPQ_INSTANTIATE(double)
GAPQ_INSTANTIATE(cplx)
#undef GAPQ_INSTANTIATE

ServiceTransform::ServiceTransform(PhaseProcess process, BehaviorModel behavior, double lambda,
                                   std::size_t cache_order)
    : process_(std::move(process)), behavior_(std::move(behavior)), lambda_(lambda) {
  pbar_ = gapq::pbar(process_, lambda_);
  at_zero_ = service_lst(process_, behavior_, Jet<double>::variable(0.0, cache_order));
  P_ = values(at_zero_);
  P_star_ = pbar_ * P_;
}

template <class T>
KernelValue<T> ServiceTransform::evaluate(const Jet<T>& s) const {
  JetMatrix<T> g;
  if (s.value() == T{} && s.order() <= at_zero_(0, 0).order()) {
    g = lift<T>(at_zero_).map([&](const Jet<T>& x) { return compose(x, s); });
  } else {
    g = service_lst(process_, behavior_, s);
  }
  const JetMatrix<T> pb = to_jets(pbar_.map([](double x) { return T{x}; }), s.order());
  return {g, pb * g};
}

KernelValue<double> ServiceTransform::at(const Jet<double>& s) const { return evaluate(s); }
KernelValue<cplx> ServiceTransform::at(const Jet<cplx>& s) const { return evaluate(s); }

JetMatrix<double> first_service_lst(const PhaseProcess& p, const ServiceTransform& base, double lambda,
                                    const Jet<double>& s) {
  const JetMatrix<double> pb = to_jets(gapq::pbar(p, lambda), s.order());
  return pb * base.regular(s);
}

std::vector<Matrix<double>> raw_moments(const JetMatrix<double>& at_zero) {
  // E[G^k ...] = (-1)^k k! c_k
  std::vector<Matrix<double>> out;
  double f = 1.0;
  for (std::size_t k = 0; k <= at_zero(0, 0).order(); ++k) {
    if (k > 0) f *= -static_cast<double>(k);
    out.push_back(scaled(coefficient(at_zero, k), f));
  }
  return out;
}

ServiceMoments service_moments(const ServiceTransform& st) {
  const auto m = raw_moments(st.regular(Jet<double>::variable(0.0, 2)));
  ServiceMoments r;
  r.pi = stationary_of_stochastic(st.P());
  const auto m1 = row_sums(m[1]);
  const auto m2 = row_sums(m[2]);
  r.mean = r.second_moment = 0.0;
  for (std::size_t i = 0; i < r.pi.size(); ++i) {
    r.mean += r.pi[i] * m1[i];
    r.second_moment += r.pi[i] * m2[i];
  }
  return r;
}

}  // namespace gapq
