#pragma once

// Independent closed-form references used by the unit and acceptance tests.
// Nothing here calls into the library's transform pipeline.

#include <array>
#include <cmath>
#include <complex>

namespace oracle {

using cplx = std::complex<double>;

/// Two-phase MMPP parameters (rates per second).
struct TwoPhase {
  double q1, q2, mu1, mu2;
};

/// Zeros of w^2 + (q1+mu1+q2+mu2) w + mu1 q2 + mu2 q1 + q1 q2, larger first.
inline std::array<double, 2> omegas(const TwoPhase& p) {
  const double b = p.q1 + p.mu1 + p.q2 + p.mu2;
  const double disc = p.q1 * p.q1 + p.q2 * p.q2 + p.mu1 * p.mu1 + p.mu2 * p.mu2 + 2 * p.q1 * p.mu1 +
                      2 * p.mu1 * p.mu2 + 2 * p.q2 * p.mu2 - 2 * p.mu1 * p.q2 - 2 * p.q1 * p.mu2 - 2 * p.q1 * p.q2;
  const double r = std::sqrt(disc);
  return {(-b + r) / 2, (-b - r) / 2};
}

/// phi_ij(t) for N = 2 by partial fractions of the two-phase transform.
inline double phi2(const TwoPhase& p, int i, int j, double t) {
  const auto [w1, w2] = omegas(p);
  const double mu[2] = {p.mu1, p.mu2};
  const double q[2] = {p.q1, p.q2};
  if (i != j) return mu[i] / (w1 - w2) * (std::exp(w1 * t) - std::exp(w2 * t));
  const int o = 1 - i;
  return ((w1 + q[o] + mu[o]) * std::exp(w1 * t) - (w2 + q[o] + mu[o]) * std::exp(w2 * t)) / (w1 - w2);
}

/// G~(s) for N = 2, behavior B1, from the explicit pair of linear equations
/// per column j (coefficients written out term by term).
inline std::array<std::array<cplx, 2>, 2> g2_explicit(const TwoPhase& p, double T, cplx s) {
  const auto [w1, w2] = omegas(p);
  const double d = w1 - w2;
  const cplx e1 = std::exp(-(s - w1) * T);
  const cplx e2 = std::exp(-(s - w2) * T);
  const cplx den = (s - w1) * (s - w2);
  auto diag_term = [&](double q_self, double q_o, double mu_o) {
    return 1.0 - q_self / d * (d * (s + q_o + mu_o) / den - (w1 + q_o + mu_o) / (s - w1) * e1 +
                               (w2 + q_o + mu_o) / (s - w2) * e2);
  };
  auto off_term = [&](double mu_i, double q_o) {
    return -mu_i * q_o / d * (d / den - 1.0 / (s - w1) * e1 + 1.0 / (s - w2) * e2);
  };
  const cplx a11 = diag_term(p.q1, p.q2, p.mu2);
  const cplx a12 = off_term(p.mu1, p.q2);
  const cplx a21 = off_term(p.mu2, p.q1);
  const cplx a22 = diag_term(p.q2, p.q1, p.mu1);
  const cplx det = a11 * a22 - a12 * a21;
  std::array<std::array<cplx, 2>, 2> g{};
  for (int j = 0; j < 2; ++j) {
    const cplx b1 = std::exp(-s * T) * phi2(p, 0, j, T);
    const cplx b2 = std::exp(-s * T) * phi2(p, 1, j, T);
    g[0][j] = (b1 * a22 - a12 * b2) / det;
    g[1][j] = (a11 * b2 - a21 * b1) / det;
  }
  return g;
}

/// Scalar (N = 1) B1 service transform and its first three raw moments.
inline cplx g1_lst(double q, double T, cplx s) {
  const cplx e = std::exp(-(s + q) * T);
  return (s + q) * e / (s + q * e);
}
// Evaluated in long double: the closed forms cancel badly for small qT.
inline double g1_m1(double q, double T) { return static_cast<double>(std::expm1(static_cast<long double>(q) * T) / q); }
inline double g1_m2(double q, double T) {
  const long double Q = q, e = std::exp(Q * T);
  return static_cast<double>(2 * (std::expm1(Q * T) - Q * T) * e / (Q * Q));
}
inline double g1_m3(double q, double T) {
  const long double Q = q, e = std::exp(Q * T);
  return static_cast<double>(3 * e * (Q * Q * T * T - 4 * Q * T * e + 2 * Q * T + 2 * e * std::expm1(Q * T)) /
                             (Q * Q * Q));
}

/// M/G/1 (Pollaczek-Khinchine) waiting-time mean and second moment.
inline double mg1_wait_mean(double lambda, double m1, double m2) {
  const double rho = lambda * m1;
  return lambda * m2 / (2 * (1 - rho));
}
inline double mg1_wait_second(double lambda, double m1, double m2, double m3) {
  const double rho = lambda * m1;
  const double w = mg1_wait_mean(lambda, m1, m2);
  return 2 * w * w + lambda * m3 / (3 * (1 - rho));
}

}  // namespace oracle

namespace oracle {

/// M^X/G/1 mean wait of an arbitrary customer (batch moments EB, EB(B-1)).
inline double mxg1_wait_mean(double lambda, double EB, double EBB1, double m1, double m2) {
  const double rho = lambda * EB * m1;
  return lambda * EB * m2 / (2 * (1 - rho)) + m1 * EBB1 / (2 * EB * (1 - rho));
}

}  // namespace oracle
