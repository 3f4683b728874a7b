#include "gapq/numerics/expm.hpp"

#include <array>
#include <cmath>

namespace gapq {
namespace {

constexpr std::array<double, 4> kPade3 = {120.0, 60.0, 12.0, 1.0};
constexpr std::array<double, 6> kPade5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
constexpr std::array<double, 8> kPade7 = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                          25200.0,    1512.0,    56.0,      1.0};
constexpr std::array<double, 10> kPade9 = {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0,
                                           30270240.0,    2162160.0,    110880.0,     3960.0,
                                           90.0,          1.0};
constexpr std::array<double, 14> kPade13 = {
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
    129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
    1323241920.0,        40840800.0,          960960.0,           16380.0,
    182.0,               1.0};

constexpr std::array<double, 4> kTheta = {1.495585217958292e-2, 2.539398330063230e-1,
                                          9.504178996162932e-1, 2.097847961257068e0};
constexpr double kTheta13 = 5.371920351148152e0;

template <class T, std::size_t K>
Matrix<T> pade_low(const Matrix<T>& a, const std::array<double, K>& b) {
  const std::size_t n = a.rows();
  const Matrix<T> id = Matrix<T>::identity(n);
  const Matrix<T> a2 = a * a;
  Matrix<T> u_inner = scaled(id, b[1]);
  Matrix<T> v = scaled(id, b[0]);
  Matrix<T> power = id;
  for (std::size_t k = 2; k < K; k += 2) {
    power = power * a2;
    u_inner += scaled(power, b[k + 1]);
    v += scaled(power, b[k]);
  }
  const Matrix<T> u = a * u_inner;
  return solve_linear(v - u, v + u);
}

template <class T>
Matrix<T> pade13(const Matrix<T>& a) {
  const auto& b = kPade13;
  const std::size_t n = a.rows();
  const Matrix<T> id = Matrix<T>::identity(n);
  const Matrix<T> a2 = a * a;
  const Matrix<T> a4 = a2 * a2;
  const Matrix<T> a6 = a4 * a2;
  Matrix<T> u_hi = scaled(a6, b[13]) + scaled(a4, b[11]) + scaled(a2, b[9]);
  Matrix<T> u_inner = a6 * u_hi + scaled(a6, b[7]) + scaled(a4, b[5]) + scaled(a2, b[3]) + scaled(id, b[1]);
  const Matrix<T> u = a * u_inner;
  Matrix<T> v_hi = scaled(a6, b[12]) + scaled(a4, b[10]) + scaled(a2, b[8]);
  Matrix<T> v = a6 * v_hi + scaled(a6, b[6]) + scaled(a4, b[4]) + scaled(a2, b[2]) + scaled(id, b[0]);
  return solve_linear(v - u, v + u);
}

}  // namespace

template <class T>
Matrix<T> mat_exp(const Matrix<T>& m, double t) {
  if (!m.square()) throw ModelError("mat_exp: matrix must be square");
  if (!all_finite(m) || !std::isfinite(t)) throw NumericalError("mat_exp: non-finite input");
  Matrix<T> a = scaled(m, t);
  const double n1 = norm1(a);
  if (n1 <= kTheta[0]) return pade_low(a, kPade3);
  if (n1 <= kTheta[1]) return pade_low(a, kPade5);
  if (n1 <= kTheta[2]) return pade_low(a, kPade7);
  if (n1 <= kTheta[3]) return pade_low(a, kPade9);
  const int squarings = std::max(0, static_cast<int>(std::ceil(std::log2(n1 / kTheta13))));
  a *= std::ldexp(1.0, -squarings);
  Matrix<T> r = pade13(a);
  for (int k = 0; k < squarings; ++k) r = r * r;
  return r;
}

template <class T>
JetMatrix<T> transient_integral(const Matrix<T>& m, T s0, double horizon, std::size_t order,
                                Matrix<T>* propagator) {
  if (!m.square()) throw ModelError("transient_integral: matrix must be square");
  if (!(horizon >= 0.0)) throw ModelError("transient_integral: horizon must be non-negative");
  const std::size_t n = m.rows();
  const std::size_t blocks = order + 2;
  Matrix<T> big(blocks * n, blocks * n, T{});
  for (std::size_t b = 0; b < blocks; ++b) {
    if (b >= 1) {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) big(b * n + i, b * n + j) = m(i, j) - (i == j ? s0 : T{});
    }
    if (b + 1 < blocks)
      for (std::size_t i = 0; i < n; ++i) big(b * n + i, (b + 1) * n + i) = T{1};
  }
  const Matrix<T> e = mat_exp(big, horizon);
  // Block (0, k+1) = int_0^h u^k/k! e^{A u} du; block (1, 1) = e^{A h}.
  JetMatrix<T> out(n, n, Jet<T>(order));
  for (std::size_t k = 0; k <= order; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out(i, j)[k] = sign * e(i, (k + 1) * n + j);
  }
  if (propagator) {
    Matrix<T> p(n, n, T{});
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) p(i, j) = e(n + i, n + j);
    *propagator = std::move(p);
  }
  return out;
}

template <class T>
JetMatrix<T> transient_integral(const Matrix<T>& m, const Jet<T>& s, double horizon) {
  const JetMatrix<T> expansion = transient_integral(m, s.value(), horizon, s.order());
  return expansion.map([&s](const Jet<T>& x) { return compose(x, s); });
}

template <class T>
Matrix<T> transient_integral(const Matrix<T>& m, T s, double horizon) {
  return values(transient_integral(m, s, horizon, 0));
}

template Matrix<double> mat_exp(const Matrix<double>&, double);
template Matrix<cplx> mat_exp(const Matrix<cplx>&, double);
template JetMatrix<double> transient_integral(const Matrix<double>&, double, double, std::size_t,
                                              Matrix<double>*);
template JetMatrix<cplx> transient_integral(const Matrix<cplx>&, cplx, double, std::size_t, Matrix<cplx>*);
template JetMatrix<double> transient_integral(const Matrix<double>&, const Jet<double>&, double);
template JetMatrix<cplx> transient_integral(const Matrix<cplx>&, const Jet<cplx>&, double);
template Matrix<double> transient_integral(const Matrix<double>&, double, double);
template Matrix<cplx> transient_integral(const Matrix<cplx>&, cplx, double);

}  // namespace gapq
