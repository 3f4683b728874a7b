#pragma once

// Truncated Taylor series ("jets") in one formal variable.
//
// A Jet of order K stores c_0..c_K where c_k = f^(k)(x0) / k!. Arithmetic
// is exact truncated-series algebra, so pushing a jet through a computation
// yields the Taylor coefficients of the composed function. Binary operations
// on jets of different orders truncate to the smaller order.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <type_traits>
#include <vector>

#include "gapq/error.hpp"

namespace gapq {

using cplx = std::complex<double>;

template <class T>
class Jet {
 public:
  using value_type = T;

  Jet() : c_(1, T{}) {}
  explicit Jet(std::size_t order) : c_(order + 1, T{}) {}
  Jet(T value, std::size_t order) : c_(order + 1, T{}) { c_[0] = value; }
  explicit Jet(std::vector<T> coefficients) : c_(std::move(coefficients)) {
    if (c_.empty()) c_.push_back(T{});
  }

  /// x0 + 1*h: the independent variable expanded at x0.
  static Jet variable(T x0, std::size_t order) {
    Jet j(x0, order);
    if (order >= 1) j.c_[1] = T{1};
    return j;
  }
  static Jet constant(T value, std::size_t order) { return Jet(value, order); }

  std::size_t order() const { return c_.size() - 1; }
  T value() const { return c_[0]; }
  T& operator[](std::size_t k) { return c_[k]; }
  const T& operator[](std::size_t k) const { return c_[k]; }
  std::span<const T> coefficients() const { return c_; }

  /// k-th derivative at the expansion point (k! * c_k).
  T derivative(std::size_t k) const {
    double f = 1.0;
    for (std::size_t i = 2; i <= k; ++i) f *= static_cast<double>(i);
    return c_[k] * f;
  }

  Jet truncated(std::size_t order) const {
    std::vector<T> c(c_.begin(), c_.begin() + std::min(order, this->order()) + 1);
    return Jet(std::move(c));
  }

  /// Drops c_0 and shifts: (f - f(x0)) / h.
  Jet shifted_down() const {
    if (order() == 0) return Jet(T{}, 0);
    return Jet(std::vector<T>(c_.begin() + 1, c_.end()));
  }

  Jet operator-() const {
    Jet r = *this;
    for (auto& x : r.c_) x = -x;
    return r;
  }

  Jet& operator+=(const Jet& o) {
    shrink_to(o.order());
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] += o.c_[k];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    shrink_to(o.order());
    for (std::size_t k = 0; k < c_.size(); ++k) c_[k] -= o.c_[k];
    return *this;
  }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }
  Jet& operator/=(const Jet& o) { return *this = *this / o; }

  Jet& operator+=(const T& s) { c_[0] += s; return *this; }
  Jet& operator-=(const T& s) { c_[0] -= s; return *this; }
  Jet& operator*=(const T& s) {
    for (auto& x : c_) x *= s;
    return *this;
  }
  Jet& operator/=(const T& s) {
    for (auto& x : c_) x /= s;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator+(Jet a, const T& s) { return a += s; }
  friend Jet operator+(const T& s, Jet a) { return a += s; }
  friend Jet operator-(Jet a, const T& s) { return a -= s; }
  friend Jet operator-(const T& s, const Jet& a) { return -a + s; }
  friend Jet operator*(Jet a, const T& s) { return a *= s; }
  friend Jet operator*(const T& s, Jet a) { return a *= s; }
  friend Jet operator/(Jet a, const T& s) { return a /= s; }

  friend Jet operator*(const Jet& a, const Jet& b) {
    const std::size_t n = std::min(a.order(), b.order());
    Jet r(n);
    for (std::size_t k = 0; k <= n; ++k) {
      T acc{};
      for (std::size_t i = 0; i <= k; ++i) acc += a.c_[i] * b.c_[k - i];
      r.c_[k] = acc;
    }
    return r;
  }

  friend Jet operator/(const Jet& a, const Jet& b) {
    if (b.c_[0] == T{}) throw NumericalError("jet division by a series with zero constant term");
    const std::size_t n = std::min(a.order(), b.order());
    Jet r(n);
    for (std::size_t k = 0; k <= n; ++k) {
      T acc = a.c_[k];
      for (std::size_t i = 1; i <= k; ++i) acc -= b.c_[i] * r.c_[k - i];
      r.c_[k] = acc / b.c_[0];
    }
    return r;
  }

  friend Jet operator/(const T& s, const Jet& b) { return Jet(s, b.order()) / b; }

 private:
  void shrink_to(std::size_t order) {
    if (order < this->order()) c_.resize(order + 1);
  }

  std::vector<T> c_;
};

template <class T>
Jet<T> reciprocal(const Jet<T>& a) {
  return T{1} / a;
}

template <class T>
Jet<T> exp(const Jet<T>& a) {
  using std::exp;
  Jet<T> r(a.order());
  r[0] = exp(a[0]);
  for (std::size_t k = 1; k <= a.order(); ++k) {
    T acc{};
    for (std::size_t j = 1; j <= k; ++j) acc += static_cast<double>(j) * a[j] * r[k - j];
    r[k] = acc / static_cast<double>(k);
  }
  return r;
}

template <class T>
Jet<T> pow(const Jet<T>& a, unsigned n) {
  Jet<T> result(T{1}, a.order());
  Jet<T> base = a;
  while (n > 0) {
    if (n & 1u) result = result * base;
    n >>= 1u;
    if (n > 0) base = base * base;
  }
  return result;
}

/// Evaluates the series `outer` (expanded at inner.value()) at the jet `inner`:
/// sum_k outer[k] * (inner - inner.value())^k, truncated to the smaller order.
template <class T>
Jet<T> compose(const Jet<T>& outer, const Jet<T>& inner) {
  const std::size_t n = std::min(outer.order(), inner.order());
  Jet<T> delta = inner.truncated(n);
  delta[0] = T{};
  Jet<T> acc(outer[n], n);
  for (std::size_t k = n; k-- > 0;) {
    acc = acc * delta;
    acc[0] += outer[k];
  }
  return acc;
}

// Magnitude used for pivoting: jets pivot on their constant term.
inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(const cplx& x) { return std::abs(x); }
template <class T>
double magnitude(const Jet<T>& x) {
  return magnitude(x.value());
}

template <class T>
bool is_finite(const T& x) {
  if constexpr (std::is_same_v<T, double>) {
    return std::isfinite(x);
  } else {
    return std::isfinite(x.real()) && std::isfinite(x.imag());
  }
}

}  // namespace gapq
