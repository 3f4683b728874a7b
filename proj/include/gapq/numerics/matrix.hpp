#pragma once

// Small dense row-major matrices over double, complex<double> or Jet<...>,
// plus the handful of direct solvers the transform pipeline needs.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "gapq/error.hpp"
#include "gapq/numerics/jet.hpp"
#include "gapq/numerics/policy.hpp"

namespace gapq {

template <class T>
class Matrix {
 public:
  using value_type = T;

  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, const T& fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<T>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw ModelError("ragged matrix literal");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  /// Identity built from a caller-supplied one, so jets keep their order.
  static Matrix identity(std::size_t n, const T& one) {
    const T zero = one - one;
    Matrix m(n, n, zero);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = one;
    return m;
  }
  static Matrix identity(std::size_t n)
    requires(std::is_same_v<T, double> || std::is_same_v<T, cplx>)
  {
    return identity(n, T{1});
  }

  static Matrix diagonal(const std::vector<T>& d) {
    Matrix m(d.size(), d.size(), T{});
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::vector<T> row(std::size_t i) const {
    return std::vector<T>(data_.begin() + i * cols_, data_.begin() + (i + 1) * cols_);
  }
  std::vector<T> col(std::size_t j) const {
    std::vector<T> c;
    c.reserve(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c.push_back((*this)(i, j));
    return c;
  }

  Matrix transposed() const {
    Matrix t(cols_, rows_, rows_ * cols_ != 0 ? data_[0] : T{});
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  template <class F>
  auto map(F&& f) const -> Matrix<decltype(f(std::declval<const T&>()))> {
    using U = decltype(f(std::declval<const T&>()));
    Matrix<U> out(rows_, cols_, rows_ * cols_ != 0 ? f(data_[0]) : U{});
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) out(i, j) = f((*this)(i, j));
    return out;
  }

  Matrix& operator+=(const Matrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  template <class S>
  Matrix& operator*=(const S& s) {
    for (auto& x : data_) x *= s;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator-(const Matrix& a) {
    Matrix r = a;
    for (auto& x : r.data_) x = -x;
    return r;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw ModelError("matrix product dimension mismatch");
    Matrix r(a.rows_, b.cols_, a.data_.empty() ? T{} : a.data_[0] - a.data_[0]);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const T& aik = a(i, k);
        for (std::size_t j = 0; j < b.cols_; ++j) r(i, j) += aik * b(k, j);
      }
    return r;
  }

 private:
  void check_same(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw ModelError("matrix dimension mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

template <class T>
using JetMatrix = Matrix<Jet<T>>;

template <class T, class S>
Matrix<T> scaled(Matrix<T> m, const S& s) {
  m *= s;
  return m;
}

/// Row vector times matrix.
template <class T>
std::vector<T> row_times(const std::vector<T>& v, const Matrix<T>& m) {
  if (v.size() != m.rows()) throw ModelError("row-vector product dimension mismatch");
  std::vector<T> out;
  out.reserve(m.cols());
  for (std::size_t j = 0; j < m.cols(); ++j) {
    T acc = v[0] * m(0, j);
    for (std::size_t i = 1; i < m.rows(); ++i) acc += v[i] * m(i, j);
    out.push_back(acc);
  }
  return out;
}

template <class T>
std::vector<T> times_col(const Matrix<T>& m, const std::vector<T>& v) {
  if (v.size() != m.cols()) throw ModelError("matrix-vector product dimension mismatch");
  std::vector<T> out;
  out.reserve(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    T acc = m(i, 0) * v[0];
    for (std::size_t j = 1; j < m.cols(); ++j) acc += m(i, j) * v[j];
    out.push_back(acc);
  }
  return out;
}

template <class T>
std::vector<T> row_sums(const Matrix<T>& m) {
  std::vector<T> out;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    T acc = m(i, 0);
    for (std::size_t j = 1; j < m.cols(); ++j) acc += m(i, j);
    out.push_back(acc);
  }
  return out;
}

template <class T>
double norm1(const Matrix<T>& m) {
  double best = 0.0;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) s += magnitude(m(i, j));
    best = std::max(best, s);
  }
  return best;
}

template <class T>
bool all_finite(const Matrix<T>& m) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (!is_finite(m(i, j))) return false;
  return true;
}

/// Promotes a scalar matrix to jets of the given order (constant series).
template <class T>
JetMatrix<T> to_jets(const Matrix<T>& m, std::size_t order) {
  return m.map([order](const T& x) { return Jet<T>(x, order); });
}

/// Coefficient k of every entry.
template <class T>
Matrix<T> coefficient(const JetMatrix<T>& m, std::size_t k) {
  return m.map([k](const Jet<T>& x) { return x.order() >= k ? x[k] : T{}; });
}

template <class T>
Matrix<T> values(const JetMatrix<T>& m) {
  return coefficient(m, 0);
}

namespace detail {

// In-place LU with partial pivoting on constant terms. Returns the permutation
// sign, or throws when a pivot is negligible relative to its original row.
template <class T>
int lu_factor(Matrix<T>& a, std::vector<std::size_t>& perm, double singular_pivot) {
  const std::size_t n = a.rows();
  std::vector<double> scale(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) scale[i] = std::max(scale[i], magnitude(a(i, j)));
  perm.resize(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  int sign = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    double best = magnitude(a(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      const double m = magnitude(a(i, k));
      if (m > best) {
        best = m;
        p = i;
      }
    }
    const double ref = scale[perm[p]] > 0.0 ? scale[perm[p]] : 1.0;
    if (!(best > singular_pivot * ref)) throw NumericalError("numerically singular matrix in linear solve");
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
      std::swap(perm[k], perm[p]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      a(i, k) = a(i, k) / a(k, k);
      const T l = a(i, k);
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= l * a(k, j);
    }
  }
  return sign;
}

}  // namespace detail

/// Solves A X = B (multiple right-hand sides) by partial-pivoting elimination.
template <class T>
Matrix<T> solve_linear(Matrix<T> a, const Matrix<T>& b, const NumericPolicy& policy = {}) {
  if (!a.square() || a.rows() != b.rows()) throw ModelError("solve_linear: non-conformal system");
  const std::size_t n = a.rows();
  std::vector<std::size_t> perm;
  detail::lu_factor(a, perm, policy.singular_pivot);
  Matrix<T> x(n, b.cols(), b(0, 0) - b(0, 0));
  for (std::size_t c = 0; c < b.cols(); ++c) {
    std::vector<T> y;
    y.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      T acc = b(perm[i], c);
      for (std::size_t j = 0; j < i; ++j) acc -= a(i, j) * y[j];
      y.push_back(acc);
    }
    for (std::size_t i = n; i-- > 0;) {
      T acc = y[i];
      for (std::size_t j = i + 1; j < n; ++j) acc -= a(i, j) * x(j, c);
      x(i, c) = acc / a(i, i);
    }
  }
  return x;
}

template <class T>
std::vector<T> solve_linear(const Matrix<T>& a, const std::vector<T>& b, const NumericPolicy& policy = {}) {
  Matrix<T> rhs(b.size(), 1, b.empty() ? T{} : b[0]);
  for (std::size_t i = 0; i < b.size(); ++i) rhs(i, 0) = b[i];
  return solve_linear(a, rhs, policy).col(0);
}

/// Determinant via LU; a zero pivot yields an exactly zero determinant.
template <class T>
T determinant(Matrix<T> a) {
  if (!a.square()) throw ModelError("determinant of a non-square matrix");
  const std::size_t n = a.rows();
  std::vector<std::size_t> perm;
  try {
    const int sign = detail::lu_factor(a, perm, 0.0);
    T det = a(0, 0);
    for (std::size_t i = 1; i < n; ++i) det = det * a(i, i);
    return sign < 0 ? -det : det;
  } catch (const NumericalError&) {
    return a(0, 0) - a(0, 0);
  }
}

/// Right null vector of a (numerically) rank-deficient matrix via complete
/// pivoting. The last pivot must fall below `rank_tolerance` times the
/// largest entry and every earlier pivot must stay above it.
template <class T>
std::vector<T> null_vector(Matrix<T> a, double rank_tolerance) {
  const std::size_t n = a.rows();
  double ref = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) ref = std::max(ref, magnitude(a(i, j)));
  if (n == 1 || ref == 0.0) ref = std::max(ref, 1.0);
  std::vector<std::size_t> colperm(n);
  for (std::size_t j = 0; j < n; ++j) colperm[j] = j;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    std::size_t pi = k, pj = k;
    double best = -1.0;
    for (std::size_t i = k; i < n; ++i)
      for (std::size_t j = k; j < n; ++j)
        if (magnitude(a(i, j)) > best) {
          best = magnitude(a(i, j));
          pi = i;
          pj = j;
        }
    if (best <= rank_tolerance * ref) throw NumericalError("null space has dimension > 1");
    for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(pi, j));
    for (std::size_t i = 0; i < n; ++i) std::swap(a(i, k), a(i, pj));
    std::swap(colperm[k], colperm[pj]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const T l = a(i, k) / a(k, k);
      for (std::size_t j = k; j < n; ++j) a(i, j) -= l * a(k, j);
    }
  }
  if (magnitude(a(n - 1, n - 1)) > rank_tolerance * ref)
    throw NumericalError("matrix is not rank deficient at the requested tolerance");
  std::vector<T> y(n, T{});
  y[n - 1] = T{1};
  for (std::size_t i = n - 1; i-- > 0;) {
    T acc{};
    for (std::size_t j = i + 1; j < n; ++j) acc -= a(i, j) * y[j];
    y[i] = acc / a(i, i);
  }
  std::vector<T> v(n);
  for (std::size_t j = 0; j < n; ++j) v[colperm[j]] = y[j];
  return v;
}

}  // namespace gapq
