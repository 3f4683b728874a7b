#pragma once

#include <limits>

#include "gapq/numerics/matrix.hpp"

namespace gapq {

/// exp(M t) by scaling and squaring with a Pade approximant of degree 3..13
/// selected from the 1-norm (Higham 2005). T is double or cplx.
template <class T>
Matrix<T> mat_exp(const Matrix<T>& m, double t = 1.0);

/// Taylor jet in s of  int_0^horizon e^{-s u} e^{M u} du  expanded at s0,
/// i.e. entry k is  int_0^horizon (-u)^k / k! e^{(M - s0 I) u} du.
///
/// Evaluated through one exponential of the (order+2)-block upper bidiagonal
/// matrix [[0, I], [A, I], ..., [A]] with A = M - s0 I, which stays valid when
/// A is singular. `propagator` (optional) receives e^{A horizon}.
template <class T>
JetMatrix<T> transient_integral(const Matrix<T>& m, T s0, double horizon, std::size_t order,
                                Matrix<T>* propagator = nullptr);

/// The same integral for a jet-valued s (composition of the expansion above).
template <class T>
JetMatrix<T> transient_integral(const Matrix<T>& m, const Jet<T>& s, double horizon);

/// Scalar-s convenience: int_0^horizon e^{(M - sI) u} du.
template <class T>
Matrix<T> transient_integral(const Matrix<T>& m, T s, double horizon);

}  // namespace gapq
