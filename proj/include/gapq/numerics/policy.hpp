#pragma once

namespace gapq {

/// Every numerical tolerance used by the analytic pipeline, in one place.
struct NumericPolicy {
  double root_residual = 1e-10;     // |g(z)| accepted for a polished root
  double contour_epsilon = 1e-6;    // roots are counted on |z| = 1 - epsilon
  double linear_residual = 1e-10;   // ||Ax - b|| <= tol * ||b||
  double singular_pivot = 1e-14;    // pivot / row-scale below this is singular
  double rank_tolerance = 1e-8;     // null-vector detection at interior roots
  double stochastic_tolerance = 1e-10;
  double max_load = 0.999;          // analytic solves refuse rho >= this
  int max_subdivision_depth = 40;
  bool force_subdivision = false;   // skip the moment method (testing)
};

}  // namespace gapq
