#pragma once

#include <functional>
#include <vector>

#include "gapq/numerics/jet.hpp"
#include "gapq/numerics/policy.hpp"

namespace gapq {

/// An analytic function evaluated on jets; a first-order jet input yields
/// the value and the derivative in one call.
using AnalyticFunction = std::function<Jet<cplx>(const Jet<cplx>&)>;

/// Number of zeros (with multiplicity) of g inside the circle, from the
/// accumulated change of arg g along an adaptively refined contour.
int winding_number(const AnalyticFunction& g, cplx center, double radius);

/// All zeros of g strictly inside |z| < 1 - policy.contour_epsilon, counted
/// with multiplicity. The count is certified by the argument principle and
/// must equal `expected_count`; each root satisfies |g| < policy.root_residual.
std::vector<cplx> unit_disk_roots(const AnalyticFunction& g, int expected_count,
                                  const NumericPolicy& policy = {});

}  // namespace gapq
