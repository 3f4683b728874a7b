#include "gapq/numerics/roots.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "gapq/error.hpp"

namespace gapq {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kMaxMomentRoots = 6;

struct Eval {
  cplx value;
  cplx derivative;
};

Eval evaluate(const AnalyticFunction& g, cplx z) {
  const Jet<cplx> r = g(Jet<cplx>::variable(z, 1));
  if (!is_finite(r[0]) || !is_finite(r[1])) throw NumericalError("analytic function returned a non-finite value");
  return {r[0], r[1]};
}

// A piece of a closed contour, parametrized on t in [0, 1].
struct PathPiece {
  std::function<cplx(double)> point;
  std::function<cplx(double)> tangent;
};

struct Sample {
  double t;
  cplx z;
  Eval e;
};

Sample sample(const AnalyticFunction& g, const PathPiece& piece, double t) {
  const cplx z = piece.point(t);
  const Eval e = evaluate(g, z);
  if (e.value == cplx{}) throw NumericalError("zero of the function lies on the counting contour");
  return {t, z, e};
}

double log_rate(const PathPiece& piece, const Sample& s) {
  return std::abs(s.e.derivative * piece.tangent(s.t) / s.e.value);
}

double arg_change(const AnalyticFunction& g, const PathPiece& piece, const Sample& a, const Sample& b,
                  int depth) {
  const double d_arg = std::arg(b.e.value / a.e.value);
  const double bound = (b.t - a.t) * std::max(log_rate(piece, a), log_rate(piece, b));
  if (std::abs(d_arg) < 0.4 && bound < 0.4) return d_arg;
  if (depth > 64) throw NumericalError("argument-principle refinement failed: zero too close to the contour");
  const Sample mid = sample(g, piece, 0.5 * (a.t + b.t));
  return arg_change(g, piece, a, mid, depth + 1) + arg_change(g, piece, mid, b, depth + 1);
}

int winding(const AnalyticFunction& g, const std::vector<PathPiece>& contour) {
  constexpr int kInitialSegments = 64;
  double total = 0.0;
  for (const auto& piece : contour) {
    Sample prev = sample(g, piece, 0.0);
    for (int k = 1; k <= kInitialSegments; ++k) {
      const Sample next = sample(g, piece, static_cast<double>(k) / kInitialSegments);
      total += arg_change(g, piece, prev, next, 0);
      prev = next;
    }
  }
  const double turns = total / kTwoPi;
  const double rounded = std::round(turns);
  if (std::abs(turns - rounded) > 1e-3) throw NumericalError("argument-principle integral is not an integer");
  return static_cast<int>(rounded);
}

std::vector<PathPiece> circle(cplx center, double radius) {
  return {PathPiece{
      [=](double t) { return center + std::polar(radius, kTwoPi * t); },
      [=](double t) { return cplx{0.0, kTwoPi} * std::polar(radius, kTwoPi * t); },
  }};
}

// Polar rectangle {r0 <= |z| <= r1, th0 <= arg z <= th1}, counter-clockwise.
struct PolarRect {
  double r0, r1, th0, th1;
  cplx centroid() const { return std::polar(0.5 * (r0 + r1), 0.5 * (th0 + th1)); }
  double diameter() const { return std::max(r1 - r0, r1 * (th1 - th0)); }
  bool contains(cplx z) const {
    const double r = std::abs(z);
    double th = std::arg(z);
    while (th < th0) th += kTwoPi;
    while (th >= th0 + kTwoPi) th -= kTwoPi;
    return r > r0 && r < r1 && th > th0 && th < th1;
  }
};

std::vector<PathPiece> boundary(const PolarRect& p) {
  const double dth = p.th1 - p.th0;
  const double dr = p.r1 - p.r0;
  return {
      PathPiece{[=](double t) { return std::polar(p.r0 + dr * t, p.th0); },
                [=](double) { return std::polar(dr, p.th0); }},
      PathPiece{[=](double t) { return std::polar(p.r1, p.th0 + dth * t); },
                [=](double t) { return cplx{0.0, dth} * std::polar(p.r1, p.th0 + dth * t); }},
      PathPiece{[=](double t) { return std::polar(p.r1 - dr * t, p.th1); },
                [=](double) { return -std::polar(dr, p.th1); }},
      PathPiece{[=](double t) { return std::polar(p.r0, p.th1 - dth * t); },
                [=](double t) { return cplx{0.0, -dth} * std::polar(p.r0, p.th1 - dth * t); }},
  };
}

// Power sums sum_k w_k^p (w = (z - c)/r) of the zeros inside the circle,
// by the trapezoidal rule with doubling until converged. Nodes sit at half
// steps so none lands on the positive real axis, where callers often divide
// out a known zero just outside the contour.
std::optional<std::vector<cplx>> power_sums(const AnalyticFunction& g, cplx c, double r, int n) {
  std::vector<cplx> previous;
  for (int m = 64; m <= (1 << 16); m *= 2) {
    std::vector<cplx> s(n + 1, cplx{});
    for (int j = 0; j < m; ++j) {
      const cplx w = std::polar(1.0, kTwoPi * (j + 0.5) / m);
      const cplx z = c + r * w;
      const Eval e = evaluate(g, z);
      const cplx weight = e.derivative / e.value * (r * w);
      cplx wp{1.0, 0.0};
      for (int p = 0; p <= n; ++p) {
        s[p] += wp * weight;
        wp *= w;
      }
    }
    for (auto& x : s) x /= static_cast<double>(m);
    if (!previous.empty()) {
      bool converged = true;
      for (int p = 0; p <= n; ++p)
        if (std::abs(s[p] - previous[p]) > 1e-12 * std::max(1.0, std::abs(s[p]))) converged = false;
      if (converged) return s;
    }
    previous = std::move(s);
  }
  return std::nullopt;
}

// Zeros of the monic polynomial with the given power sums (Newton's
// identities, then Aberth-Ehrlich iteration).
std::vector<cplx> roots_from_power_sums(const std::vector<cplx>& s, int n) {
  std::vector<cplx> e(n + 1, cplx{});
  e[0] = 1.0;
  for (int k = 1; k <= n; ++k) {
    cplx acc{};
    for (int i = 1; i <= k; ++i) acc += ((i % 2 == 1) ? 1.0 : -1.0) * e[k - i] * s[i];
    e[k] = acc / static_cast<double>(k);
  }
  // p(w) = sum_k (-1)^k e_k w^{n-k}
  std::vector<cplx> coef(n + 1);
  for (int k = 0; k <= n; ++k) coef[k] = ((k % 2 == 0) ? 1.0 : -1.0) * e[k];
  auto eval = [&](cplx w, cplx& dp) {
    cplx p = coef[0];
    dp = 0.0;
    for (int k = 1; k <= n; ++k) {
      dp = dp * w + p;
      p = p * w + coef[k];
    }
    return p;
  };
  std::vector<cplx> w(n);
  for (int k = 0; k < n; ++k) w[k] = std::polar(0.4, kTwoPi * (k + 0.25) / n);
  for (int it = 0; it < 500; ++it) {
    double biggest = 0.0;
    for (int i = 0; i < n; ++i) {
      cplx dp;
      const cplx p = eval(w[i], dp);
      if (p == cplx{}) continue;
      const cplx ratio = p / dp;
      cplx repulsion{};
      for (int j = 0; j < n; ++j)
        if (j != i && w[i] != w[j]) repulsion += 1.0 / (w[i] - w[j]);
      const cplx step = ratio / (1.0 - ratio * repulsion);
      if (!is_finite(step)) continue;
      w[i] -= step;
      biggest = std::max(biggest, std::abs(step));
    }
    if (biggest < 1e-15) break;
  }
  return w;
}

struct Cluster {
  cplx z;
  int multiplicity;
};

// Multiplicity-aware Newton polish; nullopt if it leaves `limit` or stalls.
std::optional<cplx> polish(const AnalyticFunction& g, cplx z, int multiplicity, double limit,
                           const NumericPolicy& policy) {
  for (int it = 0; it < 200; ++it) {
    const Eval e = evaluate(g, z);
    if (e.value == cplx{}) break;
    if (e.derivative == cplx{}) return std::nullopt;
    const cplx step = static_cast<double>(multiplicity) * e.value / e.derivative;
    z -= step;
    if (!(std::abs(z) < limit)) return std::nullopt;
    if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) break;
  }
  if (std::abs(evaluate(g, z).value) >= policy.root_residual) return std::nullopt;
  return z;
}

// Groups nearby approximations, polishes each group and certifies its
// multiplicity with a small counting circle.
std::optional<std::vector<Cluster>> polish_and_certify(const AnalyticFunction& g, const std::vector<cplx>& approx,
                                                       double cluster_radius, double limit,
                                                       const NumericPolicy& policy) {
  std::vector<Cluster> clusters;
  std::vector<bool> used(approx.size(), false);
  for (std::size_t i = 0; i < approx.size(); ++i) {
    if (used[i]) continue;
    cplx sum = approx[i];
    int m = 1;
    used[i] = true;
    for (std::size_t j = i + 1; j < approx.size(); ++j)
      if (!used[j] && std::abs(approx[j] - approx[i]) < cluster_radius) {
        used[j] = true;
        sum += approx[j];
        ++m;
      }
    const auto z = polish(g, sum / static_cast<double>(m), m, limit, policy);
    if (!z) return std::nullopt;
    clusters.push_back({*z, m});
  }
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    double radius = std::min(1e-2, 0.5 * (limit - std::abs(clusters[i].z)));
    for (std::size_t j = 0; j < clusters.size(); ++j)
      if (j != i) radius = std::min(radius, 0.25 * std::abs(clusters[i].z - clusters[j].z));
    if (!(radius > 1e-12)) return std::nullopt;
    try {
      if (winding(g, circle(clusters[i].z, radius)) != clusters[i].multiplicity) return std::nullopt;
    } catch (const NumericalError&) {
      return std::nullopt;
    }
  }
  return clusters;
}

std::optional<std::vector<cplx>> moment_method(const AnalyticFunction& g, cplx center, double radius, int count,
                                               double limit, const NumericPolicy& policy) {
  if (count == 0) return std::vector<cplx>{};
  if (count > kMaxMomentRoots) return std::nullopt;
  const auto sums = power_sums(g, center, radius, count);
  if (!sums) return std::nullopt;
  std::vector<cplx> approx;
  for (const cplx& w : roots_from_power_sums(*sums, count)) approx.push_back(center + radius * w);
  const auto clusters = polish_and_certify(g, approx, 1e-3 * radius, limit, policy);
  if (!clusters) return std::nullopt;
  std::vector<cplx> roots;
  for (const auto& c : *clusters) {
    if (std::abs(c.z - center) >= radius) return std::nullopt;
    roots.insert(roots.end(), c.multiplicity, c.z);
  }
  if (static_cast<int>(roots.size()) != count) return std::nullopt;
  return roots;
}

class Subdivider {
 public:
  Subdivider(const AnalyticFunction& g, double limit, const NumericPolicy& policy)
      : g_(g), limit_(limit), policy_(policy) {}

  std::vector<cplx> run(double outer_radius) {
    std::vector<cplx> roots;
    central(0.25 * outer_radius, roots, 0);
    const double offset = 0.1234;
    for (int k = 0; k < 4; ++k) {
      const PolarRect p{0.25 * outer_radius, outer_radius, offset + k * kTwoPi / 4, offset + (k + 1) * kTwoPi / 4};
      rect(p, winding(g_, boundary(p)), roots, 0);
    }
    return roots;
  }

 private:
  void central(double radius, std::vector<cplx>& roots, int depth) {
    const int count = winding(g_, circle({}, radius));
    if (count == 0) return;
    if (auto found = moment_method(g_, {}, radius, count, limit_, policy_)) {
      roots.insert(roots.end(), found->begin(), found->end());
      return;
    }
    if (depth > policy_.max_subdivision_depth) throw NumericalError("root subdivision depth exceeded");
    central(0.5 * radius, roots, depth + 1);
    const double offset = 0.0731 * (depth + 1);
    for (int k = 0; k < 4; ++k) {
      const PolarRect p{0.5 * radius, radius, offset + k * kTwoPi / 4, offset + (k + 1) * kTwoPi / 4};
      rect(p, winding(g_, boundary(p)), roots, depth + 1);
    }
  }

  void rect(const PolarRect& p, int count, std::vector<cplx>& roots, int depth) {
    if (count == 0) return;
    if (count < 0) throw NumericalError("negative root count in subdivision");
    if (count == 1) {
      if (auto z = polish(g_, p.centroid(), 1, limit_, policy_); z && p.contains(*z)) {
        roots.push_back(*z);
        return;
      }
    }
    if (p.diameter() < 1e-10) {
      const auto z = polish(g_, p.centroid(), count, limit_, policy_);
      roots.insert(roots.end(), count, z.value_or(p.centroid()));
      return;
    }
    if (depth > policy_.max_subdivision_depth) throw NumericalError("root subdivision depth exceeded");
    const double rm = p.r0 + 0.4871 * (p.r1 - p.r0);
    const double tm = p.th0 + 0.5129 * (p.th1 - p.th0);
    const PolarRect kids[4] = {{p.r0, rm, p.th0, tm}, {rm, p.r1, p.th0, tm}, {p.r0, rm, tm, p.th1}, {rm, p.r1, tm, p.th1}};
    int counts[4];
    int total = 0;
    for (int k = 0; k < 4; ++k) total += counts[k] = winding(g_, boundary(kids[k]));
    if (total != count) throw NumericalError("subdivision counts do not add up");
    for (int k = 0; k < 4; ++k) rect(kids[k], counts[k], roots, depth + 1);
  }

  const AnalyticFunction& g_;
  double limit_;
  const NumericPolicy& policy_;
};

}  // namespace

int winding_number(const AnalyticFunction& g, cplx center, double radius) {
  return winding(g, circle(center, radius));
}

std::vector<cplx> unit_disk_roots(const AnalyticFunction& g, int expected_count, const NumericPolicy& policy) {
  const double radius = 1.0 - policy.contour_epsilon;
  const int count = winding_number(g, {}, radius);
  if (count != expected_count)
    throw NumericalError("root count mismatch: expected " + std::to_string(expected_count) +
                         " zeros inside the unit disk, argument principle gives " + std::to_string(count));
  if (count == 0) return {};
  std::vector<cplx> roots;
  if (!policy.force_subdivision) {
    if (auto found = moment_method(g, {}, radius, count, radius, policy)) roots = std::move(*found);
  }
  if (roots.empty()) roots = Subdivider(g, radius, policy).run(radius);
  if (static_cast<int>(roots.size()) != count)
    throw NumericalError("root finder located " + std::to_string(roots.size()) + " of " + std::to_string(count) +
                         " zeros");
  for (const cplx& z : roots)
    if (!(std::abs(evaluate(g, z).value) < policy.root_residual))
      throw NumericalError("polished root residual exceeds tolerance");
  std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return roots;
}

}  // namespace gapq
