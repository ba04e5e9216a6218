#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dunkl/hermite.hpp"
#include "dunkl/params.hpp"
#include "dunkl/quadrature.hpp"

namespace dunkl {

/// P = H - 2 c1 x^{-1} d/dx + c2 x^{-2} on the half-line, H = -d^2/dx^2 + s^2 x^2.
template <typename Scalar = double>
struct PowerLawProblem {
  Scalar c1;
  Scalar c2;
  Scalar s;
};

/// A real root a of a^2 + (2c1 - 1)a - c2 = 0 with sigma = a + c1.
template <typename Scalar = double>
struct ExtensionRoot {
  Scalar a;
  Scalar sigma;
  bool admissible;  // sigma > -1/2
};

/// Self-adjoint realization of P obtained by conjugating the even Dunkl
/// oscillator with h = x^a; Hilbert space L^2(R_+, x^{2 c1} dx).
template <typename Scalar = double>
struct HalfLineExtension {
  Scalar a;
  Scalar c1;
  Scalar c2;
  SigmaParams<Scalar> params;

  Scalar sigma() const { return params.sigma(); }
  Scalar h_exponent() const { return a; }
  Scalar weight_exponent() const { return 2 * c1; }

  /// (4k+1+2 sigma)s
  Scalar eigenvalue(std::size_t k) const { return params.eigenvalue(2 * k); }

  Scalar h(Scalar x) const { return std::pow(x, a); }
};

/// All real roots (double roots once), ascending, with their admissibility.
template <typename Scalar>
std::vector<ExtensionRoot<Scalar>> extension_roots(const PowerLawProblem<Scalar>& prob) {
  using std::abs;
  using std::sqrt;
  if (!(prob.s > 0)) throw ValidationError("power-law problem: s must be > 0");
  const Scalar b = 2 * prob.c1 - 1;
  const Scalar disc = b * b + 4 * prob.c2;
  std::vector<Scalar> roots;
  if (disc < 0) return {};
  if (disc == 0) {
    roots.push_back(-b / 2);
  } else {
    // numerically stable pair
    const Scalar q = -(b + (b >= 0 ? sqrt(disc) : -sqrt(disc))) / 2;
    roots.push_back(q);
    roots.push_back(q != Scalar(0) ? -prob.c2 / q : Scalar(0));
  }
  std::sort(roots.begin(), roots.end());
  if (roots.size() == 2 && abs(roots[1] - roots[0]) <= Scalar(1e-10)) {
    const Scalar a = (roots[0] + roots[1]) / 2;
    roots = {a};
  }
  std::vector<ExtensionRoot<Scalar>> out;
  for (Scalar a : roots) {
    const Scalar sigma = a + prob.c1;
    out.push_back({a + Scalar(0), sigma + Scalar(0), sigma > Scalar(kSigmaFloor)});
  }
  return out;
}

/// Admissible extensions (0, 1 or 2), sorted by a. An empty list means the
/// construction yields no self-adjoint realization; it is not an error.
template <typename Scalar>
std::vector<HalfLineExtension<Scalar>> extensions(const PowerLawProblem<Scalar>& prob) {
  std::vector<HalfLineExtension<Scalar>> out;
  for (const auto& r : extension_roots(prob))
    if (r.admissible) out.push_back({r.a, prob.c1, prob.c2, SigmaParams<Scalar>(r.sigma, prob.s)});
  return out;
}

/// (lambda_k, sqrt(2) x^a phi_{2k}(x)) for x > 0.
template <typename Scalar>
std::pair<Scalar, Scalar> eigenpair(const HalfLineExtension<Scalar>& ext, std::size_t k, Scalar x) {
  using std::sqrt;
  if (!(x > 0)) throw ValidationError("eigenpair: x must be > 0");
  return {ext.eigenvalue(k), sqrt(Scalar(2)) * ext.h(x) * eval_phi(2 * k, x, ext.params)};
}

/// Apply the differential expression P to a smooth u at x by centered
/// differences (step `step`).
template <typename Scalar, typename U>
Scalar apply_P_fd(const HalfLineExtension<Scalar>& ext, U&& u, Scalar x, Scalar step) {
  const Scalar s = ext.params.s();
  const Scalar up2 = u(x + 2 * step), up1 = u(x + step), u0 = u(x), um1 = u(x - step), um2 = u(x - 2 * step);
  const Scalar d1 = (-up2 + 8 * up1 - 8 * um1 + um2) / (12 * step);
  const Scalar d2 = (-up2 + 16 * up1 - 30 * u0 + 16 * um1 - um2) / (12 * step * step);
  return -d2 + s * s * x * x * u0 - 2 * ext.c1 / x * d1 + ext.c2 / (x * x) * u0;
}

/// u = h sum_k u_k sqrt(2) phi_{2k}: the spectral solution of (P - shift)u = g.
template <typename Scalar = double>
struct HalfLineSolution {
  HalfLineExtension<Scalar> ext;
  Vector<Scalar> data_coeffs;  // d_k of g/h in the basis sqrt(2) phi_{2k}
  Vector<Scalar> coeffs;       // u_k = d_k/(lambda_k - shift)
  Scalar shift;
  bool slow_decay = false;  // |d_K| > 1e-6 max|d|

  Scalar operator()(Scalar x) const {
    using std::sqrt;
    const auto K = static_cast<std::size_t>(coeffs.size() - 1);
    const Vector<Scalar> phi = eval_phi_all(2 * K, x, ext.params);
    Scalar acc(0);
    for (std::size_t k = 0; k <= K; ++k) acc += coeffs(static_cast<Eigen::Index>(k)) * phi(static_cast<Eigen::Index>(2 * k));
    return ext.h(x) * sqrt(Scalar(2)) * acc;
  }

  GridFunction<Scalar> on(const std::vector<Scalar>& nodes) const {
    GridFunction<Scalar> g{nodes, std::vector<Scalar>(nodes.size()), std::nullopt};
    for (std::size_t i = 0; i < nodes.size(); ++i) g.values[i] = (*this)(nodes[i]);
    return g;
  }
};

namespace detail {

template <typename Scalar>
void check_shift(const HalfLineExtension<Scalar>& ext, Scalar shift) {
  using std::abs;
  using std::round;
  const Scalar t = (shift / ext.params.s() - 1 - 2 * ext.sigma()) / 4;
  if (t > Scalar(-0.5)) {
    const Scalar kk = std::max(Scalar(0), round(t));
    const Scalar lam = ext.eigenvalue(static_cast<std::size_t>(kk));
    if (abs(shift - lam) <= Scalar(1e-12) * std::max(Scalar(1), abs(lam)))
      throw ValidationError("solve: shift lies on the spectrum (lambda_" +
                            std::to_string(static_cast<long>(kk)) + ")");
  }
}

template <typename Scalar>
HalfLineSolution<Scalar> finish(const HalfLineExtension<Scalar>& ext, Vector<Scalar> d, Scalar shift) {
  HalfLineSolution<Scalar> sol{ext, d, d, shift};
  for (Eigen::Index k = 0; k < d.size(); ++k)
    sol.coeffs(k) = d(k) / (ext.eigenvalue(static_cast<std::size_t>(k)) - shift);
  sol.slow_decay = edge_exceeds(d, Scalar(1e-6));
  return sol;
}

}  // namespace detail

/// Spectral resolvent for a callable right-hand side g on (0, inf). The
/// coefficients of g/h come from the folded full-line rule
///   d_k = 2^{-1/2} sum_i w_i phi_{2k}(x_i) (g/h)(|x_i|),
/// using an even node count so that x = 0 is never sampled.
template <typename Scalar, std::invocable<Scalar> G>
HalfLineSolution<Scalar> solve(const HalfLineExtension<Scalar>& ext, G&& g, std::size_t K, Scalar shift,
                               std::size_t N = 0) {
  using std::abs;
  using std::sqrt;
  detail::check_shift(ext, shift);
  if (N == 0) N = default_node_count(2 * K, ext.params);
  if (N % 2 == 1) ++N;
  const auto rule = build_rule(N, ext.params);
  Vector<Scalar> d = Vector<Scalar>::Zero(static_cast<Eigen::Index>(K + 1));
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const Scalar x = abs(rule.nodes[i]);
    const Scalar gh = g(x) / ext.h(x);
    const Vector<Scalar> phi = eval_phi_all(2 * K, x, ext.params);
    for (std::size_t k = 0; k <= K; ++k)
      d(static_cast<Eigen::Index>(k)) += rule.phi_weights[i] * phi(static_cast<Eigen::Index>(2 * k)) * gh;
  }
  d /= sqrt(Scalar(2));
  return detail::finish(ext, std::move(d), shift);
}

/// Spectral resolvent for samples of g at positive nodes (least-squares fit
/// of g/h on sqrt(2) phi_{2k}, k <= K).
template <typename Scalar>
HalfLineSolution<Scalar> solve(const HalfLineExtension<Scalar>& ext, const GridFunction<Scalar>& g,
                               std::size_t K, Scalar shift) {
  using std::sqrt;
  g.validate();
  detail::check_shift(ext, shift);
  if (g.size() <= K) throw ValidationError("solve: need more than K+1 samples");
  const auto n = static_cast<Eigen::Index>(g.size());
  Matrix<Scalar> A(n, static_cast<Eigen::Index>(K + 1));
  Vector<Scalar> rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Scalar x = g.nodes[static_cast<std::size_t>(i)];
    if (!(x > 0)) throw ValidationError("solve: grid nodes must lie in (0, inf)");
    const Vector<Scalar> phi = eval_phi_all(2 * K, x, ext.params);
    for (std::size_t k = 0; k <= K; ++k)
      A(i, static_cast<Eigen::Index>(k)) = sqrt(Scalar(2)) * phi(static_cast<Eigen::Index>(2 * k));
    rhs(i) = g.values[static_cast<std::size_t>(i)] / ext.h(x);
  }
  Vector<Scalar> d = A.colPivHouseholderQr().solve(rhs);
  return detail::finish(ext, std::move(d), shift);
}

/// Open interval (lo, hi) of the half-line; hi may be +inf.
template <typename Scalar = double>
struct Interval {
  Scalar lo;
  Scalar hi;
  bool contains(Scalar x) const { return x > lo && x < hi; }
};

/// P = H - 2 f1 d/dx + f2 with a candidate sigma. F1 is a primitive of f1;
/// U is a finite union of open intervals of full measure in (0, inf).
template <typename Scalar = double>
struct GeneralProblem {
  std::function<Scalar(Scalar)> f1;
  std::function<Scalar(Scalar)> F1;
  std::function<Scalar(Scalar)> f2;
  Scalar sigma;
  std::vector<Interval<Scalar>> U{{Scalar(0), std::numeric_limits<Scalar>::infinity()}};

  /// h = x^sigma e^{-F1}
  Scalar h(Scalar x) const { return std::pow(x, sigma) * std::exp(-F1(x)); }
};

template <typename Scalar = double>
struct ResidualReport {
  Scalar max_residual = 0;         // max |f2 - (sigma(sigma-1)/x^2 - f1^2 - f1')|
  Scalar max_scaled_residual = 0;  // residual / local scale
  Scalar worst_point = 0;
  bool accepted = false;
};

/// Checks f2 = sigma(sigma-1)x^{-2} - f1^2 - f1' at the sample points, with
/// f1' by fourth-order centered differences. Accepted iff every residual is
/// at most 1e-6 times the local scale max(1, |terms|).
template <typename Scalar>
ResidualReport<Scalar> validate_general(const GeneralProblem<Scalar>& prob,
                                        const std::vector<Scalar>& points) {
  using std::abs;
  if (!(prob.sigma > Scalar(kSigmaFloor))) throw ValidationError("validate_general: sigma must exceed -1/2");
  ResidualReport<Scalar> rep;
  for (Scalar x : points) {
    const bool inside = std::any_of(prob.U.begin(), prob.U.end(), [&](const auto& I) { return I.contains(x); });
    if (!inside) throw ValidationError("validate_general: sample point outside U");
    const Scalar h = Scalar(1e-3) * std::max(Scalar(1e-3), std::min(Scalar(1), x / 4));
    const Scalar df1 = (-prob.f1(x + 2 * h) + 8 * prob.f1(x + h) - 8 * prob.f1(x - h) + prob.f1(x - 2 * h)) / (12 * h);
    const Scalar f1 = prob.f1(x);
    const Scalar lead = prob.sigma * (prob.sigma - 1) / (x * x);
    const Scalar f2 = prob.f2(x);
    const Scalar r = abs(f2 - (lead - f1 * f1 - df1));
    const Scalar scale = std::max({Scalar(1), abs(lead), f1 * f1, abs(df1), abs(f2)});
    if (r > rep.max_residual) rep.max_residual = r;
    if (r / scale > rep.max_scaled_residual) {
      rep.max_scaled_residual = r / scale;
      rep.worst_point = x;
    }
  }
  rep.accepted = rep.max_scaled_residual <= Scalar(1e-6);
  return rep;
}

}  // namespace dunkl
