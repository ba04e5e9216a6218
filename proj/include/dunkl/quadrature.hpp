#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "dunkl/hermite.hpp"
#include "dunkl/params.hpp"

namespace dunkl {

/// Total mass of e^{-s x^2}|x|^{2 sigma}dx, that is s^{-sigma-1/2} Gamma(sigma+1/2).
template <typename Scalar>
Scalar total_mass(const SigmaParams<Scalar>& p) {
  using std::exp;
  using std::lgamma;
  using std::log;
  return exp(lgamma(p.sigma() + Scalar(0.5)) - (p.sigma() + Scalar(0.5)) * log(p.s()));
}

/// N-point Gauss rule for e^{-s x^2}|x|^{2 sigma}dx.
///
/// `weights` integrate q(x) against the measure; `phi_weights` = weights *
/// e^{s x^2} integrate products of Hermite functions against |x|^{2 sigma}dx.
/// The latter stay O(1) at the outer nodes where the former underflow.
template <typename Scalar = double>
struct QuadratureRule {
  std::vector<Scalar> nodes;
  std::vector<Scalar> weights;
  std::vector<Scalar> phi_weights;
  std::size_t exact_degree = 0;
  SigmaParams<Scalar> params;

  std::size_t size() const { return nodes.size(); }
};

/// Off-diagonal entries of the Jacobi matrix. Rearranging the three-term
/// recurrence gives
///   x p_{k-1} = b_k p_k + b_{k-1} p_{k-2},
/// with b_j = sqrt(j/(2s)) for even j and sqrt((j+2 sigma)/(2s)) for odd j.
/// The diagonal vanishes because the measure is even.
template <typename Scalar>
Scalar jacobi_offdiag(std::size_t j, const SigmaParams<Scalar>& p) {
  using std::sqrt;
  const Scalar num = (j % 2 == 0) ? Scalar(j) : Scalar(j) + 2 * p.sigma();
  return sqrt(num / (2 * p.s()));
}

/// Golub-Welsch nodes, Newton-polished on p_N, with weights from the
/// Christoffel function 1/sum_k p_k(x_i)^2 (accurate in the relative sense
/// even where the eigenvector route loses all digits).
template <typename Scalar>
QuadratureRule<Scalar> build_rule(std::size_t N, const SigmaParams<Scalar>& p) {
  using std::abs;
  using std::exp;
  if (N == 0) throw ValidationError("build_rule: N must be at least 1");
  if (p.sigma() < 0 && N % 2 == 1)
    throw ValidationError("build_rule: N must be even when sigma < 0 (x = 0 is singular)");

  const auto n = static_cast<Eigen::Index>(N);
  Vector<Scalar> diag = Vector<Scalar>::Zero(n);
  Vector<Scalar> sub(std::max<Eigen::Index>(n - 1, 1));
  for (Eigen::Index j = 1; j < n; ++j) sub(j - 1) = jacobi_offdiag(static_cast<std::size_t>(j), p);

  std::vector<Scalar> x(N);
  if (N == 1) {
    x[0] = Scalar(0);
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver;
    solver.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
      throw NumericalError("build_rule: tridiagonal eigensolve did not converge");
    for (std::size_t i = 0; i < N; ++i) x[i] = solver.eigenvalues()(static_cast<Eigen::Index>(i));
  }

  // One Newton step on phi_N (same zeros as p_N). The derivative recurrence
  // shares the scaling of the value recurrence, so only the ratio is formed.
  for (auto& xi : x) {
    if (xi == Scalar(0)) continue;
    std::vector<Scalar> q(N + 1), dq(N + 1);
    const Scalar root2s = std::sqrt(2 * p.s());
    q[0] = Scalar(1);
    dq[0] = Scalar(0);
    for (std::size_t k = 1; k <= N; ++k) {
      const Scalar qm2 = k >= 2 ? q[k - 2] : Scalar(0);
      const Scalar dqm2 = k >= 2 ? dq[k - 2] : Scalar(0);
      const Scalar a = (k % 2 == 0) ? std::sqrt(Scalar(k - 1) + 2 * p.sigma()) : std::sqrt(Scalar(k - 1));
      const Scalar d = (k % 2 == 0) ? std::sqrt(Scalar(k)) : std::sqrt(Scalar(k) + 2 * p.sigma());
      q[k] = (root2s * xi * q[k - 1] - a * qm2) / d;
      dq[k] = (root2s * (q[k - 1] + xi * dq[k - 1]) - a * dqm2) / d;
      const Scalar mag = std::max(abs(q[k]), abs(q[k - 1]));
      if (mag > Scalar(1e100)) {
        for (std::size_t j = 0; j <= k; ++j) {
          q[j] /= Scalar(1e100);
          dq[j] /= Scalar(1e100);
        }
      }
    }
    if (dq[N] != Scalar(0)) {
      const Scalar step = q[N] / dq[N];
      if (abs(step) < Scalar(1e-6) * (1 + abs(xi))) xi -= step;
    }
  }

  // Enforce exact symmetry of the nodes about 0.
  std::sort(x.begin(), x.end());
  for (std::size_t i = 0; i < N / 2; ++i) {
    const Scalar m = (x[N - 1 - i] - x[i]) / 2;
    x[i] = -m;
    x[N - 1 - i] = m;
  }
  if (N % 2 == 1) x[N / 2] = Scalar(0);

  QuadratureRule<Scalar> rule{x, std::vector<Scalar>(N), std::vector<Scalar>(N), 2 * N - 1, p};
  for (std::size_t i = 0; i < N; ++i) {
    const Vector<Scalar> phi = eval_phi_all(N - 1, x[i], p);
    rule.phi_weights[i] = Scalar(1) / phi.squaredNorm();
    rule.weights[i] = rule.phi_weights[i] * exp(-p.s() * x[i] * x[i]);
  }
  for (std::size_t i = 0; i < N / 2; ++i) {
    const Scalar w = (rule.phi_weights[i] + rule.phi_weights[N - 1 - i]) / 2;
    const Scalar v = (rule.weights[i] + rule.weights[N - 1 - i]) / 2;
    rule.phi_weights[i] = rule.phi_weights[N - 1 - i] = w;
    rule.weights[i] = rule.weights[N - 1 - i] = v;
  }
  return rule;
}

/// Truncated eigen-coefficient sequence c_0..c_K of a function in the
/// basis phi_k for the given (sigma, s).
template <typename Scalar = double>
struct CoeffVector {
  Vector<Scalar> coeffs;
  SigmaParams<Scalar> params;
  std::optional<Parity> parity;  // nullopt: mixed
  bool truncation_warning = false;

  CoeffVector(Vector<Scalar> c, SigmaParams<Scalar> p, std::optional<Parity> par = std::nullopt)
      : coeffs(std::move(c)), params(p), parity(par) {
    if (coeffs.size() == 0) throw ValidationError("CoeffVector needs at least one coefficient");
  }

  static CoeffVector zero(std::size_t K, SigmaParams<Scalar> p) {
    return CoeffVector(Vector<Scalar>::Zero(static_cast<Eigen::Index>(K + 1)), p);
  }

  static CoeffVector unit(std::size_t k, std::size_t K, SigmaParams<Scalar> p) {
    Vector<Scalar> c = Vector<Scalar>::Zero(static_cast<Eigen::Index>(std::max(k, K) + 1));
    c(static_cast<Eigen::Index>(k)) = Scalar(1);
    return CoeffVector(std::move(c), p, parity_of(k));
  }

  /// Truncation order K (index of the last coefficient).
  std::size_t order() const { return static_cast<std::size_t>(coeffs.size() - 1); }

  Scalar operator[](std::size_t k) const { return coeffs(static_cast<Eigen::Index>(k)); }

  Scalar max_abs() const { return coeffs.cwiseAbs().maxCoeff(); }
};

/// Zero-pad (or cut) to truncation order K.
template <typename Scalar>
CoeffVector<Scalar> resized(const CoeffVector<Scalar>& c, std::size_t K) {
  Vector<Scalar> v = Vector<Scalar>::Zero(static_cast<Eigen::Index>(K + 1));
  const auto n = std::min<Eigen::Index>(v.size(), c.coeffs.size());
  v.head(n) = c.coeffs.head(n);
  CoeffVector<Scalar> out(std::move(v), c.params, c.parity);
  out.truncation_warning = c.truncation_warning;
  return out;
}

/// Keep only the coefficients of the given parity.
template <typename Scalar>
CoeffVector<Scalar> project(const CoeffVector<Scalar>& c, Parity parity) {
  CoeffVector<Scalar> out = c;
  for (Eigen::Index k = 0; k < out.coeffs.size(); ++k)
    if (parity_of(static_cast<std::size_t>(k)) != parity) out.coeffs(k) = Scalar(0);
  out.parity = parity;
  return out;
}

/// Record a definite parity when all coefficients of the other parity are
/// below `rel_tol * max|c|`; those coefficients are then set to zero.
template <typename Scalar>
void detect_parity(CoeffVector<Scalar>& c, Scalar rel_tol = Scalar(1e-13)) {
  using std::abs;
  const Scalar cutoff = rel_tol * c.max_abs();
  Scalar even_max(0), odd_max(0);
  for (Eigen::Index k = 0; k < c.coeffs.size(); ++k) {
    Scalar& m = (k % 2 == 0) ? even_max : odd_max;
    m = std::max(m, abs(c.coeffs(k)));
  }
  if (odd_max <= cutoff && even_max > cutoff)
    c = project(c, Parity::even);
  else if (even_max <= cutoff && odd_max > cutoff)
    c = project(c, Parity::odd);
  else
    c.parity = std::nullopt;
}

/// Default node count for analyze: max(K + 8, ceil(1.5 K)), rounded up to
/// even when sigma < 0.
template <typename Scalar>
std::size_t default_node_count(std::size_t K, const SigmaParams<Scalar>& p) {
  std::size_t N = std::max(K + 8, (3 * K + 1) / 2);
  if (p.sigma() < 0 && N % 2 == 1) ++N;
  return N;
}

/// Truncation edge check shared by analyze and the banded operators.
template <typename Scalar>
bool edge_exceeds(const Vector<Scalar>& c, Scalar rel_tol) {
  using std::abs;
  const Scalar m = c.cwiseAbs().maxCoeff();
  return m > Scalar(0) && abs(c(c.size() - 1)) > rel_tol * m;
}

/// c_k = <phi_k, f>_sigma, k = 0..K, by the given rule (needs rule.size() > K).
template <typename Scalar, std::invocable<Scalar> F>
CoeffVector<Scalar> analyze(F&& f, std::size_t K, const QuadratureRule<Scalar>& rule) {
  if (rule.size() <= K) throw ValidationError("analyze: rule has too few nodes for order K");
  Vector<Scalar> c = Vector<Scalar>::Zero(static_cast<Eigen::Index>(K + 1));
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const Scalar fx = f(rule.nodes[i]);
    if (fx == Scalar(0)) continue;
    c += (rule.phi_weights[i] * fx) * eval_phi_all(K, rule.nodes[i], rule.params);
  }
  CoeffVector<Scalar> out(std::move(c), rule.params);
  detect_parity(out);
  out.truncation_warning = edge_exceeds(out.coeffs, Scalar(1e-8));
  return out;
}

/// analyze with a freshly built rule of `N` nodes (0 selects the default count).
template <typename Scalar, std::invocable<Scalar> F>
CoeffVector<Scalar> analyze(F&& f, std::size_t K, const SigmaParams<Scalar>& p, std::size_t N = 0) {
  const auto rule = build_rule(N == 0 ? default_node_count(K, p) : N, p);
  return analyze(std::forward<F>(f), K, rule);
}

/// Reflect a parity-tagged half-grid onto the full line, dropping duplicates.
template <typename Scalar>
GridFunction<Scalar> unfold(const GridFunction<Scalar>& g) {
  g.validate();
  if (!g.parity) return g;
  const Scalar sign = (*g.parity == Parity::even) ? Scalar(1) : Scalar(-1);
  std::vector<std::pair<Scalar, Scalar>> pts;
  pts.reserve(2 * g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    pts.emplace_back(g.nodes[i], g.values[i]);
    if (g.nodes[i] != Scalar(0)) pts.emplace_back(-g.nodes[i], sign * g.values[i]);
  }
  std::sort(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.first < b.first; });
  GridFunction<Scalar> out{{}, {}, g.parity};
  for (auto& [x, v] : pts) {
    if (!out.nodes.empty() && std::abs(x - out.nodes.back()) <= Scalar(1e-14) * (1 + std::abs(x)))
      continue;
    out.nodes.push_back(x);
    out.values.push_back(v);
  }
  return out;
}

/// Coefficients of sampled data. Samples taken exactly at the nodes of the
/// default rule are integrated by that rule; any other grid is fitted by
/// least squares on phi_0..phi_K, which requires more distinct samples than
/// K + 1 spread over the support.
template <typename Scalar>
CoeffVector<Scalar> analyze(const GridFunction<Scalar>& g, std::size_t K,
                            const SigmaParams<Scalar>& p, std::size_t N = 0) {
  const GridFunction<Scalar> full = unfold(g);
  const auto rule = build_rule(N == 0 ? default_node_count(K, p) : N, p);
  bool on_rule = full.size() == rule.size();
  for (std::size_t i = 0; on_rule && i < rule.size(); ++i)
    on_rule = std::abs(full.nodes[i] - rule.nodes[i]) <= Scalar(1e-12) * (1 + std::abs(rule.nodes[i]));
  if (on_rule) {
    std::size_t i = 0;
    return analyze([&](Scalar) { return full.values[i++]; }, K, rule);
  }
  if (full.size() <= K)
    throw ValidationError("analyze: need more than K+1 samples for a least-squares fit");
  const Matrix<Scalar> B = basis_matrix(full.nodes, K, p);
  const Vector<Scalar> rhs =
      Eigen::Map<const Vector<Scalar>>(full.values.data(), static_cast<Eigen::Index>(full.size()));
  Vector<Scalar> c = B.colPivHouseholderQr().solve(rhs);
  CoeffVector<Scalar> out(std::move(c), p);
  detect_parity(out);
  out.truncation_warning = edge_exceeds(out.coeffs, Scalar(1e-8));
  return out;
}

/// sum_k c_k phi_k at each node.
template <typename Scalar>
GridFunction<Scalar> synthesize(const CoeffVector<Scalar>& c, const std::vector<Scalar>& nodes) {
  GridFunction<Scalar> out{nodes, std::vector<Scalar>(nodes.size()), c.parity};
  for (std::size_t i = 0; i < nodes.size(); ++i)
    out.values[i] = eval_phi_all(c.order(), nodes[i], c.params).dot(c.coeffs);
  return out;
}

/// Single-point synthesis.
template <typename Scalar>
Scalar synthesize_at(const CoeffVector<Scalar>& c, Scalar x) {
  return eval_phi_all(c.order(), x, c.params).dot(c.coeffs);
}

/// ||f||_sigma^2 = integral f^2 |x|^{2 sigma}dx by the rule.
template <typename Scalar, typename F>
Scalar weighted_norm_sq(F&& f, const QuadratureRule<Scalar>& rule) {
  Scalar acc(0);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const Scalar v = f(rule.nodes[i]);
    acc += rule.phi_weights[i] * v * v;
  }
  return acc;
}

}  // namespace dunkl
