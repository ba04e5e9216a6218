#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dunkl/hermite.hpp"
#include "dunkl/params.hpp"
#include "dunkl/quadrature.hpp"

namespace dunkl {

/// Ladder factor a_k with B phi_k = a_k phi_{k-1} and B' phi_{k-1} = a_k phi_k:
/// sqrt(2ks) for even k, sqrt(2(k+2 sigma)s) for odd k (k >= 1).
template <typename Scalar>
Scalar ladder_factor(std::size_t k, const SigmaParams<Scalar>& p) {
  using std::sqrt;
  return sqrt(2 * perturbed_factorial_step(k, p.sigma()) * p.s());
}

enum class OperatorKind {
  mult_x,
  dunkl_T,
  annihilate_B,
  create_Bprime,
  oscillator_L,
  reflectionweight_Sigma,
  inverse_x_Xi,
};

inline const char* to_string(OperatorKind k) {
  switch (k) {
    case OperatorKind::mult_x: return "mult_x";
    case OperatorKind::dunkl_T: return "dunkl_T";
    case OperatorKind::annihilate_B: return "annihilate_B";
    case OperatorKind::create_Bprime: return "create_Bprime";
    case OperatorKind::oscillator_L: return "oscillator_L";
    case OperatorKind::reflectionweight_Sigma: return "reflectionweight_Sigma";
    case OperatorKind::inverse_x_Xi: return "inverse_x_Xi";
  }
  return "?";
}

inline bool flips_parity(OperatorKind k) {
  return k != OperatorKind::oscillator_L && k != OperatorKind::reflectionweight_Sigma;
}

// All banded applications keep the length K+1. Terms pushed past index K are
// dropped and `truncation_warning` is raised when the edge coefficient was
// not negligible.

template <typename Scalar>
CoeffVector<Scalar> apply_B(const CoeffVector<Scalar>& c) {
  const auto n = c.coeffs.size();
  Vector<Scalar> out = Vector<Scalar>::Zero(n);
  for (Eigen::Index k = 1; k < n; ++k)
    out(k - 1) = ladder_factor(static_cast<std::size_t>(k), c.params) * c.coeffs(k);
  CoeffVector<Scalar> r(std::move(out), c.params, flip(c.parity));
  r.truncation_warning = c.truncation_warning;
  return r;
}

template <typename Scalar>
CoeffVector<Scalar> apply_Bprime(const CoeffVector<Scalar>& c) {
  const auto n = c.coeffs.size();
  Vector<Scalar> out = Vector<Scalar>::Zero(n);
  for (Eigen::Index k = 1; k < n; ++k)
    out(k) = ladder_factor(static_cast<std::size_t>(k), c.params) * c.coeffs(k - 1);
  CoeffVector<Scalar> r(std::move(out), c.params, flip(c.parity));
  r.truncation_warning = c.truncation_warning || edge_exceeds(c.coeffs, Scalar(1e-10));
  return r;
}

/// (Lc)_k = (2k+1+2 sigma)s c_k
template <typename Scalar>
CoeffVector<Scalar> apply_L(const CoeffVector<Scalar>& c) {
  CoeffVector<Scalar> r = c;
  for (Eigen::Index k = 0; k < r.coeffs.size(); ++k)
    r.coeffs(k) *= c.params.eigenvalue(static_cast<std::size_t>(k));
  return r;
}

template <typename Scalar>
CoeffVector<Scalar> apply_Sigma(const CoeffVector<Scalar>& c) {
  CoeffVector<Scalar> r = c;
  for (Eigen::Index k = 0; k < r.coeffs.size(); ++k)
    r.coeffs(k) *= sigma_action(c.params, parity_of(static_cast<std::size_t>(k)));
  return r;
}

namespace detail {
// alpha B + beta B' in one sweep
template <typename Scalar>
CoeffVector<Scalar> ladder_combination(const CoeffVector<Scalar>& c, Scalar alpha, Scalar beta) {
  const auto n = c.coeffs.size();
  Vector<Scalar> out = Vector<Scalar>::Zero(n);
  for (Eigen::Index k = 1; k < n; ++k) {
    const Scalar a = ladder_factor(static_cast<std::size_t>(k), c.params);
    out(k - 1) += alpha * a * c.coeffs(k);
    out(k) += beta * a * c.coeffs(k - 1);
  }
  CoeffVector<Scalar> r(std::move(out), c.params, flip(c.parity));
  r.truncation_warning = c.truncation_warning || edge_exceeds(c.coeffs, Scalar(1e-10));
  return r;
}
}  // namespace detail

/// Multiplication by x = (B + B')/(2s).
template <typename Scalar>
CoeffVector<Scalar> apply_x(const CoeffVector<Scalar>& c) {
  const Scalar h = Scalar(1) / (2 * c.params.s());
  return detail::ladder_combination(c, h, h);
}

/// Dunkl operator T_sigma = (B - B')/2.
template <typename Scalar>
CoeffVector<Scalar> apply_T(const CoeffVector<Scalar>& c) {
  return detail::ladder_combination(c, Scalar(0.5), Scalar(-0.5));
}

/// Division by x, odd -> even, from the finite expansion of x^{-1} p_k:
///   d_l = sum_{k = l+1, l+3, ...} (-1)^{(k-l-1)/2} sqrt(R(k,l)) c_k,
///   R(k,l) = (k-1)(k-3)...(l+2) 2s / ((k+2 sigma)(k-2+2 sigma)...(l+1+2 sigma)),
/// for even l <= m_out. R(l+1,l) = 2s/(l+1+2 sigma) and
/// R(k+2,l) = R(k,l) (k+1)/(k+2+2 sigma); every step factor lies in (0,1)
/// for sigma > -1/2, so the running product cannot overflow.
template <typename Scalar>
CoeffVector<Scalar> apply_Xi(const CoeffVector<Scalar>& c, std::size_t m_out) {
  using std::sqrt;
  using std::abs;
  if (c.parity && *c.parity != Parity::odd)
    throw ValidationError("apply_Xi: input must be odd");
  for (Eigen::Index k = 0; k < c.coeffs.size(); k += 2)
    if (c.coeffs(k) != Scalar(0)) throw ValidationError("apply_Xi: input has even components");

  const Scalar two_sigma = 2 * c.params.sigma();
  const auto K = static_cast<std::size_t>(c.coeffs.size() - 1);
  Vector<Scalar> d = Vector<Scalar>::Zero(static_cast<Eigen::Index>(m_out + 1));
  for (std::size_t l = 0; l <= m_out; l += 2) {
    Scalar ratio = 2 * c.params.s() / (Scalar(l + 1) + two_sigma);
    Scalar acc(0);
    Scalar sign(1);
    for (std::size_t k = l + 1; k <= K; k += 2) {
      acc += sign * sqrt(ratio) * c.coeffs(static_cast<Eigen::Index>(k));
      ratio *= Scalar(k + 1) / (Scalar(k + 2) + two_sigma);
      sign = -sign;
    }
    d(static_cast<Eigen::Index>(l)) = acc;
  }
  CoeffVector<Scalar> r(std::move(d), c.params, Parity::even);
  r.truncation_warning = c.truncation_warning;
  return r;
}

/// Ordinary derivative d/dx in coefficient space: T on the even part,
/// T - 2 sigma Xi on the odd part.
template <typename Scalar>
CoeffVector<Scalar> apply_D(const CoeffVector<Scalar>& c) {
  CoeffVector<Scalar> r = apply_T(c);
  const CoeffVector<Scalar> od = project(c, Parity::odd);
  if (c.params.sigma() != Scalar(0) && od.max_abs() > Scalar(0))
    r.coeffs -= 2 * c.params.sigma() * apply_Xi(od, c.order()).coeffs;
  r.parity = flip(c.parity);
  return r;
}

/// Banded matrix of an operator on span{phi_0..phi_K}: column j holds the
/// image of e_j. For Xi this is the (K+1)x(K+1) matrix acting on odd indices.
template <typename Scalar>
Matrix<Scalar> operator_matrix(OperatorKind kind, const SigmaParams<Scalar>& p, std::size_t K) {
  const auto n = static_cast<Eigen::Index>(K + 1);
  Matrix<Scalar> M = Matrix<Scalar>::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto e = CoeffVector<Scalar>::unit(static_cast<std::size_t>(j), K, p);
    switch (kind) {
      case OperatorKind::mult_x: M.col(j) = apply_x(e).coeffs; break;
      case OperatorKind::dunkl_T: M.col(j) = apply_T(e).coeffs; break;
      case OperatorKind::annihilate_B: M.col(j) = apply_B(e).coeffs; break;
      case OperatorKind::create_Bprime: M.col(j) = apply_Bprime(e).coeffs; break;
      case OperatorKind::oscillator_L: M.col(j) = apply_L(e).coeffs; break;
      case OperatorKind::reflectionweight_Sigma: M.col(j) = apply_Sigma(e).coeffs; break;
      case OperatorKind::inverse_x_Xi:
        if (j % 2 == 1) M.col(j) = apply_Xi(e, K).coeffs;
        break;
    }
  }
  return M;
}

/// Immutable descriptor pairing an operator kind with its parameters.
template <typename Scalar = double>
struct CoeffOperator {
  OperatorKind kind;
  SigmaParams<Scalar> params;

  CoeffVector<Scalar> operator()(const CoeffVector<Scalar>& c) const {
    if (!(c.params == params)) throw ValidationError("CoeffOperator: parameter mismatch");
    switch (kind) {
      case OperatorKind::mult_x: return apply_x(c);
      case OperatorKind::dunkl_T: return apply_T(c);
      case OperatorKind::annihilate_B: return apply_B(c);
      case OperatorKind::create_Bprime: return apply_Bprime(c);
      case OperatorKind::oscillator_L: return apply_L(c);
      case OperatorKind::reflectionweight_Sigma: return apply_Sigma(c);
      case OperatorKind::inverse_x_Xi: return apply_Xi(c, c.order());
    }
    throw ValidationError("CoeffOperator: unknown kind");
  }

  Matrix<Scalar> matrix(std::size_t K) const { return operator_matrix(kind, params, K); }
};

/// T_sigma on a polynomial given by monomial coefficients a_0..a_n:
/// T x^n = n x^{n-1} for even n and (n + 2 sigma) x^{n-1} for odd n.
template <typename Scalar>
std::vector<Scalar> dunkl_monomial(const std::vector<Scalar>& a, Scalar sigma) {
  if (a.size() <= 1) return {Scalar(0)};
  std::vector<Scalar> out(a.size() - 1);
  for (std::size_t n = 1; n < a.size(); ++n) out[n - 1] = perturbed_factorial_step(n, sigma) * a[n];
  return out;
}

namespace detail {

// Fornberg's recursion: weights w[j] with f^{(order)}(z) ~ sum_j w[j] f(x[j]).
template <typename Scalar>
std::vector<Scalar> fd_weights(Scalar z, const std::vector<Scalar>& x, int order) {
  const int n = static_cast<int>(x.size()) - 1;
  std::vector<std::vector<Scalar>> c(x.size(), std::vector<Scalar>(order + 1, Scalar(0)));
  Scalar c1(1), c4 = x[0] - z;
  c[0][0] = Scalar(1);
  for (int i = 1; i <= n; ++i) {
    const int mn = std::min(i, order);
    Scalar c2(1);
    const Scalar c5 = c4;
    c4 = x[i] - z;
    for (int j = 0; j < i; ++j) {
      const Scalar c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<Scalar> w(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) w[j] = c[j][order];
  return w;
}

}  // namespace detail

/// Pointwise T_sigma on a parity-tagged grid function: f' by five-point
/// (fourth-order) differences on the reflected grid, plus 2 sigma f/x for odd
/// f. Near x = 0, f/x is taken from the least-squares fit
/// f = x(b0 + b2 x^2 + b4 x^4 + b6 x^6) on the 8 nodes closest to 0.
/// `band` is the highest basis index present in f; the node spacing must not
/// exceed 0.25/turning_point(band).
template <typename Scalar>
GridFunction<Scalar> apply_T_pointwise(const GridFunction<Scalar>& f, const SigmaParams<Scalar>& p,
                                       std::size_t band) {
  using std::abs;
  if (!f.parity) throw ValidationError("apply_T_pointwise: grid function needs a definite parity");
  const GridFunction<Scalar> full = unfold(f);
  const std::size_t n = full.size();
  if (n < 9) throw ValidationError("apply_T_pointwise: need at least 9 grid points");

  const Scalar max_h = Scalar(0.25) / turning_point(band, p);
  auto nearest = [&](Scalar x) {
    auto it = std::lower_bound(full.nodes.begin(), full.nodes.end(), x);
    return static_cast<std::size_t>(it - full.nodes.begin());
  };

  // f/x near the origin
  Eigen::Matrix<Scalar, 4, 1> fit = Eigen::Matrix<Scalar, 4, 1>::Zero();
  Scalar fit_radius(-1);
  if (*f.parity == Parity::odd) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i)
      if (full.nodes[i] != Scalar(0)) idx.push_back(i);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return abs(full.nodes[a]) < abs(full.nodes[b]); });
    idx.resize(std::min<std::size_t>(8, idx.size()));
    Matrix<Scalar> A(static_cast<Eigen::Index>(idx.size()), 4);
    Vector<Scalar> rhs(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t r = 0; r < idx.size(); ++r) {
      const Scalar x = full.nodes[idx[r]];
      Scalar x2k(1);
      for (int c = 0; c < 4; ++c) {
        A(static_cast<Eigen::Index>(r), c) = x * x2k;
        x2k *= x * x;
      }
      rhs(static_cast<Eigen::Index>(r)) = full.values[idx[r]];
      fit_radius = std::max(fit_radius, abs(x));
    }
    fit = A.colPivHouseholderQr().solve(rhs);
  }

  GridFunction<Scalar> out{f.nodes, std::vector<Scalar>(f.size()), flip(f.parity)};
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Scalar x = f.nodes[i];
    std::size_t c = nearest(x);
    if (c >= n) c = n - 1;
    std::size_t lo = (c >= 2) ? c - 2 : 0;
    if (lo + 5 > n) lo = n - 5;
    std::vector<Scalar> xs(full.nodes.begin() + lo, full.nodes.begin() + lo + 5);
    for (std::size_t j = 1; j < xs.size(); ++j)
      if (xs[j] - xs[j - 1] > max_h)
        throw ValidationError("apply_T_pointwise: grid too coarse for band " + std::to_string(band));
    const auto w = detail::fd_weights(x, xs, 1);
    Scalar deriv(0);
    for (std::size_t j = 0; j < 5; ++j) deriv += w[j] * full.values[lo + j];

    Scalar value = deriv;
    if (*f.parity == Parity::odd && p.sigma() != Scalar(0)) {
      Scalar over_x;
      if (abs(x) <= fit_radius) {
        const Scalar x2 = x * x;
        over_x = fit(0) + x2 * (fit(1) + x2 * (fit(2) + x2 * fit(3)));
      } else {
        over_x = f.values[i] / x;
      }
      value += 2 * p.sigma() * over_x;
    }
    out.values[i] = value;
  }
  return out;
}

}  // namespace dunkl
