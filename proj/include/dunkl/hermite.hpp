#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "dunkl/params.hpp"

namespace dunkl {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Sampled function on strictly increasing nodes. When `parity` is set and
/// all nodes are >= 0, the samples stand for the full line by reflection.
template <typename Scalar = double>
struct GridFunction {
  std::vector<Scalar> nodes;
  std::vector<Scalar> values;
  std::optional<Parity> parity;

  std::size_t size() const { return nodes.size(); }

  void validate() const {
    if (nodes.size() != values.size())
      throw ValidationError("grid function: nodes and values differ in length");
    for (std::size_t i = 1; i < nodes.size(); ++i)
      if (!(nodes[i] > nodes[i - 1]))
        throw ValidationError("grid function: nodes must be strictly increasing");
  }
};

/// log p_0 = ((2 sigma + 1)/4) log s - lgamma(sigma + 1/2)/2
template <typename Scalar>
Scalar log_p0(const SigmaParams<Scalar>& p) {
  using std::lgamma;
  using std::log;
  return (2 * p.sigma() + 1) / 4 * log(p.s()) - lgamma(p.sigma() + Scalar(0.5)) / 2;
}

/// sqrt((2k+1+2 sigma)/s): classical turning point of phi_k, used to size grids.
template <typename Scalar>
Scalar turning_point(std::size_t k, const SigmaParams<Scalar>& p) {
  using std::sqrt;
  return sqrt((Scalar(2 * k + 1) + 2 * p.sigma()) / p.s());
}

namespace detail {

// Three-term recurrence
//   k even: q_k = k^{-1/2} (sqrt(2s) x q_{k-1} - sqrt(k-1+2 sigma) q_{k-2})
//   k odd:  q_k = (k+2 sigma)^{-1/2} (sqrt(2s) x q_{k-1} - sqrt(k-1) q_{k-2})
// It is linear in (q_{k-1}, q_{k-2}), so it holds for q = p and for
// q = p e^{-s x^2/2} alike. The iterate is held as mantissa * exp(log_scale)
// and the mantissa is renormalised whenever it drifts out of [1e-150, 1e150],
// so neither the polynomial growth nor the Gaussian decay can overflow.
//
// `sink(k, mantissa, log_scale)` receives each q_k for k = 0..K.
template <typename Scalar, typename Sink>
void scaled_recurrence(std::size_t K, Scalar x, const SigmaParams<Scalar>& p, Scalar log_q0,
                       Sink&& sink) {
  using std::abs;
  using std::log;
  using std::sqrt;
  const Scalar big(1e150);
  const Scalar log_big = log(big);
  const Scalar two_sigma = 2 * p.sigma();
  const Scalar root2s = sqrt(2 * p.s());

  Scalar prev(0);
  Scalar cur(1);
  Scalar log_scale = log_q0;
  sink(std::size_t{0}, cur, log_scale);
  for (std::size_t k = 1; k <= K; ++k) {
    Scalar next;
    if (k % 2 == 0)
      next = (root2s * x * cur - sqrt(Scalar(k - 1) + two_sigma) * prev) / sqrt(Scalar(k));
    else
      next = (root2s * x * cur - sqrt(Scalar(k - 1)) * prev) / sqrt(Scalar(k) + two_sigma);
    prev = cur;
    cur = next;
    const Scalar mag = std::max(abs(cur), abs(prev));
    if (mag > big) {
      cur /= big;
      prev /= big;
      log_scale += log_big;
    } else if (mag < 1 / big && mag > Scalar(0)) {
      cur *= big;
      prev *= big;
      log_scale -= log_big;
    }
    sink(k, cur, log_scale);
  }
}

template <typename Scalar>
Scalar unscale(Scalar mantissa, Scalar log_scale) {
  using std::abs;
  using std::exp;
  using std::log;
  if (mantissa == Scalar(0)) return Scalar(0);
  const Scalar v = exp(log(abs(mantissa)) + log_scale);
  return mantissa < 0 ? -v : v;
}

}  // namespace detail

/// Orthonormal generalized Hermite polynomial p_k(x) for e^{-s x^2}|x|^{2 sigma}dx.
/// Throws NumericalError when |p_k(x)| is not representable; use eval_phi then.
template <typename Scalar>
Scalar eval_p(std::size_t k, Scalar x, const SigmaParams<Scalar>& p) {
  using std::abs;
  using std::log;
  Scalar mant(1), lsc(0);
  detail::scaled_recurrence(k, abs(x), p, log_p0(p), [&](std::size_t, Scalar m, Scalar l) {
    mant = m;
    lsc = l;
  });
  if (mant != Scalar(0) &&
      log(abs(mant)) + lsc > log(std::numeric_limits<Scalar>::max()))
    throw NumericalError("eval_p: |p_k(x)| overflows; evaluate phi_k instead");
  const Scalar v = detail::unscale(mant, lsc);
  return (k % 2 == 1 && x < 0) ? -v : v;
}

/// phi_k = p_k e^{-s x^2/2}. The Gaussian factor enters the recurrence through
/// the starting value, never as a separate product.
template <typename Scalar>
Scalar eval_phi(std::size_t k, Scalar x, const SigmaParams<Scalar>& p) {
  using std::abs;
  const Scalar ax = abs(x);
  Scalar mant(1), lsc(0);
  detail::scaled_recurrence(k, ax, p, log_p0(p) - p.s() * ax * ax / 2,
                            [&](std::size_t, Scalar m, Scalar l) {
                              mant = m;
                              lsc = l;
                            });
  const Scalar v = detail::unscale(mant, lsc);
  return (k % 2 == 1 && x < 0) ? -v : v;
}

/// phi_0(x), ..., phi_K(x) in one pass.
template <typename Scalar>
Vector<Scalar> eval_phi_all(std::size_t K, Scalar x, const SigmaParams<Scalar>& p) {
  using std::abs;
  const Scalar ax = abs(x);
  Vector<Scalar> out(static_cast<Eigen::Index>(K + 1));
  detail::scaled_recurrence(K, ax, p, log_p0(p) - p.s() * ax * ax / 2,
                            [&](std::size_t k, Scalar m, Scalar l) {
                              const Scalar v = detail::unscale(m, l);
                              out(static_cast<Eigen::Index>(k)) = (k % 2 == 1 && x < 0) ? -v : v;
                            });
  return out;
}

/// xi_k = |x|^sigma phi_k. At x = 0: 0 for sigma > 0, phi_k(0) for sigma = 0,
/// SingularPointError for sigma < 0.
template <typename Scalar>
Scalar eval_xi(std::size_t k, Scalar x, const SigmaParams<Scalar>& p) {
  using std::abs;
  using std::pow;
  if (x == Scalar(0)) {
    if (p.sigma() > 0) return Scalar(0);
    if (p.sigma() == 0) return eval_phi(k, x, p);
    throw SingularPointError("xi_k is singular at x = 0 for sigma < 0");
  }
  return pow(abs(x), p.sigma()) * eval_phi(k, x, p);
}

/// Row i holds phi_0..phi_K at nodes[i].
template <typename Scalar>
Matrix<Scalar> basis_matrix(const std::vector<Scalar>& nodes, std::size_t K,
                            const SigmaParams<Scalar>& p) {
  Matrix<Scalar> B(static_cast<Eigen::Index>(nodes.size()), static_cast<Eigen::Index>(K + 1));
  for (std::size_t i = 0; i < nodes.size(); ++i)
    B.row(static_cast<Eigen::Index>(i)) = eval_phi_all(K, nodes[i], p).transpose();
  return B;
}

}  // namespace dunkl
