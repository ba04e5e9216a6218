#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dunkl/hermite.hpp"
#include "dunkl/operators.hpp"
#include "dunkl/parallel.hpp"
#include "dunkl/params.hpp"
#include "dunkl/quadrature.hpp"

namespace dunkl {

/// Raised by the embedding harness when the requested exponents are not
/// covered by a proven inclusion.
class HypothesisViolation : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

enum class NormFamily { schwartz, perturbed, weak_perturbed, sobolev, ell2, cmax };

inline const char* to_string(NormFamily f) {
  switch (f) {
    case NormFamily::schwartz: return "schwartz";
    case NormFamily::perturbed: return "perturbed";
    case NormFamily::weak_perturbed: return "weak_perturbed";
    case NormFamily::sobolev: return "sobolev";
    case NormFamily::ell2: return "ell2";
    case NormFamily::cmax: return "cmax";
  }
  return "?";
}

inline NormFamily parse_family(const std::string& s) {
  if (s == "schwartz") return NormFamily::schwartz;
  if (s == "perturbed") return NormFamily::perturbed;
  if (s == "weak_perturbed" || s == "weak") return NormFamily::weak_perturbed;
  if (s == "sobolev") return NormFamily::sobolev;
  if (s == "ell2") return NormFamily::ell2;
  if (s == "cmax") return NormFamily::cmax;
  throw ValidationError("unknown norm family '" + s + "'");
}

inline bool is_seminorm_family(NormFamily f) {
  return f == NormFamily::schwartz || f == NormFamily::perturbed || f == NormFamily::weak_perturbed;
}

struct SeminormSpec {
  NormFamily family;
  double m;
  std::optional<Parity> parity;

  void validate() const {
    if (!(m >= 0)) throw ValidationError("seminorm order m must be >= 0");
    if (is_seminorm_family(family) && m != std::floor(m))
      throw ValidationError("Schwartz-type seminorms need a natural order m");
  }
};

// ---------------------------------------------------------------------------
// Sequence and Sobolev norms

/// sqrt(sum_k (1 + (2k+1+2 sigma)s)^m c_k^2)
template <typename Scalar>
Scalar sobolev_norm(const CoeffVector<Scalar>& c, Scalar m) {
  using std::pow;
  using std::sqrt;
  Scalar acc(0);
  for (Eigen::Index k = 0; k < c.coeffs.size(); ++k) {
    const Scalar ck = c.coeffs(k);
    if (ck == Scalar(0)) continue;
    acc += pow(1 + c.params.eigenvalue(static_cast<std::size_t>(k)), m) * ck * ck;
  }
  return sqrt(acc);
}

/// ||c||_{l2_m} = (sum_k c_k^2 (1+k)^m)^{1/2} or ||c||_{C_m} = sup_k |c_k|(1+k)^m.
template <typename Scalar>
Scalar seq_norm(const Vector<Scalar>& c, NormFamily family, Scalar m) {
  using std::abs;
  using std::pow;
  using std::sqrt;
  Scalar acc(0);
  for (Eigen::Index k = 0; k < c.size(); ++k) {
    const Scalar w = pow(Scalar(1 + k), m);
    if (family == NormFamily::ell2)
      acc += c(k) * c(k) * w;
    else if (family == NormFamily::cmax)
      acc = std::max(acc, abs(c(k)) * w);
    else
      throw ValidationError("seq_norm: family must be ell2 or cmax");
  }
  return family == NormFamily::ell2 ? sqrt(acc) : acc;
}

template <typename Scalar>
Scalar seq_norm(const CoeffVector<Scalar>& c, NormFamily family, Scalar m) {
  return seq_norm(c.coeffs, family, m);
}

// ---------------------------------------------------------------------------
// Exponent tables of the embedding results. n = ceil(sigma).

namespace detail {
inline int ceil_sigma(double sigma) { return static_cast<int>(std::ceil(sigma)); }
inline int quad_term(int n) { return n * (n + 3); }
}  // namespace detail

/// M_{m,ev/odd}: S^{M} (ev/odd) embeds in W_sigma^m.
inline int schwartz_to_sobolev_exponent(int m, double sigma, Parity parity) {
  const int n = detail::ceil_sigma(sigma);
  const int q = detail::quad_term(n);
  if (m % 2 == 1) {
    if (sigma >= 0) return (3 * m + 3) / 2 + (m + 1) * q / 4 + n;
    return 2 * m + 3;
  }
  if (parity == Parity::even) {
    if (sigma >= 0) return (3 * m + 2) / 2 + m * q / 4 + n;
    return 2 * m + 2;
  }
  if (sigma >= 0) return (3 * m + 4) / 2 + (m + 2) * q / 4 + n;
  return 2 * m + 4;
}

/// m_sigma = m + 1 + ceil(sigma)(ceil(sigma)+1)/2
inline int sigma_shifted_order(int m, double sigma) {
  const int n = detail::ceil_sigma(sigma);
  return m + 1 + n * (n + 1) / 2;
}

/// N_{m,ev/odd}: W_sigma^{m'} (ev/odd) embeds in S^m whenever m' > N.
inline int sobolev_to_schwartz_threshold(int m, double sigma, Parity parity) {
  const int ms = sigma_shifted_order(m, sigma);
  const bool ev = parity == Parity::even;
  switch (ms) {
    case 1: return ev ? 2 : 5;
    case 2: return ev ? 6 : 5;
    case 3: return ev ? 6 : 7;
    default: return ms + 3;
  }
}

/// S_{w,sigma}^{M} (ev/odd) embeds in S_sigma^m.
inline int weak_to_perturbed_exponent(int m, double sigma, Parity parity) {
  const int q = detail::quad_term(detail::ceil_sigma(sigma));
  if (m % 2 == 0) {
    if (sigma >= 0) return 3 * m / 2 + m * q / 4;
    return 2 * m;
  }
  if (parity == Parity::even) {
    if (sigma >= 0) return (3 * m - 1) / 2 + (m - 1) * q / 4;
    return 2 * m - 1;
  }
  if (sigma >= 0) return (3 * m + 1) / 2 + (m + 1) * q / 4;
  return 2 * m + 1;
}

/// S_sigma^{M} (ev/odd) embeds in S_{w,sigma}^m.
inline int perturbed_to_weak_exponent(int m, Parity parity) {
  const bool ev = parity == Parity::even;
  switch (m) {
    case 0: return 0;
    case 1: return ev ? 1 : 4;
    case 2: return ev ? 5 : 4;
    case 3: return ev ? 5 : 6;
    default: return m + 2;
  }
}

/// S^{M} embeds in S_{w,sigma}^m.
inline int schwartz_to_weak_exponent(int m, double sigma) {
  return sigma >= 0 ? m + detail::ceil_sigma(sigma) : m + 1;
}

/// S_{w,sigma}^{M} embeds in S^m.
inline int weak_to_schwartz_exponent(int m, double sigma) {
  return sigma >= 0 ? sigma_shifted_order(m, sigma) : m + 1;
}

/// S^{M} (ev/odd) embeds in S_sigma^m.
inline int schwartz_to_perturbed_exponent(int m, double sigma, Parity parity) {
  return weak_to_perturbed_exponent(m, sigma, parity) + (sigma >= 0 ? detail::ceil_sigma(sigma) : 1);
}

/// S_sigma^{M} (ev/odd) embeds in S^m.
inline int perturbed_to_schwartz_exponent(int m, double sigma, Parity parity) {
  return perturbed_to_weak_exponent(sigma_shifted_order(m, sigma), parity);
}

/// Name of the inclusion covering `from -> to`, or throws HypothesisViolation.
inline std::string embedding_rule(const SeminormSpec& from, const SeminormSpec& to, double sigma) {
  from.validate();
  to.validate();
  if (!from.parity || !to.parity || *from.parity != *to.parity)
    throw HypothesisViolation("embedding harness: both sides need the same definite parity");
  const Parity par = *from.parity;
  const double a = from.m;
  const double b = to.m;
  const bool b_natural = b == std::floor(b);
  const int bi = static_cast<int>(b);
  auto refuse = [&](const std::string& why) -> std::string {
    throw HypothesisViolation(std::string("embedding ") + to_string(from.family) + "^" +
                              std::to_string(a) + " -> " + to_string(to.family) + "^" +
                              std::to_string(b) + " not covered: " + why);
  };
  using F = NormFamily;
  const F f = from.family;
  const F t = to.family;

  if (f == F::schwartz && t == F::sobolev) {
    if (!b_natural) return refuse("target order must be natural");
    return a >= schwartz_to_sobolev_exponent(bi, sigma, par) ? "schwartz_in_sobolev"
                                                            : refuse("order below M_m table");
  }
  if (f == F::sobolev && t == F::schwartz)
    return a > sobolev_to_schwartz_threshold(bi, sigma, par) ? "sobolev_in_schwartz"
                                                             : refuse("order not above N_m table");
  if (f == F::perturbed && t == F::sobolev)
    return a >= std::ceil(b) + 1 ? "perturbed_in_sobolev" : refuse("needs order >= ceil(m)+1");
  if (f == F::sobolev && t == F::perturbed)
    return a - b > 1 ? "sobolev_in_perturbed" : refuse("needs m' - m > 1");
  if (f == F::weak_perturbed && t == F::perturbed)
    return a >= weak_to_perturbed_exponent(bi, sigma, par) ? "weak_in_perturbed"
                                                          : refuse("order below weak table");
  if (f == F::perturbed && t == F::weak_perturbed)
    return a >= perturbed_to_weak_exponent(bi, par) ? "perturbed_in_weak"
                                                    : refuse("order below perturbed table");
  if (f == F::schwartz && t == F::weak_perturbed)
    return a >= schwartz_to_weak_exponent(bi, sigma) ? "schwartz_in_weak" : refuse("order too low");
  if (f == F::weak_perturbed && t == F::schwartz)
    return a >= weak_to_schwartz_exponent(bi, sigma) ? "weak_in_schwartz" : refuse("order too low");
  if (f == F::schwartz && t == F::perturbed)
    return a >= schwartz_to_perturbed_exponent(bi, sigma, par) ? "schwartz_in_perturbed"
                                                              : refuse("order too low");
  if (f == F::perturbed && t == F::schwartz)
    return a >= perturbed_to_schwartz_exponent(bi, sigma, par) ? "perturbed_in_schwartz"
                                                              : refuse("order too low");
  if (f == F::ell2 && t == F::cmax)
    return a >= 2 * b ? "ell2_in_cmax" : refuse("needs m' >= 2m");
  if (f == F::cmax && t == F::ell2)
    return 2 * a - b > 1 ? "cmax_in_ell2" : refuse("needs 2m' - m > 1");
  if ((f == F::sobolev && t == F::ell2) || (f == F::ell2 && t == F::sobolev))
    return a == b ? "fourier_quasi_isometry" : refuse("quasi-isometry needs equal orders");
  if (f == t) return a >= b ? "monotone" : refuse("orders decrease along the inclusion");
  return refuse("no inclusion known for this pair of families");
}

// ---------------------------------------------------------------------------
// Seminorms by synthesis on a fixed grid

/// Reproducible sup grid: 4096 uniform points on [-E, E] (never 0) plus 64
/// log-spaced points in [1e-6, 0.1] on each side, E = extent_factor *
/// turning_point(K).
template <typename Scalar>
std::vector<Scalar> sup_grid(std::size_t K, const SigmaParams<Scalar>& p, Scalar extent_factor = 1.5) {
  using std::pow;
  const Scalar E = extent_factor * turning_point(K, p);
  std::vector<Scalar> x;
  x.reserve(4096 + 128);
  for (int i = 0; i < 4096; ++i) x.push_back(-E + 2 * E * Scalar(i) / Scalar(4095));
  for (int i = 0; i < 64; ++i) {
    const Scalar t = Scalar(1e-6) * pow(Scalar(1e5), Scalar(i) / Scalar(63));
    x.push_back(t);
    x.push_back(-t);
  }
  std::sort(x.begin(), x.end());
  return x;
}

/// Evaluates the Schwartz-type seminorms of band-limited functions. Holds the
/// grid and the basis matrix up to index Kmax, so it is built once and
/// shared (read-only) by many evaluations.
template <typename Scalar = double>
class SeminormEvaluator {
 public:
  SeminormEvaluator(SigmaParams<Scalar> p, std::size_t Kmax, Scalar extent_factor = Scalar(1.5))
      : params_(p), kmax_(Kmax), nodes_(sup_grid(Kmax, p, extent_factor)) {
    basis_ = basis_matrix(nodes_, Kmax, p);
    weight_.resize(static_cast<Eigen::Index>(nodes_.size()));
    inner_.resize(static_cast<Eigen::Index>(nodes_.size()));
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      weight_(static_cast<Eigen::Index>(i)) = std::pow(std::abs(nodes_[i]), p.sigma());
      inner_(static_cast<Eigen::Index>(i)) = std::abs(nodes_[i]) <= Scalar(1) ? 1 : 0;
    }
  }

  std::size_t max_order() const { return kmax_; }
  const std::vector<Scalar>& nodes() const { return nodes_; }
  const SigmaParams<Scalar>& params() const { return params_; }

  /// Truncation the input may have for order-m seminorms.
  std::size_t max_input_order(int m) const {
    return kmax_ >= static_cast<std::size_t>(m) + 1 ? kmax_ - static_cast<std::size_t>(m) - 1 : 0;
  }

  /// sum_{i+j<=m} sup of x^i D^j phi under the family's weight rule, with D
  /// the Dunkl operator (perturbed) or d/dx (schwartz, weak_perturbed).
  Scalar seminorm(const CoeffVector<Scalar>& c, int m, NormFamily family) const {
    if (!is_seminorm_family(family)) throw ValidationError("seminorm: not a Schwartz-type family");
    if (m < 0) throw ValidationError("seminorm: m must be >= 0");
    if (!(c.params == params_)) throw ValidationError("seminorm: parameter mismatch");
    const bool split = family != NormFamily::schwartz && params_.sigma() < 0;
    if (split && !c.parity)
      throw ValidationError("seminorm: sigma < 0 perturbed seminorms need a definite parity");
    const std::size_t kpad = c.order() + static_cast<std::size_t>(m) + 1;
    if (kpad > kmax_) throw ValidationError("seminorm: evaluator too small for this input");

    const auto terms = static_cast<Eigen::Index>((m + 1) * (m + 2) / 2);
    Matrix<Scalar> cols = Matrix<Scalar>::Zero(static_cast<Eigen::Index>(kmax_ + 1), terms);
    std::vector<std::optional<Parity>> col_parity;
    col_parity.reserve(static_cast<std::size_t>(terms));

    CoeffVector<Scalar> dj = resized(c, kpad);
    Eigen::Index col = 0;
    for (int j = 0; j <= m; ++j) {
      if (j > 0) dj = family == NormFamily::perturbed ? apply_T(dj) : apply_D(dj);
      CoeffVector<Scalar> g = dj;
      for (int i = 0; i + j <= m; ++i) {
        if (i > 0) g = apply_x(g);
        if (g.truncation_warning) throw NumericalError("seminorm: truncation loss in x^i D^j");
        cols.col(col).head(g.coeffs.size()) = g.coeffs;
        col_parity.push_back(g.parity);
        ++col;
      }
    }

    const Matrix<Scalar> vals = basis_ * cols;
    Scalar total(0);
    for (Eigen::Index q = 0; q < terms; ++q) {
      const auto v = vals.col(q).cwiseAbs();
      if (family == NormFamily::schwartz) {
        total += v.maxCoeff();
      } else if (!split) {
        total += (v.array() * weight_.array()).maxCoeff();
      } else if (*col_parity[static_cast<std::size_t>(q)] == Parity::even) {
        total += (v.array() * inner_.array()).maxCoeff() +
                 (v.array() * weight_.array() * (1 - inner_.array())).maxCoeff();
      } else {
        total += (v.array() * weight_.array()).maxCoeff();
      }
    }
    return total;
  }

 private:
  SigmaParams<Scalar> params_;
  std::size_t kmax_;
  std::vector<Scalar> nodes_;
  Matrix<Scalar> basis_;
  Vector<Scalar> weight_;
  Vector<Scalar> inner_;
};

/// One-shot seminorm; builds its own evaluator.
template <typename Scalar>
Scalar schwartz_seminorm(const CoeffVector<Scalar>& c, int m, NormFamily family,
                         Scalar extent_factor = Scalar(1.5)) {
  const SeminormEvaluator<Scalar> ev(c.params, c.order() + static_cast<std::size_t>(m) + 1, extent_factor);
  return ev.seminorm(c, m, family);
}

/// Any family of SeminormSpec on a coefficient vector.
template <typename Scalar>
Scalar evaluate_norm(const SeminormSpec& spec, const CoeffVector<Scalar>& c,
                     const SeminormEvaluator<Scalar>* evaluator) {
  switch (spec.family) {
    case NormFamily::sobolev: return sobolev_norm(c, Scalar(spec.m));
    case NormFamily::ell2:
    case NormFamily::cmax: return seq_norm(c, spec.family, Scalar(spec.m));
    default: break;
  }
  const int m = static_cast<int>(spec.m);
  if (evaluator) return evaluator->seminorm(c, m, spec.family);
  return schwartz_seminorm(c, m, spec.family);
}

// ---------------------------------------------------------------------------
// Embedding harness

struct EmbeddingReport {
  SeminormSpec spec_from;
  SeminormSpec spec_to;
  std::string rule;
  double sigma = 0;
  double s = 1;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  std::size_t truncation = 0;
  double empirical_constant = 0;  // sup over trials of ||phi||_to / ||phi||_from
  double mean_ratio = 0;
  std::size_t violations = 0;  // trials with a non-finite ratio
};

struct HarnessOptions {
  std::size_t truncation = 20;
  double extent_factor = 1.5;
};

/// Deterministic band-limited test function for trial `trial`:
/// c_k = g_k rho^k, g_k ~ N(0,1), rho cycling through {0.3, 0.5, 0.8},
/// projected on `parity`.
template <typename Scalar>
CoeffVector<Scalar> random_band_limited(const SigmaParams<Scalar>& p, std::size_t K, Parity parity,
                                        std::uint64_t seed, std::size_t trial) {
  static constexpr double rhos[3] = {0.3, 0.5, 0.8};
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double rho = rhos[trial % 3];
  Vector<Scalar> c = Vector<Scalar>::Zero(static_cast<Eigen::Index>(K + 1));
  double r = 1.0;
  for (std::size_t k = 0; k <= K; ++k, r *= rho) {
    const double g = normal(rng);
    if (parity_of(k) == parity) c(static_cast<Eigen::Index>(k)) = Scalar(g * r);
  }
  return CoeffVector<Scalar>(std::move(c), p, parity);
}

/// Samples `trials` random band-limited functions and reports the largest
/// observed ratio ||phi||_to / ||phi||_from. Refuses (HypothesisViolation)
/// pairs that no proven inclusion covers.
template <typename Scalar>
EmbeddingReport embedding_harness(const SeminormSpec& from, const SeminormSpec& to,
                                  const SigmaParams<Scalar>& p, std::size_t trials, std::uint64_t seed,
                                  const HarnessOptions& opt = {}) {
  EmbeddingReport rep;
  rep.rule = embedding_rule(from, to, double(p.sigma()));
  rep.spec_from = from;
  rep.spec_to = to;
  rep.sigma = double(p.sigma());
  rep.s = double(p.s());
  rep.seed = seed;
  rep.samples = trials;
  rep.truncation = opt.truncation;

  int mmax = 0;
  for (const auto* sp : {&from, &to})
    if (is_seminorm_family(sp->family)) mmax = std::max(mmax, static_cast<int>(sp->m));
  std::optional<SeminormEvaluator<Scalar>> evaluator;
  if (is_seminorm_family(from.family) || is_seminorm_family(to.family))
    evaluator.emplace(p, opt.truncation + static_cast<std::size_t>(mmax) + 1, Scalar(opt.extent_factor));

  std::vector<double> ratio(trials);
  parallel_for(trials, [&](std::size_t t) {
    const auto c = random_band_limited(p, opt.truncation, *from.parity, seed, t);
    const Scalar nf = evaluate_norm(from, c, evaluator ? &*evaluator : nullptr);
    const Scalar nt = evaluate_norm(to, c, evaluator ? &*evaluator : nullptr);
    ratio[t] = double(nt / nf);
  });

  double sum = 0;
  for (double r : ratio) {
    if (!std::isfinite(r)) {
      ++rep.violations;
      continue;
    }
    rep.empirical_constant = std::max(rep.empirical_constant, r);
    sum += r;
  }
  const std::size_t ok = trials - rep.violations;
  rep.mean_ratio = ok ? sum / double(ok) : std::numeric_limits<double>::quiet_NaN();
  return rep;
}

// ---------------------------------------------------------------------------
// Decay of xi_k

enum class DecayRegion { whole_line, outside_unit };

struct DecayRow {
  std::size_t k = 0;
  double sup_xi_sq = 0;   // sup of xi_k^2 over the region below
  double normalized = 0;  // sup_xi_sq * k^{1/6}
  DecayRegion region = DecayRegion::whole_line;
  double inner_sup_phi_sq = std::numeric_limits<double>::quiet_NaN();  // sup_{|x|<=1} phi_k^2, sigma < 0 only
};

/// Suprema of xi_k^2 on (0, E], E = extent_factor * turning_point(k), with at
/// least `points_per_wavelength` samples per local oscillation. For sigma < 0
/// and even k the supremum is restricted to |x| >= 1 and sup_{|x|<=1} phi_k^2
/// is reported separately.
template <typename Scalar>
std::vector<DecayRow> decay_check(const SigmaParams<Scalar>& p, const std::vector<std::size_t>& ks,
                                  Scalar extent_factor = Scalar(1.5), int points_per_wavelength = 40) {
  using std::pow;
  using std::sqrt;
  if (ks.empty()) throw ValidationError("decay_check: empty k list");
  const bool negative = p.sigma() < 0;
  std::vector<DecayRow> rows(ks.size());
  parallel_for(ks.size(), [&](std::size_t idx) {
    const std::size_t k = ks[idx];
    const Scalar E = std::max(extent_factor * turning_point(k, p), Scalar(1));
    const Scalar wavelength = 2 * Scalar(M_PI) / sqrt(p.eigenvalue(k));
    const auto n = static_cast<std::size_t>(
        std::max<Scalar>(400, std::ceil(points_per_wavelength * E / wavelength)));
    DecayRow row;
    row.k = k;
    const bool outer_only = negative && k % 2 == 0;
    row.region = outer_only ? DecayRegion::outside_unit : DecayRegion::whole_line;
    Scalar sup_xi(0), sup_inner(0);
    if (negative) sup_inner = pow(eval_phi(k, Scalar(0), p), 2);
    auto visit = [&](Scalar x) {
      const Scalar phi = eval_phi(k, x, p);
      if (!outer_only || x >= 1) sup_xi = std::max(sup_xi, pow(x, 2 * p.sigma()) * phi * phi);
      if (negative && x <= 1) sup_inner = std::max(sup_inner, phi * phi);
    };
    for (std::size_t i = 0; i < n; ++i) visit(E * (Scalar(i) + Scalar(0.5)) / Scalar(n));
    visit(Scalar(1));
    row.sup_xi_sq = double(sup_xi);
    row.normalized = double(sup_xi) * std::pow(double(std::max<std::size_t>(k, 1)), 1.0 / 6.0);
    if (negative) row.inner_sup_phi_sq = double(sup_inner);
    rows[idx] = row;
  });
  return rows;
}

}  // namespace dunkl
