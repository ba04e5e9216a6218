#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace dunkl {

/// Invalid configuration or arguments (CLI exit code 2).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Overflow, failed eigensolve, unresolved spectrum under --strict (exit code 3).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evaluation requested at x = 0 where |x|^sigma is singular.
class SingularPointError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class Parity { even, odd };

inline Parity parity_of(std::size_t k) { return (k % 2 == 0) ? Parity::even : Parity::odd; }

inline Parity flip(Parity p) { return p == Parity::even ? Parity::odd : Parity::even; }

inline std::optional<Parity> flip(std::optional<Parity> p) {
  if (!p) return std::nullopt;
  return flip(*p);
}

inline const char* to_string(std::optional<Parity> p) {
  if (!p) return "mixed";
  return *p == Parity::even ? "even" : "odd";
}

inline std::optional<Parity> parse_parity(const std::string& s) {
  if (s == "even" || s == "ev") return Parity::even;
  if (s == "odd") return Parity::odd;
  if (s == "mixed" || s == "none") return std::nullopt;
  throw ValidationError("unknown parity '" + s + "' (expected even, odd or mixed)");
}

/// Lower admissible bound for sigma. The weight |x|^{2 sigma} stops being
/// locally integrable at -1/2, so a small margin is kept.
inline constexpr double kSigmaFloor = -0.5 + 1e-9;

/// The pair (sigma, s) fixing the weight e^{-s x^2}|x|^{2 sigma}, the Dunkl
/// operator and the oscillator spectrum (2k+1+2 sigma)s.
template <typename Scalar = double>
class SigmaParams {
 public:
  SigmaParams(Scalar sigma, Scalar s) : sigma_(sigma), s_(s) {
    if (!(sigma > Scalar(kSigmaFloor)))
      throw ValidationError("sigma must exceed -1/2, got " + std::to_string(double(sigma)));
    if (!(s > Scalar(0)) || !std::isfinite(double(s)))
      throw ValidationError("s must be a positive finite number, got " + std::to_string(double(s)));
  }

  Scalar sigma() const { return sigma_; }
  Scalar s() const { return s_; }

  /// (2k+1+2 sigma)s
  Scalar eigenvalue(std::size_t k) const { return (Scalar(2 * k + 1) + 2 * sigma_) * s_; }

  /// ceil(sigma), the integer entering the embedding exponent tables.
  int sigma_ceil() const { return static_cast<int>(std::ceil(double(sigma_))); }

  friend bool operator==(const SigmaParams& a, const SigmaParams& b) {
    return a.sigma_ == b.sigma_ && a.s_ == b.s_;
  }

 private:
  Scalar sigma_;
  Scalar s_;
};

/// Action of the reflection weight Sigma: +sigma on even, -sigma on odd functions.
template <typename Scalar>
Scalar sigma_action(const SigmaParams<Scalar>& p, Parity parity) {
  return parity == Parity::even ? p.sigma() : -p.sigma();
}

/// Factor contributed at step m >= 1 by the perturbed factorial:
/// m for even m, m + 2 sigma for odd m.
template <typename Scalar>
Scalar perturbed_factorial_step(std::size_t m, Scalar sigma) {
  return (m % 2 == 0) ? Scalar(m) : Scalar(m) + 2 * sigma;
}

/// m!_sigma / k!_sigma for k <= m, as the product of the factors used for m!
/// and not for k!. Accepts any real sigma, so the quotient stays meaningful
/// even where k!_sigma itself vanishes (sigma = -1/2).
template <typename Scalar>
Scalar perturbed_factorial_ratio(std::size_t m, std::size_t k, Scalar sigma) {
  if (k > m) throw ValidationError("perturbed_factorial_ratio requires k <= m");
  Scalar r(1);
  for (std::size_t j = k + 1; j <= m; ++j) r *= perturbed_factorial_step(j, sigma);
  return r;
}

template <typename Scalar>
Scalar perturbed_factorial(std::size_t m, const SigmaParams<Scalar>& p) {
  return perturbed_factorial_ratio(m, std::size_t{0}, p.sigma());
}

}  // namespace dunkl
