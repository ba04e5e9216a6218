#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace oracle {

std::vector<long double> hermite_H(std::size_t K, long double y) {
  std::vector<long double> H(K + 1);
  H[0] = 1;
  if (K >= 1) H[1] = 2 * y;
  for (std::size_t n = 1; n < K; ++n) H[n + 1] = 2 * y * H[n] - 2 * static_cast<long double>(n) * H[n - 1];
  return H;
}

std::vector<long double> classical_phi(std::size_t K, long double x, long double s) {
  const long double y = std::sqrt(s) * x;
  const auto H = hermite_H(K, y);
  std::vector<long double> out(K + 1);
  // log sqrt(2^n n! sqrt(pi)), accumulated in n
  long double log_norm = 0.25L * std::log(std::numbers::pi_v<long double>);
  for (std::size_t n = 0; n <= K; ++n) {
    if (n > 0) log_norm += std::log(2.0L * static_cast<long double>(n)) / 2;
    out[n] = std::pow(s, 0.25L) * H[n] * std::exp(-y * y / 2 - log_norm);
  }
  return out;
}

Eigen::MatrixXd classical_x(std::size_t K, double s) {
  // y h_n = sqrt(n/2) h_{n-1} + sqrt((n+1)/2) h_{n+1}, x = y / sqrt(s)
  const auto n = static_cast<Eigen::Index>(K + 1);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (j > 0) M(j - 1, j) = std::sqrt(j / 2.0) / std::sqrt(s);
    if (j + 1 < n) M(j + 1, j) = std::sqrt((j + 1) / 2.0) / std::sqrt(s);
  }
  return M;
}

Eigen::MatrixXd classical_ddx(std::size_t K, double s) {
  // h_n' = sqrt(n/2) h_{n-1} - sqrt((n+1)/2) h_{n+1}, d/dx = sqrt(s) d/dy
  const auto n = static_cast<Eigen::Index>(K + 1);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    if (j > 0) M(j - 1, j) = std::sqrt(j / 2.0) * std::sqrt(s);
    if (j + 1 < n) M(j + 1, j) = -std::sqrt((j + 1) / 2.0) * std::sqrt(s);
  }
  return M;
}

void exp_sinh_rule(double h, double t_lo, double t_hi, double x_max, std::vector<double>& x,
                   std::vector<double>& w) {
  x.clear();
  w.clear();
  const double c = std::numbers::pi / 2;
  const long steps = std::lround((t_hi - t_lo) / h);
  for (long i = 0; i <= steps; ++i) {
    const double t = t_lo + h * static_cast<double>(i);
    const double xi = std::exp(c * std::sinh(t));
    if (xi > x_max) break;
    x.push_back(xi);
    w.push_back(h * c * std::cosh(t) * xi);
  }
}

double exp_sinh(const std::function<double(double)>& f, double h, double t_lo, double t_hi) {
  std::vector<double> x, w;
  exp_sinh_rule(h, t_lo, t_hi, INFINITY, x, w);
  double acc = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = f(x[i]);
    if (std::isfinite(v)) acc += w[i] * v;
  }
  return acc;
}

void fd12(const std::function<double(double)>& f, double x, double h, double& d1, double& d2) {
  const double a = f(x + 2 * h), b = f(x + h), c = f(x), d = f(x - h), e = f(x - 2 * h);
  d1 = (-a + 8 * b - 8 * d + e) / (12 * h);
  d2 = (-a + 16 * b - 30 * c + 16 * d - e) / (12 * h * h);
}

double xi_coefficient(std::size_t k, std::size_t l, double sigma, double s) {
  long double num = 2 * s, den = 1;
  for (std::size_t j = l + 2; j + 1 <= k; j += 2) num *= static_cast<long double>(j);
  for (std::size_t j = l + 1; j <= k; j += 2) den *= static_cast<long double>(j) + 2 * sigma;
  const double sign = ((k - l - 1) / 2) % 2 ? -1.0 : 1.0;
  return sign * static_cast<double>(std::sqrt(num / den));
}

double sup_abs(const std::function<double(double)>& f, double a, double b, int n) {
  const double dx = (b - a) / n;
  int best = 0;
  double best_v = -1;
  for (int i = 0; i <= n; ++i) {
    const double v = std::abs(f(a + dx * i));
    if (v > best_v) {
      best_v = v;
      best = i;
    }
  }
  double lo = std::max(a, a + dx * (best - 1)), hi = std::min(b, a + dx * (best + 1));
  const double g = (std::sqrt(5.0) - 1) / 2;
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = std::abs(f(x1)), f2 = std::abs(f(x2));
  for (int it = 0; it < 80; ++it) {
    if (f1 > f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = std::abs(f(x1));
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = std::abs(f(x2));
    }
  }
  return std::max({best_v, f1, f2});
}

}  // namespace oracle
