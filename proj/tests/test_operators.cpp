#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "dunkl/operators.hpp"
#include "oracles.hpp"

using namespace dunkl;

namespace {

const double kSigmas[] = {-0.4, 0.0, 0.5, 1.7};

Matrix<double> sigma_matrix(const SigmaParams<double>& p, std::size_t K) {
  return operator_matrix(OperatorKind::reflectionweight_Sigma, p, K);
}

Matrix<double> M(OperatorKind k, const SigmaParams<double>& p, std::size_t K) { return operator_matrix(k, p, K); }

// Max entry of the top-left K x K block (the last row/column sees truncation).
double inner_err(const Matrix<double>& A, std::size_t K) {
  const auto n = static_cast<Eigen::Index>(K);
  return A.topLeftCorner(n, n).cwiseAbs().maxCoeff();
}

CoeffVector<double> random_odd(const SigmaParams<double>& p, std::size_t K, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vector<double> v = Vector<double>::Zero(static_cast<Eigen::Index>(K + 1));
  for (std::size_t k = 1; k <= K; k += 2) v(static_cast<Eigen::Index>(k)) = g(rng) * std::pow(3.0, -double(k));
  return CoeffVector<double>(v, p, Parity::odd);
}

}  // namespace

TEST_CASE("creation operator") {
  for (double sigma : kSigmas) {
    const SigmaParams<double> p(sigma, 1.5);
    const auto r = apply_Bprime(CoeffVector<double>::unit(0, 4, p));
    CHECK(r[1] == doctest::Approx(std::sqrt(2 * (1 + 2 * sigma) * 1.5)));
    CHECK(std::abs(r[0]) + std::abs(r[2]) + std::abs(r[3]) == 0.0);
    CHECK(apply_Bprime(CoeffVector<double>::zero(4, p)).coeffs.isZero());
  }
  const SigmaParams<double> p(0.0, 1.0);
  const Matrix<double> ref = oracle::classical_x(16, 1.0) - oracle::classical_ddx(16, 1.0);
  CHECK((M(OperatorKind::create_Bprime, p, 16) - ref).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("annihilation operator") {
  for (double sigma : kSigmas) {
    const double s = 0.7;
    const SigmaParams<double> p(sigma, s);
    CHECK(apply_B(CoeffVector<double>::unit(0, 4, p)).coeffs.isZero());
    CHECK(apply_B(CoeffVector<double>::unit(2, 4, p))[1] == doctest::Approx(std::sqrt(4 * s)));
    CHECK(apply_B(CoeffVector<double>::unit(1, 4, p))[0] == doctest::Approx(std::sqrt(2 * (1 + 2 * sigma) * s)));
    CHECK(M(OperatorKind::annihilate_B, p, 20).isApprox(M(OperatorKind::create_Bprime, p, 20).transpose(), 0));
  }
}

TEST_CASE("oscillator") {
  const auto a = apply_L(CoeffVector<double>::unit(0, 3, SigmaParams<double>(0.5, 1.0)));
  CHECK(a[0] == 2.0);
  const auto b = apply_L(CoeffVector<double>::unit(3, 5, SigmaParams<double>(0.0, 1.0)));
  CHECK(b[3] == 7.0);
  CHECK(b[2] == 0.0);
  for (double sigma : kSigmas) {
    const SigmaParams<double> p(sigma, 2.0);
    const std::size_t K = 20;
    const Matrix<double> I = Matrix<double>::Identity(K + 1, K + 1);
    const Matrix<double> S = sigma_matrix(p, K);
    const Matrix<double> B = M(OperatorKind::annihilate_B, p, K), Bp = M(OperatorKind::create_Bprime, p, K);
    const Matrix<double> L = M(OperatorKind::oscillator_L, p, K);
    CHECK(inner_err(L - (Bp * B + (I + 2 * S) * p.s()), K) <= 1e-12);
    CHECK(inner_err(L - (B * Bp - (I + 2 * S) * p.s()), K) <= 1e-12);
  }
}

TEST_CASE("commutators") {
  for (double sigma : kSigmas) {
    for (double s : {0.5, 1.0, 2.0}) {
      const SigmaParams<double> p(sigma, s);
      const std::size_t K = 20;
      const Matrix<double> I = Matrix<double>::Identity(K + 1, K + 1);
      const Matrix<double> S = sigma_matrix(p, K);
      const Matrix<double> B = M(OperatorKind::annihilate_B, p, K), Bp = M(OperatorKind::create_Bprime, p, K);
      const Matrix<double> L = M(OperatorKind::oscillator_L, p, K);
      const Matrix<double> X = M(OperatorKind::mult_x, p, K), T = M(OperatorKind::dunkl_T, p, K);
      const double tol = 1e-12 * (1 + s) * K;
      CHECK(inner_err(T * X - X * T - (I + 2 * S), K) <= tol);
      CHECK(inner_err(L * B - B * L + 2 * s * B, K) <= tol);
      CHECK(inner_err(B * Bp - Bp * B - 2 * s * (I + 2 * S), K) <= tol);
      CHECK(inner_err(L * S - S * L, K) == 0.0);
    }
  }
}

TEST_CASE("multiplication by x") {
  const SigmaParams<double> p(0.5, 1.3);
  const auto c = analyze([&](double x) { return x * eval_phi(2, x, p); }, std::size_t{8}, p);
  const auto r = apply_x(CoeffVector<double>::unit(2, 8, p));
  CHECK((c.coeffs - r.coeffs).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(apply_x(CoeffVector<double>::zero(8, p)).coeffs.isZero());
  for (double s : {0.5, 2.0}) {
    const SigmaParams<double> q(0.0, s);
    CHECK((M(OperatorKind::mult_x, q, 24) - oracle::classical_x(24, s)).cwiseAbs().maxCoeff() <= 1e-13);
    CHECK((M(OperatorKind::dunkl_T, q, 24) - oracle::classical_ddx(24, s)).cwiseAbs().maxCoeff() <= 1e-13);
  }
}

TEST_CASE("parity bookkeeping and band structure") {
  const SigmaParams<double> p(0.3, 1.0);
  const std::size_t K = 12;
  for (auto kind : {OperatorKind::mult_x, OperatorKind::dunkl_T, OperatorKind::annihilate_B, OperatorKind::create_Bprime,
                    OperatorKind::oscillator_L, OperatorKind::reflectionweight_Sigma, OperatorKind::inverse_x_Xi}) {
    const CoeffOperator<double> op{kind, p};
    const auto Mk = op.matrix(K);
    for (Eigen::Index i = 0; i <= Eigen::Index(K); ++i)
      for (Eigen::Index j = 0; j <= Eigen::Index(K); ++j) {
        if (Mk(i, j) == 0.0) continue;
        CHECK(((i + j) % 2 == 1) == flips_parity(kind));
        if (kind == OperatorKind::oscillator_L || kind == OperatorKind::reflectionweight_Sigma) CHECK(i == j);
        else if (kind == OperatorKind::inverse_x_Xi) CHECK((i < j && j % 2 == 1));
        else CHECK(std::abs(i - j) == 1);
      }
    CoeffVector<double> ev = CoeffVector<double>::unit(0, K, p);
    ev.coeffs(4) = 0.5;
    CoeffVector<double> od = CoeffVector<double>::unit(1, K, p);
    od.coeffs(5) = -2;
    for (const auto& c : {ev, od}) {
      if (kind == OperatorKind::inverse_x_Xi && c.parity == Parity::even) continue;
      const auto r = op(c);
      const Parity want = flips_parity(kind) ? flip(*c.parity) : *c.parity;
      CHECK(r.parity == std::optional<Parity>(want));
      for (std::size_t k = 0; k <= r.order(); ++k)
        if (parity_of(k) != want) CHECK(r[k] == 0.0);
    }
  }
  CHECK_THROWS_AS((CoeffOperator<double>{OperatorKind::mult_x, p}(CoeffVector<double>::unit(0, 3, SigmaParams<double>(0.4, 1.0)))),
                  ValidationError);
}

TEST_CASE("division by x closed forms") {
  for (double sigma : kSigmas) {
    for (double s : {1.0, 2.5}) {
      const SigmaParams<double> p(sigma, s);
      const auto d1 = apply_Xi(CoeffVector<double>::unit(1, 5, p), 4);
      CHECK(d1[0] == doctest::Approx(std::sqrt(2 * s / (1 + 2 * sigma))).epsilon(1e-14));
      CHECK(d1[2] == 0.0);
      const auto d3 = apply_Xi(CoeffVector<double>::unit(3, 5, p), 4);
      CHECK(d3[0] == doctest::Approx(-std::sqrt(2 * 2 * s / ((3 + 2 * sigma) * (1 + 2 * sigma)))).epsilon(1e-14));
      CHECK(d3[2] == doctest::Approx(std::sqrt(2 * s / (3 + 2 * sigma))).epsilon(1e-14));
      CHECK(d3[4] == 0.0);
      const auto X = M(OperatorKind::inverse_x_Xi, p, 41);
      for (std::size_t k = 1; k <= 41; k += 2)
        for (std::size_t l = 0; l < k; l += 2)
          CHECK(X(Eigen::Index(l), Eigen::Index(k)) == doctest::Approx(oracle::xi_coefficient(k, l, sigma, s)).epsilon(1e-12));
    }
  }
}

TEST_CASE("division by x matches quadrature of phi_l phi_3 / x") {
  const SigmaParams<double> p(0.5, 1.0);
  const auto d3 = apply_Xi(CoeffVector<double>::unit(3, 5, p), 4);
  const auto c = analyze([&](double x) { return eval_phi(3, x, p) / x; }, std::size_t{4}, build_rule(20, SigmaParams<double>(0.5, 1.0)));
  for (std::size_t l = 0; l <= 4; ++l) CHECK(std::abs(c[l] - d3[l]) <= 1e-12);
}

TEST_CASE("division by x pointwise") {
  std::mt19937_64 rng(11);
  for (double sigma : kSigmas) {
    const SigmaParams<double> p(sigma, 1.0);
    for (int t = 0; t < 10; ++t) {
      const auto c = random_odd(p, 31, rng);
      const auto d = apply_Xi(c, 30);
      double worst = 0;
      for (double x = -6; x <= 6; x += 0.05) {
        if (std::abs(x) < 0.1) continue;
        worst = std::max(worst, std::abs(synthesize_at(d, x) - synthesize_at(c, x) / x));
      }
      CHECK(worst <= 1e-8);
    }
  }
}

TEST_CASE("ordinary derivative") {
  const SigmaParams<double> p(0.8, 1.0);
  Vector<double> v = Vector<double>::Zero(16);
  v(1) = 1;
  v(2) = -0.3;
  v(5) = 0.25;
  const CoeffVector<double> c(v, p);
  const auto dc = apply_D(c);
  for (double x : {-2.2, -0.4, 0.3, 1.7}) {
    double d1, d2;
    oracle::fd12([&](double y) { return synthesize_at(c, y); }, x, 1e-3, d1, d2);
    CHECK(synthesize_at(dc, x) == doctest::Approx(d1).epsilon(1e-9));
  }
  const SigmaParams<double> q(0.0, 1.0);
  const CoeffVector<double> cq(v, q);
  CHECK((apply_D(cq).coeffs - apply_T(cq).coeffs).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pointwise Dunkl operator") {
  for (double sigma : {-0.3, 0.0, 0.5, 1.7}) {
    const SigmaParams<double> p(sigma, 1.0);
    GridFunction<double> g0{{}, {}, Parity::even}, g5{{}, {}, Parity::odd}, lin{{}, {}, Parity::odd};
    for (int i = 0; i <= 1000; ++i) {
      const double x = 8.0 * i / 1000;
      g0.nodes.push_back(x);
      g0.values.push_back(eval_phi(0, x, p));
      g5.nodes.push_back(x);
      g5.values.push_back(eval_phi(5, x, p));
    }
    for (int i = 0; i <= 40; ++i) {
      lin.nodes.push_back(i * 0.05);
      lin.values.push_back(i * 0.05);
    }
    const auto t0 = apply_T_pointwise(g0, p, 0);
    const auto t5 = apply_T_pointwise(g5, p, 5);
    const auto spectral = apply_T(CoeffVector<double>::unit(5, 8, p));
    CHECK(t0.parity == std::optional<Parity>(Parity::odd));
    double e0 = 0, e5 = 0;
    for (std::size_t i = 0; i < g0.size(); ++i) {
      const double x = g0.nodes[i];
      if (x > 4) break;
      e0 = std::max(e0, std::abs(t0.values[i] + x * eval_phi(0, x, p)));
      e5 = std::max(e5, std::abs(t5.values[i] - synthesize_at(spectral, x)));
    }
    CHECK(e0 <= 1e-6);
    CHECK(e5 <= 1e-6);
    const auto tl = apply_T_pointwise(lin, p, 1);
    for (double v : tl.values) CHECK(v == doctest::Approx(1 + 2 * sigma).epsilon(1e-9));
  }
  const SigmaParams<double> p(0.5, 1.0);
  GridFunction<double> coarse{{}, {}, Parity::even};
  for (int i = 0; i <= 20; ++i) {
    coarse.nodes.push_back(0.5 * i);
    coarse.values.push_back(eval_phi(0, 0.5 * i, p));
  }
  CHECK_THROWS_AS(apply_T_pointwise(coarse, p, 0), ValidationError);
  GridFunction<double> mixed = coarse;
  mixed.parity.reset();
  CHECK_THROWS_AS(apply_T_pointwise(mixed, p, 0), ValidationError);
}

TEST_CASE("Dunkl operator on monomials") {
  // T (a0 + a1 x + a2 x^2 + a3 x^3) = (1+2s)a1 + 2 a2 x + (3+2s) a3 x^2
  const auto r = dunkl_monomial(std::vector<double>{5, 1, 1, 1}, 0.5);
  CHECK(r == std::vector<double>{2, 2, 4});
  CHECK(dunkl_monomial(std::vector<double>{3}, 0.5) == std::vector<double>{0});
  CHECK(dunkl_monomial(std::vector<double>{0, 1}, 0.0) == std::vector<double>{1});
}

TEST_CASE("long double instantiation") {
  const SigmaParams<long double> p(0.5L, 1.0L);
  const auto r = apply_Xi(CoeffVector<long double>::unit(1, 3, p), 2);
  CHECK(double(r[0]) == doctest::Approx(1.0));
  const auto l = apply_L(apply_x(CoeffVector<long double>::unit(0, 3, p)));
  // x phi_0 = phi_1 at sigma = 1/2, s = 1
  CHECK(double(l[1]) == doctest::Approx(4.0));
}
