#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dunkl/quadrature.hpp"
#include "oracles.hpp"

#ifdef DUNKL_HAVE_BOOST
#include <boost/math/quadrature/gauss_kronrod.hpp>
#endif

using namespace dunkl;

namespace {

// 2 int_0^50 g(x) dx by an adaptive rule independent of the library.
double half_line_integral(const std::function<double(double)>& g) {
#ifdef DUNKL_HAVE_BOOST
  return 2 * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, 0.0, 50.0, 15, 1e-15);
#else
  return 2 * oracle::exp_sinh([&](double x) { return x <= 50 ? g(x) : 0.0; }, 1.0 / 256, -6, 3.5);
#endif
}

}  // namespace

TEST_CASE("single node rule") {
  const auto rule = build_rule(1, SigmaParams<double>(0.0, 1.0));
  REQUIRE(rule.size() == 1);
  CHECK(rule.nodes[0] == 0.0);
  CHECK(rule.weights[0] == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-15));
}

TEST_CASE("second moment against adaptive integration") {
  const SigmaParams<double> p(0.5, 1.0);
  const auto rule = build_rule(8, p);
  double m2 = 0, n1 = 0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double x = rule.nodes[i];
    m2 += rule.weights[i] * x * x;
    n1 += rule.weights[i] * std::pow(eval_p(1, x, p), 2);
  }
  const double ref = half_line_integral([](double x) { return x * x * x * std::exp(-x * x); });
  CHECK(m2 == doctest::Approx(ref).epsilon(1e-13));
  CHECK(m2 == doctest::Approx(std::tgamma(2.0)).epsilon(1e-13));
  CHECK(std::abs(n1 - 1) <= 1e-13);
}

TEST_CASE("16-node rule is exact for p_j p_k up to degree 31") {
  const SigmaParams<double> p(1.7, 1.0);
  const auto rule = build_rule(16, p);
  double worst = 0;
  for (std::size_t j = 0; j < 32; ++j)
    for (std::size_t k = 0; j + k <= 31; ++k) {
      double acc = 0;
      for (std::size_t i = 0; i < rule.size(); ++i) acc += rule.weights[i] * eval_p(j, rule.nodes[i], p) * eval_p(k, rule.nodes[i], p);
      worst = std::max(worst, std::abs(acc - (j == k ? 1.0 : 0.0)));
    }
  CHECK(worst <= 1e-11);
}

TEST_CASE("rules are symmetric, positive and carry the total mass") {
  for (double sigma : {-0.4, 0.0, 0.5, 1.7}) {
    for (double s : {0.5, 2.0}) {
      const SigmaParams<double> p(sigma, s);
      for (std::size_t N : {2u, 10u, 64u, 256u}) {
        const auto rule = build_rule(N, p);
        REQUIRE(rule.size() == N);
        double mass = 0;
        for (std::size_t i = 0; i < N; ++i) {
          CHECK(rule.nodes[i] == -rule.nodes[N - 1 - i]);
          if (i > 0) CHECK(rule.nodes[i] > rule.nodes[i - 1]);
          CHECK(rule.phi_weights[i] > 0);
          CHECK(rule.weights[i] >= 0);
          mass += rule.weights[i];
        }
        CHECK(mass == doctest::Approx(total_mass(p)).epsilon(1e-12));
        CHECK(total_mass(p) == doctest::Approx(std::tgamma(sigma + 0.5) * std::pow(s, -sigma - 0.5)));
      }
    }
  }
}

TEST_CASE("odd node counts are refused for sigma < 0") {
  CHECK_THROWS_AS(build_rule(7, SigmaParams<double>(-0.2, 1.0)), ValidationError);
  CHECK_NOTHROW(build_rule(7, SigmaParams<double>(0.2, 1.0)));
  CHECK_THROWS_AS(build_rule(0, SigmaParams<double>(0.2, 1.0)), ValidationError);
  CHECK(default_node_count(41, SigmaParams<double>(-0.2, 1.0)) % 2 == 0);
  CHECK(default_node_count(10, SigmaParams<double>(0.0, 1.0)) == 18);
}

TEST_CASE("analyze phi_3 gives e_3") {
  for (double sigma : {-0.4, 0.0, 1.7}) {
    const SigmaParams<double> p(sigma, 1.3);
    const auto c = analyze([&](double x) { return eval_phi(3, x, p); }, std::size_t{20}, p);
    REQUIRE(c.parity.has_value());
    CHECK(*c.parity == Parity::odd);
    for (std::size_t k = 0; k <= 20; ++k) CHECK(std::abs(c[k] - (k == 3 ? 1.0 : 0.0)) <= 1e-11);
  }
}

TEST_CASE("analyze x exp(-s x^2/2)") {
  const SigmaParams<double> p(0.5, 1.0);
  const auto c = analyze([](double x) { return x * std::exp(-x * x / 2); }, std::size_t{12}, p);
  CHECK(c[1] == doctest::Approx(1.0).epsilon(1e-13));
  for (std::size_t k = 0; k <= 12; ++k)
    if (k != 1) CHECK(std::abs(c[k]) <= 1e-13);
  // generally c_1 = sqrt(2(1+2 sigma)s)/(2 s p_0)
  const SigmaParams<double> q(0.5, 2.0);
  const auto d = analyze([](double x) { return x * std::exp(-x * x); }, std::size_t{6}, q);
  CHECK(d[1] == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("synthesize basics") {
  const SigmaParams<double> p(0.5, 1.0);
  const std::vector<double> nodes{-2.0, -0.3, 0.0, 1.1, 4.0};
  const auto g = synthesize(CoeffVector<double>::unit(0, 5, p), nodes);
  for (std::size_t i = 0; i < nodes.size(); ++i) CHECK(g.values[i] == eval_phi(0, nodes[i], p));
  const auto z = synthesize(CoeffVector<double>::zero(5, p), nodes);
  for (double v : z.values) CHECK(v == 0.0);
  CHECK(synthesize_at(CoeffVector<double>::unit(2, 5, p), 0.7) == doctest::Approx(eval_phi(2, 0.7, p)));
}

TEST_CASE("round trip with geometrically decaying coefficients") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1, 1);
  for (double sigma : {-0.4, 0.0, 0.5, 1.7}) {
    const SigmaParams<double> p(sigma, 1.0);
    const std::size_t K = 40;
    Vector<double> v(K + 1);
    for (std::size_t k = 0; k <= K; ++k) v(static_cast<Eigen::Index>(k)) = u(rng) * std::pow(2.0, -double(k));
    const CoeffVector<double> c(v, p);
    const auto back = analyze([&](double x) { return synthesize_at(c, x); }, K, p);
    CHECK((back.coeffs - c.coeffs).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK(!back.parity.has_value());
  }
}

TEST_CASE("Parseval") {
  const SigmaParams<double> p(0.8, 1.0);
  Vector<double> v(11);
  for (Eigen::Index k = 0; k <= 10; ++k) v(k) = std::pow(-0.6, double(k));
  const CoeffVector<double> c(v, p);
  const auto rule = build_rule(24, p);
  const double n2 = weighted_norm_sq([&](double x) { return synthesize_at(c, x); }, rule);
  CHECK(n2 == doctest::Approx(v.squaredNorm()).epsilon(1e-13));
}

TEST_CASE("grid functions") {
  const SigmaParams<double> p(0.5, 1.0);
  SUBCASE("samples on the default rule are integrated exactly") {
    const std::size_t K = 10;
    const auto rule = build_rule(default_node_count(K, p), p);
    GridFunction<double> g{rule.nodes, {}, std::nullopt};
    for (double x : g.nodes) g.values.push_back(eval_phi(4, x, p) - 0.5 * eval_phi(7, x, p));
    const auto c = analyze(g, K, p);
    CHECK(c[4] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c[7] == doctest::Approx(-0.5).epsilon(1e-12));
  }
  SUBCASE("off-rule samples of an even half grid are fitted") {
    GridFunction<double> g{{}, {}, Parity::even};
    for (int i = 0; i <= 200; ++i) {
      const double x = 8.0 * i / 200;
      g.nodes.push_back(x);
      g.values.push_back(eval_phi(2, x, p));
    }
    const auto c = analyze(g, 12, p);
    CHECK(c[2] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(c.parity == std::optional<Parity>(Parity::even));
  }
  SUBCASE("unfold reflects odd data") {
    const GridFunction<double> g{{0.0, 1.0, 2.0}, {0.0, 3.0, 5.0}, Parity::odd};
    const auto f = unfold(g);
    CHECK(f.nodes == std::vector<double>{-2, -1, 0, 1, 2});
    CHECK(f.values == std::vector<double>{-5, -3, 0, 3, 5});
  }
  SUBCASE("bad grids") {
    const GridFunction<double> bad{{0.0, 0.0}, {1.0, 2.0}, std::nullopt};
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    const GridFunction<double> few{{0.0, 1.0}, {1.0, 2.0}, std::nullopt};
    CHECK_THROWS_AS(analyze(few, 4, p), ValidationError);
  }
}

TEST_CASE("coefficient vectors") {
  const SigmaParams<double> p(0.0, 1.0);
  auto c = CoeffVector<double>::unit(3, 6, p);
  CHECK(c.order() == 6);
  CHECK(c.parity == std::optional<Parity>(Parity::odd));
  const auto r = resized(c, 2);
  CHECK(r.order() == 2);
  CHECK(r.coeffs.isZero());
  Vector<double> v(4);
  v << 1, 1e-16, 2, 0;
  CoeffVector<double> d(v, p);
  detect_parity(d);
  CHECK(d.parity == std::optional<Parity>(Parity::even));
  CHECK(d[1] == 0.0);
  const auto o = project(CoeffVector<double>(v, p), Parity::odd);
  CHECK(o[0] == 0.0);
  CHECK(o[1] == 1e-16);
  CHECK(o[2] == 0.0);
  CHECK_THROWS_AS(CoeffVector<double>(Vector<double>(0), p), ValidationError);
}

TEST_CASE("truncation warning") {
  const SigmaParams<double> p(0.0, 1.0);
  const auto c = analyze([&](double x) { return eval_phi(0, x, p) + eval_phi(8, x, p); }, std::size_t{8}, p);
  CHECK(c.truncation_warning);
  const auto d = analyze([&](double x) { return eval_phi(0, x, p); }, std::size_t{8}, p);
  CHECK(!d.truncation_warning);
}

TEST_CASE("long double instantiation") {
  const SigmaParams<long double> p(1.7L, 1.0L);
  const auto rule = build_rule(16, p);
  long double mass = 0;
  for (auto w : rule.weights) mass += w;
  CHECK(double(mass) == doctest::Approx(double(total_mass(p))).epsilon(1e-15));
  const auto c = analyze([&](long double x) { return eval_phi(5, x, p); }, std::size_t{10}, p);
  CHECK(std::abs(double(c[5]) - 1) <= 1e-15);
}
