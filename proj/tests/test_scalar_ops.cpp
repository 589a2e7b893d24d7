#include <cmath>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/expm1.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/hypergeometric_pFq.hpp>

#include "doctest.h"
#include "kober/error.hpp"
#include "kober/hypergeometric.hpp"
#include "kober/montecarlo.hpp"
#include "kober/scalar_ops.hpp"

using namespace kober;

namespace {

double tg(double x) { return std::tgamma(x); }

ScalarOpSpec spec(ScalarOpKind k, double alpha, double zeta = 0.0) {
  ScalarOpSpec s;
  s.kind = k;
  s.alpha = alpha;
  s.zeta = zeta;
  return s;
}

}  // namespace

TEST_CASE("kober_first examples") {
  const auto k1 = spec(ScalarOpKind::kober1, 1.0, 0.0);
  for (double u : {0.3, 1.0, 7.0}) CHECK(kober_first(k1, TestFunction1D::power(0.0), u).value == doctest::Approx(1.0));
  const auto s = spec(ScalarOpKind::kober1, 0.5, 1.0);
  CHECK(kober_first(s, TestFunction1D::power(2.0), 1.0).value == doctest::Approx(6.0 / tg(4.5)).epsilon(1e-10));
  const double ref = kober_first(s, TestFunction1D::power(1.3), 1.0).value;
  for (double u : {0.5, 1.0, 2.0})
    CHECK(kober_first(s, TestFunction1D::power(1.3), u).value / std::pow(u, 1.3) == doctest::Approx(ref).epsilon(1e-10));
}

TEST_CASE("kober_first power law grid") {
  for (double zeta : {0.0, 0.5, 2.0})
    for (double alpha : {0.3, 1.0, 2.5})
      for (double lambda : {0.0, 1.0, 2.5}) {
        const double u = 0.8;
        const double exact = std::pow(u, lambda) * tg(zeta + lambda + 1) / tg(zeta + lambda + 1 + alpha);
        CHECK(kober_first(spec(ScalarOpKind::kober1, alpha, zeta), TestFunction1D::power(lambda), u).value ==
              doctest::Approx(exact).epsilon(1e-8));
      }
}

TEST_CASE("kober_second examples and power law grid") {
  CHECK(kober_second(spec(ScalarOpKind::kober2, 0.5, 1.0), TestFunction1D::power(-1.0), 2.0).value ==
        doctest::Approx(0.5 / tg(2.5)).epsilon(1e-10));
  CHECK(kober_second(spec(ScalarOpKind::kober2, 1.0, 0.0), TestFunction1D::power(-2.0), 1.0).value ==
        doctest::Approx(0.5).epsilon(1e-10));
  for (double zeta : {0.0, 0.5, 2.0})
    for (double alpha : {0.3, 1.0, 2.5})
      for (double lambda : {1.0, 2.0, 3.5})
        for (double u : {0.5, 2.0}) {
          const double exact = std::pow(u, -lambda) * tg(zeta + lambda) / tg(zeta + lambda + alpha);
          CHECK(kober_second(spec(ScalarOpKind::kober2, alpha, zeta), TestFunction1D::power(-lambda), u).value ==
                doctest::Approx(exact).epsilon(1e-8));
        }
}

TEST_CASE("kober_second on exp against tanh-sinh") {
  // u^zeta / Gamma(alpha) int_u^inf v^(-zeta-alpha) (v-u)^(alpha-1) e^-v dv
  boost::math::quadrature::tanh_sinh<double> ts;
  for (double u : {0.05, 1.0, 6.0}) {
    const double zeta = 1.0, alpha = 0.5;
    auto g = [&](double w) { return std::pow(u + w, -zeta - alpha) * std::pow(w, alpha - 1) * std::exp(-u - w); };
    const double exact = std::pow(u, zeta) * ts.integrate(g, 0.0, std::numeric_limits<double>::infinity()) / tg(alpha);
    CHECK(kober_second(spec(ScalarOpKind::kober2, alpha, zeta), TestFunction1D::exp_decay(), u).value ==
          doctest::Approx(exact).epsilon(1e-8));
  }
}

TEST_CASE("kober_second rejects a divergent tail") {
  CHECK_THROWS_AS(kober_second(spec(ScalarOpKind::kober2, 0.5, 0.2), TestFunction1D::power(1.0), 1.0), Error);
  CHECK_THROWS_AS(kober_first(spec(ScalarOpKind::kober1, 0.5, -1.2), TestFunction1D::power(1.0), 1.0), Error);
}

TEST_CASE("Riemann-Liouville") {
  const auto rl = spec(ScalarOpKind::riemann_liouville, 0.5);
  CHECK(riemann_liouville(rl, TestFunction1D::power(1.0), 1.0).value == doctest::Approx(1.0 / tg(2.5)).epsilon(1e-10));
  auto one = spec(ScalarOpKind::riemann_liouville, 1.0);
  one.lower = -0.7;
  CHECK(riemann_liouville(one, TestFunction1D::power(0.0), 2.0).value == doctest::Approx(2.7).epsilon(1e-10));
  // semigroup: I^0.5 I^0.5 v^2 = I^1 v^2 = x^3 / 3
  const TestFunction1D inner = TestFunction1D::callback(
      [&](double v) { return riemann_liouville(rl, TestFunction1D::power(2.0), v).value; }, 0.0, 8);
  CHECK(riemann_liouville(rl, inner, 1.0).value == doctest::Approx(1.0 / 3.0).epsilon(1e-7));
}

TEST_CASE("Weyl integrals") {
  for (double alpha : {0.3, 1.0, 2.5})
    for (double x : {0.0, 1.0, 5.0})
      CHECK(weyl_right(spec(ScalarOpKind::weyl_right, alpha), TestFunction1D::exp_decay(), x).value ==
            doctest::Approx(std::exp(-x)).epsilon(1e-7));
  CHECK(weyl_right(spec(ScalarOpKind::weyl_right, 1.0), TestFunction1D::power(-3.0), 2.0).value ==
        doctest::Approx(0.125).epsilon(1e-8));
  // left Weyl of e^v is e^x
  const TestFunction1D ev = TestFunction1D::callback([](double v) { return std::exp(v); },
                                                     TestFunction1D::infinity(), 8);
  CHECK(weyl_left(spec(ScalarOpKind::weyl_left, 0.7), ev, 0.4).value == doctest::Approx(std::exp(0.4)).epsilon(1e-7));
}

TEST_CASE("gauss_2f1") {
  CHECK(gauss_2f1(0.0, 2.0, 3.0, 0.7) == doctest::Approx(1.0));
  CHECK(gauss_2f1(0.5, 1.3, 1.3, 0.36) == doctest::Approx(1.25).epsilon(1e-12));
  CHECK(gauss_2f1(1.0, 1.0, 2.0, 0.5) == doctest::Approx(-std::log(0.5) / 0.5).epsilon(1e-12));
  for (double z : {0.1, 0.6, 0.95})
    CHECK(gauss_2f1(0.75, -0.5, 0.5, z) ==
          doctest::Approx(boost::math::hypergeometric_pFq({0.75, -0.5}, {0.5}, z)).epsilon(1e-10));
}

TEST_CASE("Saigo reductions and oracle") {
  std::mt19937_64 g(31);
  std::uniform_real_distribution<double> U(0.2, 2.0);
  for (int t = 0; t < 10; ++t) {
    const double zeta = U(g), alpha = U(g), u = U(g), lambda = U(g);
    ScalarOpSpec s = spec(ScalarOpKind::saigo1, alpha, zeta);
    s.saigo_beta = -alpha;
    s.saigo_gamma = 0.7;
    const double k = kober_first(spec(ScalarOpKind::kober1, alpha, zeta), TestFunction1D::power(lambda), u).value;
    CHECK(saigo_first(s, TestFunction1D::power(lambda), u).value == doctest::Approx(k).epsilon(1e-9));
    s.saigo_beta = 0.4;
    s.saigo_gamma = 0.0;
    CHECK(saigo_first(s, TestFunction1D::power(lambda), u).value == doctest::Approx(k).epsilon(1e-9));
  }
  ScalarOpSpec s = spec(ScalarOpKind::saigo1, 0.5, 0.5);
  s.saigo_beta = 0.25;
  s.saigo_gamma = 0.5;
  boost::math::quadrature::tanh_sinh<double> ts;
  for (double lambda : {0.0, 1.0, 2.5}) {
    const double u = 1.3;
    auto f = [&](double v) {
      return std::pow(u - v, -0.5) * std::pow(v, 0.5 + lambda) *
             boost::math::hypergeometric_pFq({0.75, -0.5}, {0.5}, 1.0 - v / u);
    };
    const double exact = std::pow(u, -1.0) * ts.integrate(f, 0.0, u) / tg(0.5);
    CHECK(saigo_first(s, TestFunction1D::power(lambda), u).value == doctest::Approx(exact).epsilon(1e-7));
  }
}

TEST_CASE("fractional derivative") {
  CHECK(frac_derivative(0.5, TestFunction1D::power(1.0), 1.0).value == doctest::Approx(2.0 / std::sqrt(M_PI)).epsilon(1e-8));
  CHECK(frac_derivative(1.0, TestFunction1D::power(2.0), 3.0).value == doctest::Approx(6.0).epsilon(1e-8));
  for (double alpha : {0.3, 0.7, 1.5})
    for (double lambda : {1.0, 2.5}) {
      const double x = 1.4;
      const double exact = tg(lambda + 1) / tg(lambda + 1 - alpha) * std::pow(x, lambda - alpha);
      CHECK(frac_derivative(alpha, TestFunction1D::power(lambda), x).value == doctest::Approx(exact).epsilon(1e-5));
    }
}

TEST_CASE("derivative undoes the integral on callbacks") {
  for (double alpha : {0.3, 0.7, 1.5})
    for (double lambda : {1.0, 2.5}) {
      const ScalarOpSpec rl = spec(ScalarOpKind::riemann_liouville, alpha);
      const TestFunction1D integ = TestFunction1D::callback(
          [&](double v) { return riemann_liouville(rl, TestFunction1D::power(lambda), v).value; }, 0.0, 4);
      const double x = 1.1;
      CHECK(frac_derivative(alpha, integ, x).value == doctest::Approx(std::pow(x, lambda)).epsilon(1e-5));
    }
  // D^0.5 D^0.5 x = 1
  const TestFunction1D half = TestFunction1D::callback(
      [](double v) { return frac_derivative(0.5, TestFunction1D::power(1.0), v).value; }, 0.0, 4);
  CHECK(frac_derivative(0.5, half, 0.9).value == doctest::Approx(1.0).epsilon(1e-5));
  const TestFunction1D rough = TestFunction1D::callback([](double v) { return v; });
  CHECK_THROWS_AS(frac_derivative(0.5, rough, 1.0), Error);
}

TEST_CASE("multivariable operators") {
  const std::vector<KernelPair> one{{1.0, 0.5}};
  const double u1[] = {1.7};
  CHECK(multivar_op(OperatorKind::first, one, MultiFunction::separable({TestFunction1D::power(2.0)}), u1).value ==
        doctest::Approx(kober_first(spec(ScalarOpKind::kober1, 0.5, 1.0), TestFunction1D::power(2.0), 1.7).value)
            .epsilon(1e-12));
  const std::vector<KernelPair> two{{1.0, 0.5}, {0.5, 1.5}};
  const double u2[] = {1.3, 0.6};
  const MultiFunction sep = MultiFunction::separable({TestFunction1D::power(2.0), TestFunction1D::power(0.5)});
  const double exact = std::pow(1.3, 2.0) * tg(4.0) / tg(4.5) * std::pow(0.6, 0.5) * tg(2.0) / tg(3.5);
  CHECK(multivar_op(OperatorKind::first, two, sep, u2).value == doctest::Approx(exact).epsilon(1e-8));
  const MultiFunction gen = MultiFunction::general(
      [](std::span<const double> v) { return std::pow(v[0], 2.0) * std::pow(v[1], 0.5); }, {0.0, 0.0}, 8);
  CHECK(multivar_op(OperatorKind::first, two, gen, u2).value == doctest::Approx(exact).epsilon(1e-8));
  const std::vector<KernelPair> ones{{0.0, 1.0}, {0.0, 1.0}};
  const MultiFunction unit = MultiFunction::general([](std::span<const double>) { return 1.0; }, {0.0, 0.0}, 8);
  CHECK(multivar_op(OperatorKind::first, ones, unit, u2).value == doctest::Approx(1.0));
  const MultiFunction sep2 = MultiFunction::separable({TestFunction1D::power(-2.0), TestFunction1D::power(-1.0)});
  const double exact2 = std::pow(1.3, -2.0) * tg(3.0) / tg(3.5) * std::pow(0.6, -1.0) * tg(1.5) / tg(3.0);
  CHECK(multivar_op(OperatorKind::second, two, sep2, u2).value == doctest::Approx(exact2).epsilon(1e-8));
}

TEST_CASE("multivariable fractional derivative") {
  const double al[] = {0.5, 0.3};
  const double x[] = {1.2, 0.8};
  const MultiFunction sep = MultiFunction::separable({TestFunction1D::power(1.0), TestFunction1D::power(2.0)});
  const double exact = tg(2.0) / tg(1.5) * std::pow(1.2, 0.5) * tg(3.0) / tg(2.7) * std::pow(0.8, 1.7);
  CHECK(multivar_frac_derivative(al, sep, x).value == doctest::Approx(exact).epsilon(1e-4));
  const double ints[] = {1.0, 1.0};
  const MultiFunction gen = MultiFunction::general(
      [](std::span<const double> v) { return v[0] * v[0] * v[1] * v[1] * v[1]; }, {0.0, 0.0}, 6);
  CHECK(multivar_frac_derivative(ints, gen, x).value == doctest::Approx(2 * 1.2 * 3 * 0.64).epsilon(1e-4));
}

TEST_CASE("first-kind output is a ratio density") {
  // u = x2 / x1 with x1 ~ beta(zeta, alpha), x2 ~ Exp(1): density Gamma(zeta+alpha)/Gamma(zeta) K1 f(u)
  const double zeta = 1.5, alpha = 0.5;
  const ScalarOpSpec s = spec(ScalarOpKind::kober1, alpha, zeta);
  const int bins = 20;
  const double width = 0.25;
  const std::size_t n = 100000;
  MCConfig mc{n, 77};
  const std::vector<McEstimate> h = mc_mean_vec(mc, bins, [&](Rng& r, std::span<double> out) {
    const double u = r.gamma(1.0) / r.beta(zeta, alpha);
    std::fill(out.begin(), out.end(), 0.0);
    const int b = int(u / width);
    if (b < bins) out[b] = 1.0;
  });
  const double c = tg(zeta + alpha) / tg(zeta);
  for (int b = 0; b < bins; ++b) {
    auto dens = [&](double u) { return c * kober_first(s, TestFunction1D::exp_decay(), u).value; };
    const double p = boost::math::quadrature::gauss<double, 20>::integrate(dens, b * width, (b + 1) * width);
    CHECK(std::abs(h[b].mean - p) < 3.0 * std::max(h[b].se, std::sqrt(p * (1 - p) / n)) + 1e-12);
  }
}
