// Acceptance checks: one PASS/FAIL line per criterion.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/expm1.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/hypergeometric_pFq.hpp>

#include "kober/error.hpp"
#include "kober/matgamma.hpp"
#include "kober/matrix_ops.hpp"
#include "kober/montecarlo.hpp"
#include "kober/mtransform.hpp"
#include "kober/randmat.hpp"
#include "kober/scalar_ops.hpp"
#include "kober/spd.hpp"

using namespace kober;

namespace {

constexpr std::uint64_t kSeed = 20240611;

double tg(double x) { return std::tgamma(x); }

double gp(int p, double a) {
  double r = std::pow(std::numbers::pi, 0.25 * p * (p - 1));
  for (int i = 0; i < p; ++i) r *= tg(a - 0.5 * i);
  return r;
}

double beta_moment(int p, double a, double b, double h) {
  return gp(p, a + h) * gp(p, a + b) / (gp(p, a) * gp(p, a + b + h));
}

double rel(double got, double exact) { return std::abs(got - exact) / std::abs(exact); }

struct Check {
  bool pass = true;
  std::string detail;

  void fail(const std::string& what) {
    if (pass) detail = what;
    pass = false;
  }
  void expect(bool ok, const std::string& what) {
    if (!ok) fail(what);
  }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// ----------------------------------------------------------------- 1

Check scalar_closed_forms() {
  Check c;
  double worst = 0.0;
  auto take = [&](double got, double exact, const std::string& id) {
    const double e = rel(got, exact);
    worst = std::max(worst, e);
    c.expect(e < 1e-8, id + fmt(" rel err %.3g", e));
  };
  for (double zeta : {0.0, 0.5, 2.0})
    for (double alpha : {0.3, 1.0, 2.5})
      for (double lambda : {0.0, 1.0, 2.5}) {
        const double u = 1.7;
        take(kober_first({ScalarOpKind::kober1, alpha, zeta}, TestFunction1D::power(lambda), u).value,
             std::pow(u, lambda) * tg(zeta + lambda + 1) / tg(zeta + lambda + 1 + alpha), "kober1");
      }
  for (double zeta : {0.0, 0.5, 2.0})
    for (double alpha : {0.3, 1.0, 2.5})
      for (double lambda : {1.0, 2.0, 3.5}) {
        const double u = 0.8;
        take(kober_second({ScalarOpKind::kober2, alpha, zeta}, TestFunction1D::power(-lambda), u).value,
             std::pow(u, -lambda) * tg(zeta + lambda) / tg(zeta + lambda + alpha), "kober2");
      }
  for (double alpha : {0.3, 1.0, 2.5})
    for (double lambda : {0.0, 1.0, 2.5}) {
      const double x = 1.3;
      take(riemann_liouville({ScalarOpKind::riemann_liouville, alpha}, TestFunction1D::power(lambda), x).value,
           tg(lambda + 1) / tg(lambda + 1 + alpha) * std::pow(x, lambda + alpha), "rl");
    }
  for (double alpha : {0.3, 1.0, 2.5})
    for (double x : {0.0, 1.0, 5.0})
      take(weyl_right({ScalarOpKind::weyl_right, alpha}, TestFunction1D::exp_decay(), x).value, std::exp(-x),
           "weyl-right");
  if (c.pass) c.detail = fmt("72 cases, max rel err %.2g", worst);
  return c;
}

// ----------------------------------------------------------------- 2

Check saigo() {
  Check c;
  std::mt19937_64 g(kSeed);
  std::uniform_real_distribution<double> U(0.2, 2.0);
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    const double zeta = U(g), alpha = U(g), u = U(g), lambda = U(g);
    ScalarOpSpec s{ScalarOpKind::saigo1, alpha, zeta};
    s.saigo_beta = -alpha;
    s.saigo_gamma = 0.3 + U(g);
    const double k = kober_first({ScalarOpKind::kober1, alpha, zeta}, TestFunction1D::power(lambda), u).value;
    const double e = rel(saigo_first(s, TestFunction1D::power(lambda), u).value, k);
    worst = std::max(worst, e);
    c.expect(e < 1e-9, fmt("reduction rel err %.3g", e));
  }
  const struct {
    double zeta, alpha, beta, gamma, lambda, u;
  } cases[] = {{0.5, 0.5, 0.25, 0.5, 1.0, 1.0}, {1.0, 0.5, 0.25, 0.5, 2.0, 1.5}, {0.0, 1.5, -0.3, 0.8, 0.5, 0.7}};
  double worst2 = 0.0;
  for (const auto& q : cases) {
    ScalarOpSpec s{ScalarOpKind::saigo1, q.alpha, q.zeta};
    s.saigo_beta = q.beta;
    s.saigo_gamma = q.gamma;
    boost::math::quadrature::tanh_sinh<double> ts;
    const double h = ts.integrate(
        [&](double v) {
          return std::pow(q.u - v, q.alpha - 1) * std::pow(v, q.zeta + q.lambda) *
                 boost::math::hypergeometric_pFq({q.alpha + q.beta, -q.gamma}, {q.alpha}, 1.0 - v / q.u);
        },
        0.0, q.u);
    const double exact = std::pow(q.u, -q.alpha - q.zeta) * h / tg(q.alpha);
    const double e = rel(saigo_first(s, TestFunction1D::power(q.lambda), q.u).value, exact);
    worst2 = std::max(worst2, e);
    c.expect(e < 1e-7, fmt("general case rel err %.3g", e));
  }
  if (c.pass) c.detail = fmt("reduction max %.2g, general max %.2g", worst, worst2);
  return c;
}

// ----------------------------------------------------------------- 3

Check frac_deriv() {
  Check c;
  double worst = 0.0;
  for (double alpha : {0.3, 0.7, 1.5})
    for (double lambda : {1.0, 2.5}) {
      const double x = 1.2;
      const double exact = tg(lambda + 1) / tg(lambda + 1 - alpha) * std::pow(x, lambda - alpha);
      const double e = rel(frac_derivative(alpha, TestFunction1D::power(lambda), x).value, exact);
      worst = std::max(worst, e);
      c.expect(e < 1e-5, fmt("D^%g x^%g rel err %.3g", alpha, lambda, e));
      const ScalarOpSpec rl{ScalarOpKind::riemann_liouville, alpha};
      const TestFunction1D integ = TestFunction1D::callback(
          [&](double v) { return riemann_liouville(rl, TestFunction1D::power(lambda), v).value; }, 0.0, 4);
      const double e2 = rel(frac_derivative(alpha, integ, x).value, std::pow(x, lambda));
      worst = std::max(worst, e2);
      c.expect(e2 < 1e-5, fmt("D^%g I^%g rel err %.3g", alpha, alpha, e2));
    }
  if (c.pass) c.detail = fmt("12 cases, max rel err %.2g", worst);
  return c;
}

// ----------------------------------------------------------------- 4

double det_dense(std::vector<double> a, int n) {
  double d = 1.0;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(a[r * n + c]) > std::abs(a[piv * n + c])) piv = r;
    if (piv != c) {
      for (int j = 0; j < n; ++j) std::swap(a[c * n + j], a[piv * n + j]);
      d = -d;
    }
    d *= a[c * n + c];
    for (int r = c + 1; r < n; ++r) {
      const double m = a[r * n + c] / a[c * n + c];
      for (int j = c; j < n; ++j) a[r * n + j] -= m * a[c * n + j];
    }
  }
  return d;
}

// |det| of the central-difference Jacobian
double fd_absdet(const std::function<std::vector<double>(const std::vector<double>&)>& f, std::vector<double> x) {
  const int n = int(x.size());
  std::vector<double> jac(n * n);
  for (int j = 0; j < n; ++j) {
    const double h = 1e-5 * std::max(1.0, std::abs(x[j]));
    const double x0 = x[j];
    x[j] = x0 + h;
    const std::vector<double> fp = f(x);
    x[j] = x0 - h;
    const std::vector<double> fm = f(x);
    x[j] = x0;
    for (int i = 0; i < n; ++i) jac[i * n + j] = (fp[i] - fm[i]) / (2 * h);
  }
  return std::abs(det_dense(jac, n));
}

std::vector<double> flat(const std::vector<SymMat>& ms) {
  std::vector<double> v;
  for (const SymMat& m : ms)
    for (double x : m.packed()) v.push_back(x);
  return v;
}

std::vector<SymMat> unflat(int p, const std::vector<double>& v) {
  const int n = SymMat::packed_size(p);
  std::vector<SymMat> out;
  for (std::size_t i = 0; i < v.size(); i += n)
    out.push_back(SymMat::from_packed(p, std::span<const double>(v).subspan(i, n)));
  return out;
}

Check jacobians() {
  Check c;
  std::mt19937_64 g(kSeed + 4);
  std::normal_distribution<double> N;
  std::uniform_real_distribution<double> U(0.1, 0.9);
  auto spd = [&](int p) {
    Mat b(p);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j) b(i, j) = N(g);
    return congruence(b, SymMat::identity(p)) + SymMat::scalar(p, 0.5);
  };
  // O < Y < I from eigenvalues in (0.1, 0.9) and a random rotation
  auto unit = [&](int p) {
    SymMat y(p);
    if (p == 1) return SymMat::scalar(1, U(g));
    const double t = 2 * std::numbers::pi * U(g), l1 = U(g), l2 = U(g);
    const double cs = std::cos(t), sn = std::sin(t);
    y.set(0, 0, l1 * cs * cs + l2 * sn * sn);
    y.set(0, 1, (l1 - l2) * cs * sn);
    y.set(1, 1, l1 * sn * sn + l2 * cs * cs);
    return y;
  };
  double worst = 0.0;
  auto take = [&](double closed, double fd, const std::string& id) {
    const double e = rel(closed, fd);
    worst = std::max(worst, e);
    c.expect(e < 1e-3, id + fmt(" rel err %.3g", e));
  };
  for (int p : {1, 2}) {
    for (int t = 0; t < 20; ++t) {
      Mat a(p);
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) a(i, j) = N(g) + (i == j ? 1.5 : 0.0);
      const SymMat x = spd(p);
      take(jac_congruence(a),
           fd_absdet([&](const std::vector<double>& v) { return flat({congruence(a, unflat(p, v)[0])}); }, flat({x})),
           "congruence");
      const SymMat y = spd(p);
      take(jac_inverse(y),
           fd_absdet([&](const std::vector<double>& v) { return flat({inverse(unflat(p, v)[0])}); }, flat({y})),
           "inverse");
    }
    for (int k : {1, 2})
      for (int t = 0; t < 20; ++t) {
        std::vector<SymMat> ys;
        for (int j = 0; j < k; ++j) ys.push_back(unit(p));
        take(jac_dirichlet_chain(ys),
             fd_absdet([&](const std::vector<double>& v) { return flat(dirichlet_chain_forward(unflat(p, v))); },
                       flat(ys)),
             "dirichlet-chain");
      }
  }
  if (c.pass) c.detail = fmt("160 points, max rel err %.2g", worst);
  return c;
}

// ----------------------------------------------------------------- 5

Check matrix_beta() {
  Check c;
  const double a = 2.0, b = 1.5;
  // box 0 < x11, x22 < 1, -1 < x12 < 1 has volume 2
  const McEstimate e = mc_mean(MCConfig{2000000, kSeed}, [&](Rng& r) {
    const double x11 = r.uniform(), x22 = r.uniform(), x12 = 2.0 * r.uniform() - 1.0;
    const double dx = x11 * x22 - x12 * x12, di = (1 - x11) * (1 - x22) - x12 * x12;
    if (dx <= 0 || di <= 0) return 0.0;
    return 2.0 * std::pow(dx, a - 1.5) * std::pow(di, b - 1.5);
  });
  const double lib = gamma_p(2, a) * gamma_p(2, b) / gamma_p(2, a + b);
  const double z = std::abs(e.mean - lib) / e.se;
  c.expect(z < 3.0, fmt("beta integral %.6g vs %.6g (z = %.2f)", e.mean, lib, z));
  c.expect(rel(lib, gp(2, a) * gp(2, b) / gp(2, a + b)) < 1e-12, "Gamma_2 disagrees with the product formula");
  double worst = 0.0;
  for (int p = 1; p <= 3; ++p)
    for (double al : {1.3, 2.0, 3.7, 6.25}) {
      double prod = 1.0;
      for (int i = 0; i < p; ++i) prod *= al - 0.5 * i;
      const double er = rel(gamma_p(p, al + 1) / gamma_p(p, al), prod);
      worst = std::max(worst, er);
      c.expect(er < 1e-12, fmt("recurrence p=%g rel err %.3g", p, er));
    }
  for (double al = 0.5; al <= 10.0; al += 0.25) {
    const double er = rel(gamma_p(1, al), tg(al));
    worst = std::max(worst, er);
    c.expect(er < 1e-12, fmt("p=1 reduction at %g rel err %.3g", al, er));
  }
  if (c.pass) c.detail = fmt("z = %.2f, identities max rel err %.2g", z, worst);
  return c;
}

// ----------------------------------------------------------------- 6

Check dirichlet_chain() {
  Check c;
  const int p = 2;
  double worst = 0.0;
  Rng rng({kSeed, 0});
  for (int t = 0; t < 200; ++t) {
    std::vector<SymMat> y;
    for (int j = 0; j < 3; ++j) y.push_back(sample_matrix_beta({p, 2.0, 2.0}, rng));
    const std::vector<SymMat> x = dirichlet_chain_forward(y);
    const std::vector<SymMat> back = inverse_dirichlet_chain(x);
    const std::vector<SymMat> x2 = dirichlet_chain_forward(back);
    for (int j = 0; j < 3; ++j)
      worst = std::max({worst, (back[j] - y[j]).frobenius_norm(), (x2[j] - x[j]).frobenius_norm()});
  }
  c.expect(worst < 1e-10, fmt("round trip error %.3g", worst));
  const std::vector<double> zeta{1.0, 0.5};
  const std::vector<double> b = param_chain({ChainRule::dirichlet_scaled, p, zeta, {}, 2.5});
  const DirichletChainParams cp{p, zeta, b};
  const std::vector<McEstimate> e = mc_mean_vec(MCConfig{100000, kSeed, 32, false, 32}, 2, [&](Rng& r, std::span<double> out) {
    const std::vector<SymMat> y = inverse_dirichlet_chain(sample_dirichlet_chain(cp, r));
    out[0] = determinant(y[0]);
    out[1] = determinant(y[1]);
  });
  double zmax = 0.0;
  for (int j = 0; j < 2; ++j) {
    const double exact = beta_moment(p, zeta[j] + 1.5, b[j], 1.0);
    const double z = std::abs(e[j].mean - exact) / e[j].se;
    zmax = std::max(zmax, z);
    c.expect(z < 3.0, fmt("Y_%g moment z = %.2f", j + 1, z));
  }
  if (c.pass) c.detail = fmt("round trip %.2g, max z %.2f", worst, zmax);
  return c;
}

// ----------------------------------------------------------------- 7

double slope(const std::vector<double>& n, const std::vector<double>& se) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    mx += std::log(n[i]);
    my += std::log(se[i]);
  }
  mx /= n.size();
  my /= n.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    sxy += (std::log(n[i]) - mx) * (std::log(se[i]) - my);
    sxx += std::pow(std::log(n[i]) - mx, 2);
  }
  return sxy / sxx;
}

Check estimator_consistency() {
  Check c;
  const std::vector<SymMat> u{SymMat::scalar(1, 1.6)};
  double zmax = 0.0;
  auto take = [&](const McEstimate& e, double q, const std::string& id) {
    const double z = std::abs(e.mean - q) / e.se;
    zmax = std::max(zmax, z);
    c.expect(z < 3.0, id + fmt(" z = %.2f", z));
  };
  std::uint64_t off = 0;
  for (double lambda : {0.5, 1.5}) {
    const MatrixOpParams pr{OperatorKind::second, 1, {{1.0, 0.5}}};
    take(kober_matrix_second(pr, MatrixTestFunction::det_power(-lambda), u, MCConfig{100000, kSeed, 32, false, off}),
         kober_second({ScalarOpKind::kober2, 0.5, 1.0}, TestFunction1D::power(-lambda), 1.6).value, "second");
    off += 32;
  }
  for (const auto& [zeta, alpha] : {std::pair{0.5, 1.5}, std::pair{2.0, 0.7}}) {
    const MatrixOpParams pr{OperatorKind::first, 1, {{zeta, alpha}}};
    take(kober_matrix_first(pr, MatrixTestFunction::exp_neg_trace(), u, MCConfig{100000, kSeed, 32, false, off}),
         kober_first({ScalarOpKind::kober1, alpha, zeta}, TestFunction1D::exp_decay(), 1.6).value, "first");
    off += 32;
  }
  std::vector<double> ns{1e4, 1e5, 1e6}, ses;
  const MatrixOpParams pr{OperatorKind::second, 1, {{1.0, 0.5}}};
  for (double n : ns) {
    ses.push_back(kober_matrix_second(pr, MatrixTestFunction::exp_neg_trace(), u,
                                      MCConfig{std::size_t(n), kSeed, 32, false, off})
                      .se);
    off += 32;
  }
  const double sl = slope(ns, ses);
  c.expect(std::abs(sl + 0.5) <= 0.05, fmt("s.e. slope %.3f", sl));
  if (c.pass) c.detail = fmt("max z %.2f, s.e. slope %.3f", zmax, sl);
  return c;
}

// ----------------------------------------------------------------- 8, 9

// M-transform of the Wishart(df) density at p: E|V|^(s-(p+1)/2)
double wishart_mt(int p, double df, double s) {
  const double h = s - 0.5 * (p + 1);
  return std::pow(2.0, p * h) * gp(p, 0.5 * df + h) / gp(p, 0.5 * df);
}

Check transform(OperatorKind kind) {
  Check c;
  const bool first = kind == OperatorKind::first;
  double worst_q = 0.0, worst_mc = 0.0, zmax = 0.0;
  auto ratio = [&](int p, double zeta, double alpha, double s) {
    return first ? gp(p, 0.5 * (p + 1) + zeta - s) / gp(p, 0.5 * (p + 1) + zeta + alpha - s)
                 : gp(p, zeta + s) / gp(p, zeta + alpha + s);
  };
  auto quad = [&](const MatrixOpParams& pr, const MatrixTestFunction& f, const MPoint& s, double rhs) {
    const double e = std::abs(mtransform_operator_quad(pr, f, s) / rhs - 1.0);
    worst_q = std::max(worst_q, e);
    c.expect(e < 1e-6, fmt("p=1 k=%g s=%g |lhs/rhs-1| = %.3g", pr.k(), s.s[0], e));
  };
  if (first) {
    const MatrixOpParams k1{kind, 1, {{1.0, 0.5}}};
    for (double s : {0.8, 1.2, 1.5, 1.8, 1.95}) quad(k1, MatrixTestFunction::exp_neg_trace(), {{s}}, tg(s) * ratio(1, 1.0, 0.5, s));
    // |V|^(1.7-1) e^-V per factor: transform Gamma(s + 0.7)
    const MatrixOpParams k2{kind, 1, {{2.5, 0.5}, {3.0, 1.5}}};
    for (auto [s1, s2] : {std::pair{1.5, 2.0}, {2.0, 2.5}, {2.5, 1.5}, {3.0, 3.0}, {2.0, 3.5}})
      quad(k2, MatrixTestFunction::det_power_times_exp(1.7), {{s1, s2}},
           tg(s1 + 0.7) * tg(s2 + 0.7) * ratio(1, 2.5, 0.5, s1) * ratio(1, 3.0, 1.5, s2));
    bool threw = false;
    try {
      mtransform_operator_quad(k1, MatrixTestFunction::exp_neg_trace(), {{2.0}});
    } catch (const Error&) {
      threw = true;
    }
    c.expect(threw, "first-kind domain bound s < zeta + 1 not enforced");
  } else {
    const MatrixOpParams k1{kind, 1, {{1.0, 0.5}}};
    for (double s : {0.8, 1.5, 2.0, 3.0, 4.0}) quad(k1, MatrixTestFunction::exp_neg_trace(), {{s}}, tg(s) * ratio(1, 1.0, 0.5, s));
    const MatrixOpParams k2{kind, 1, {{1.0, 0.5}, {0.5, 1.5}}};
    for (auto [s1, s2] : {std::pair{1.5, 2.0}, {2.0, 2.5}, {2.5, 1.5}, {3.0, 3.0}, {2.0, 3.5}})
      quad(k2, MatrixTestFunction::exp_neg_trace(), {{s1, s2}},
           tg(s1) * tg(s2) * ratio(1, 1.0, 0.5, s1) * ratio(1, 0.5, 1.5, s2));
  }
  const MatrixOpParams pr{kind, 2, {{2.0, 1.5}}};
  const std::vector<double> grid = first ? std::vector<double>{0.7, 0.9, 1.1, 1.3, 1.5}
                                         : std::vector<double>{0.9, 1.3, 1.7, 2.1, 2.5};
  std::uint64_t off = 0;
  for (double s : grid) {
    const McEstimate e = mtransform_operator_mc(pr, MatrixTestFunction::wishart_density(3.0), {{s}},
                                                MCConfig{1000000, kSeed, 32, false, off});
    off += 32;
    const double rhs = wishart_mt(2, 3.0, s) * ratio(2, 2.0, 1.5, s);
    const double z = std::abs(e.mean - rhs) / e.se, r = rel(e.mean, rhs);
    zmax = std::max(zmax, z);
    worst_mc = std::max(worst_mc, r);
    c.expect(z < 3.0 && r < 0.02, fmt("p=2 s=%g z = %.2f rel = %.3g", s, z, r));
  }
  if (c.pass) c.detail = fmt("quadrature max %.2g; MC max z %.2f, max rel %.3g", worst_q, zmax, worst_mc);
  return c;
}

// ----------------------------------------------------------------- 10

Check density_identity() {
  Check c;
  const int p = 2;
  const MatrixTestFunction f = MatrixTestFunction::wishart_density(3.0);
  const auto vs = f.density_sampler(p, 1);
  double zmax = 0.0;
  std::uint64_t off = 0;
  for (OperatorKind kind : {OperatorKind::second, OperatorKind::first}) {
    const double zeta = 2.0, alpha = 1.5;
    const auto draw = density_mode_sampler(kind, p, {zeta}, {alpha}, vs);
    const double dc = density_constant(kind, p, std::vector<double>{zeta}, std::vector<double>{alpha});
    const std::vector<double> grid = kind == OperatorKind::second ? std::vector<double>{1.2, 1.6, 2.0}
                                                                   : std::vector<double>{1.2, 1.4, 1.6};
    for (double s : grid) {
      const McEstimate m = mc_mean(MCConfig{1000000, kSeed, 32, false, off},
                                   [&](Rng& r) { return std::pow(determinant(draw(r)[0]), s - 1.5); });
      const McEstimate op = mtransform_operator_mc({kind, p, {{zeta, alpha}}}, f, {{s}},
                                                   MCConfig{1000000, kSeed, 32, false, off + 32});
      off += 64;
      const double lhs = dc * m.mean, se = std::hypot(dc * m.se, op.se);
      const double z = std::abs(lhs - op.mean) / se;
      zmax = std::max(zmax, z);
      c.expect(z < 3.0, (kind == OperatorKind::first ? "first" : "second") + fmt(" s=%g z = %.2f", s, z));
    }
  }
  if (c.pass) c.detail = fmt("6 points, max z %.2f", zmax);
  return c;
}

// ----------------------------------------------------------------- 11

struct RunResult {
  int status = -1;
  std::string out;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

RunResult run(const std::string& args, const std::string& out, const std::string& env = "") {
  std::remove(out.c_str());
  const std::string cmd = env + " " + KOBER_CLI + " " + args + " --out " + out + " 2>/dev/null";
  const int st = std::system(cmd.c_str());
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, slurp(out)};
}

bool exists(const std::string& path) { return std::ifstream(path).good(); }

Check cli() {
  Check c;
  const std::string dir = std::string(ACCEPT_TMP) + "/";
  for (const std::string suite : {"jacobians", "dirichlet-chain", "beta-moments"})
    for (const std::string format : {"json", "csv"}) {
      const std::string args = "verify --suite " + suite + " --p 2 --seed 11 --format " + format;
      const RunResult a = run(args, dir + "a.out"), b = run(args, dir + "b.out");
      c.expect(!a.out.empty() && a.out == b.out, suite + " " + format + " output differs between runs");
      const bool any_fail = format == "json" ? a.out.find("\"pass\": false") != std::string::npos
                                             : a.out.find(",false\r\n") != std::string::npos;
      c.expect(a.status == (any_fail ? 1 : 0) && b.status == a.status, suite + " exit status does not match cases");
    }
  // KOBER_SEED replaces only the default seed
  const std::string args = "verify --suite jacobians --p 2";
  const RunResult env = run(args, dir + "e.out", "KOBER_SEED=11");
  const RunResult flag = run(args + " --seed 11", dir + "f.out");
  const RunResult both = run(args + " --seed 11", dir + "g.out", "KOBER_SEED=99");
  c.expect(env.out == flag.out && both.out == flag.out, "seed precedence violated");
  const RunResult unknown = run("verify --suite no-such-suite", dir + "u.out");
  c.expect(unknown.status == 2 && !exists(dir + "u.out"), "unknown suite: expected exit 2 and no file");
  const RunResult bad = run("eval --op kober1 --alpha abc --u 1 --f power:1", dir + "m.out");
  c.expect(bad.status == 2 && !exists(dir + "m.out"), "malformed flag: expected exit 2 and no file");
  const RunResult empty = run("table --op mtransform-second --p 1 --zeta 1 --alpha 0.5 --f exp-trace", dir + "t.out");
  c.expect(empty.status == 2 && !exists(dir + "t.out"), "empty grid: expected exit 2 and no file");
  const RunResult dom = run("eval --op kober2 --alpha 0.5 --zeta -3 --u 1 --f power:-1", dir + "d.out");
  c.expect(dom.status == 2 && !exists(dir + "d.out"), "domain error: expected exit 2 and no file");
  const RunResult ok = run("eval --op kober1 --alpha 0.5 --zeta 1 --u 1.5 --f power:2", dir + "o.out");
  c.expect(ok.status == 0 && !ok.out.empty(), "eval: expected exit 0 with output");
  if (c.pass) c.detail = "byte-identical reruns, exit statuses 0/1/2 as specified";
  return c;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Check()> run;
  };
  const std::vector<Criterion> all{
      {1, "scalar closed forms", 5, scalar_closed_forms},
      {2, "Saigo reduction and oracle", 10, saigo},
      {3, "fractional derivative", 5, frac_deriv},
      {4, "Jacobians vs finite differences", 10, jacobians},
      {5, "matrix beta integral and Gamma_p", 60, matrix_beta},
      {6, "Dirichlet chain", 60, dirichlet_chain},
      {7, "operator estimator consistency", 120, estimator_consistency},
      {8, "second-kind M-transform", 180, [] { return transform(OperatorKind::second); }},
      {9, "first-kind M-transform", 180, [] { return transform(OperatorKind::first); }},
      {10, "density identity", 120, density_identity},
      {11, "CLI determinism and exit statuses", 10, cli},
  };
  int failed = 0;
  for (const Criterion& cr : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Check c;
    try {
      c = cr.run();
    } catch (const std::exception& e) {
      c.fail(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > cr.budget_s) c.fail(fmt("runtime %.1f s over budget %.0f s", secs, cr.budget_s));
    failed += !c.pass;
    std::printf("%s  [%2d] %-36s %s (%.1f s)\n", c.pass ? "PASS" : "FAIL", cr.id, cr.name, c.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", int(all.size()) - failed, all.size());
  return failed ? 1 : 0;
}
