#include "kober/suites.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/expm1.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/hypergeometric_pFq.hpp>

#include "json.hpp"
#include "kober/error.hpp"
#include "kober/matgamma.hpp"
#include "kober/matrix_ops.hpp"
#include "kober/mtransform.hpp"
#include "kober/randmat.hpp"
#include "kober/scalar_ops.hpp"
#include "kober/spd.hpp"

namespace kober {

namespace {

// std::tgamma based, kept apart from the library's Lanczos ln_gamma
double tg(double x) { return std::tgamma(x); }

double gamma2(double a) { return std::sqrt(std::numbers::pi) * tg(a) * tg(a - 0.5); }

double gamma_p_ref(int p, double a) {
  double r = std::pow(std::numbers::pi, 0.25 * p * (p - 1));
  for (int i = 0; i < p; ++i) r *= tg(a - 0.5 * i);
  return r;
}

// E|X| for X ~ beta_p(a, b)
double beta_det_moment(int p, double a, double b, double h) {
  return gamma_p_ref(p, a + h) * gamma_p_ref(p, a + b) / (gamma_p_ref(p, a) * gamma_p_ref(p, a + b + h));
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

void add_rel(SuiteResult& r, std::string id, std::string ref, double expected, double got, double rel) {
  add_case(r, std::move(id), std::move(ref), expected, got, 0.0, rel * std::abs(expected));
}

SymMat random_spd(int p, Rng& rng) {
  Mat b(p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) b(i, j) = rng.normal();
  return congruence(b, SymMat::identity(p)) + SymMat::scalar(p, 0.5);
}

SuiteResult scalar_closed_forms(const SuiteOptions&) {
  SuiteResult r;
  const QuadConfig q;
  for (double zeta : {0.0, 0.5, 2.0})
    for (double alpha : {0.3, 1.0, 2.5})
      for (double lambda : {0.0, 1.0, 2.5}) {
        const double u = 1.7;
        const ScalarOpSpec spec{ScalarOpKind::kober1, alpha, zeta};
        const double exact = std::pow(u, lambda) * tg(zeta + lambda + 1) / tg(zeta + lambda + 1 + alpha);
        add_rel(r, "kober1/zeta=" + num(zeta) + "/alpha=" + num(alpha) + "/lambda=" + num(lambda),
                "first-kind Kober on v^lambda", exact, kober_first(spec, TestFunction1D::power(lambda), u, q).value,
                1e-8);
      }
  for (double zeta : {0.0, 0.5, 2.0})
    for (double alpha : {0.3, 1.0, 2.5})
      for (double lambda : {1.0, 2.0, 3.5}) {
        const double u = 1.7;
        const ScalarOpSpec spec{ScalarOpKind::kober2, alpha, zeta};
        const double exact = std::pow(u, -lambda) * tg(zeta + lambda) / tg(zeta + lambda + alpha);
        add_rel(r, "kober2/zeta=" + num(zeta) + "/alpha=" + num(alpha) + "/lambda=" + num(lambda),
                "second-kind Kober on v^-lambda", exact,
                kober_second(spec, TestFunction1D::power(-lambda), u, q).value, 1e-8);
      }
  for (double alpha : {0.3, 1.0, 2.5})
    for (double lambda : {0.0, 1.0, 2.5}) {
      const double x = 1.3;
      const ScalarOpSpec spec{ScalarOpKind::riemann_liouville, alpha};
      const double exact = tg(lambda + 1) / tg(lambda + 1 + alpha) * std::pow(x, lambda + alpha);
      add_rel(r, "rl/alpha=" + num(alpha) + "/lambda=" + num(lambda), "Riemann-Liouville on v^lambda", exact,
              riemann_liouville(spec, TestFunction1D::power(lambda), x, q).value, 1e-8);
    }
  for (double alpha : {0.3, 1.0, 2.5})
    for (double x : {0.0, 1.0, 5.0}) {
      const ScalarOpSpec spec{ScalarOpKind::weyl_right, alpha};
      add_rel(r, "weyl-right/alpha=" + num(alpha) + "/x=" + num(x), "right Weyl integral of exp(-v)", std::exp(-x),
              weyl_right(spec, TestFunction1D::exp_decay(), x, q).value, 1e-8);
    }
  for (double alpha : {0.3, 0.7, 1.5})
    for (double lambda : {1.0, 2.5}) {
      const double x = 1.2;
      const double exact = tg(lambda + 1) / tg(lambda + 1 - alpha) * std::pow(x, lambda - alpha);
      add_rel(r, "frac-derivative/alpha=" + num(alpha) + "/lambda=" + num(lambda),
              "Riemann-Liouville derivative of v^lambda", exact,
              frac_derivative(alpha, TestFunction1D::power(lambda), x, q).value, 1e-5);
    }
  // Saigo against an adaptive tanh-sinh integral of the defining kernel
  const struct {
    double zeta, alpha, beta, gamma, lambda, u;
  } saigo[] = {{0.5, 0.5, 0.25, 0.5, 1.0, 1.0}, {1.0, 0.5, 0.25, 0.5, 2.0, 1.5}, {0.0, 1.5, -0.3, 0.8, 0.5, 0.7}};
  for (const auto& c : saigo) {
    ScalarOpSpec spec{ScalarOpKind::saigo1, c.alpha, c.zeta};
    spec.saigo_beta = c.beta;
    spec.saigo_gamma = c.gamma;
    boost::math::quadrature::tanh_sinh<double> ts;
    auto integrand = [&](double t) {
      const double h = boost::math::hypergeometric_pFq({c.alpha + c.beta, -c.gamma}, {c.alpha}, 1.0 - t);
      return std::pow(1.0 - t, c.alpha - 1) * std::pow(t, c.zeta + c.lambda) * h;
    };
    const double exact = std::pow(c.u, c.lambda) * ts.integrate(integrand, 0.0, 1.0) / tg(c.alpha);
    add_rel(r, "saigo/zeta=" + num(c.zeta) + "/alpha=" + num(c.alpha) + "/beta=" + num(c.beta),
            "Saigo operator on v^lambda", exact, saigo_first(spec, TestFunction1D::power(c.lambda), c.u, q).value,
            1e-7);
  }
  return r;
}

std::vector<double> packed_of(std::span<const SymMat> ms) {
  std::vector<double> out;
  for (const SymMat& m : ms)
    for (double x : m.packed()) out.push_back(x);
  return out;
}

std::vector<SymMat> unpack(int p, std::span<const double> v) {
  const int n = SymMat::packed_size(p);
  std::vector<SymMat> out;
  for (std::size_t i = 0; i + n <= v.size(); i += n) out.push_back(SymMat::from_packed(p, v.subspan(i, n)));
  return out;
}

SuiteResult jacobians(const SuiteOptions& opt) {
  if (opt.p < 1 || opt.p > 2) throw Error(ErrorCode::InvalidArgument, "jacobians suite runs at p = 1 or 2");
  const int p = opt.p;
  SuiteResult r;
  Rng rng({opt.seed, 0});
  for (int i = 0; i < 20; ++i) {
    Mat a(p);
    for (int x = 0; x < p; ++x)
      for (int y = 0; y < p; ++y) a(x, y) = rng.normal() + (x == y ? 1.5 : 0.0);
    const SymMat x0 = random_spd(p, rng);
    auto map = [&](std::span<const double> v) {
      return congruence(a, SymMat::from_packed(p, v)).packed_vector();
    };
    const double fd = fd_jacobian_det(map, x0.packed_vector()).abs_det;
    add_rel(r, "congruence/" + std::to_string(i), "Jacobian of X -> A X A'", jac_congruence(a), fd, 1e-3);
  }
  for (int i = 0; i < 20; ++i) {
    const SymMat y0 = random_spd(p, rng);
    auto map = [&](std::span<const double> v) { return inverse(SymMat::from_packed(p, v)).packed_vector(); };
    const double fd = fd_jacobian_det(map, y0.packed_vector()).abs_det;
    add_rel(r, "inverse/" + std::to_string(i), "Jacobian of X = Y^-1", jac_inverse(y0), fd, 1e-3);
  }
  for (int k : {1, 2}) {
    for (int i = 0; i < 20; ++i) {
      std::vector<SymMat> y;
      for (int j = 0; j < k; ++j) y.push_back(sample_matrix_beta({p, 2.0 + p, 2.0 + p}, rng));
      auto map = [&](std::span<const double> v) {
        const std::vector<SymMat> ys = unpack(p, v);
        const std::vector<SymMat> xs = dirichlet_chain_forward(ys);
        return packed_of(xs);
      };
      const double fd = fd_jacobian_det(map, packed_of(y)).abs_det;
      add_rel(r, "dirichlet-chain/k=" + std::to_string(k) + "/" + std::to_string(i), "Jacobian of the Dirichlet chain map",
              jac_dirichlet_chain(y), fd, 1e-3);
    }
  }
  return r;
}

SuiteResult beta_moments(const SuiteOptions& opt) {
  SuiteResult r;
  const std::size_t n = opt.n_samples ? opt.n_samples : 100000;
  const struct {
    int p;
    double a, b;
  } grid[] = {{2, 2.0, 1.5}, {2, 3.0, 3.0}, {3, 2.5, 2.0}};
  std::uint64_t offset = 0;
  for (const auto& g : grid) {
    MCConfig mc{n, opt.seed, 32, false, offset};
    offset += 32;
    const BetaMatParams bp{g.p, g.a, g.b};
    const McEstimate e = mc_mean(mc, [&](Rng& rng) { return determinant(sample_matrix_beta(bp, rng)); });
    const std::string tag = "p=" + std::to_string(g.p) + "/a=" + num(g.a) + "/b=" + num(g.b);
    add_case(r, "det-moment/" + tag, "type-1 matrix beta determinant moment", beta_det_moment(g.p, g.a, g.b, 1.0),
             e.mean, e.se, 3.0 * e.se);
    // I - X ~ beta(b, a)
    MCConfig mc2{n, opt.seed, 32, false, offset};
    offset += 32;
    const McEstimate e2 = mc_mean(mc2, [&](Rng& rng) {
      const SymMat x = sample_matrix_beta(bp, rng);
      return determinant(SymMat::identity(g.p) - x);
    });
    add_case(r, "reflection/" + tag, "I - X is matrix beta with swapped shapes", beta_det_moment(g.p, g.b, g.a, 1.0),
             e2.mean, e2.se, 3.0 * e2.se);
  }
  {
    // type-1 beta integral at p = 2 by uniform sampling of the box 0 < x11, x22 < 1, |x12| < 1
    const double a = 2.0, b = 1.5;
    MCConfig mc{opt.n_samples ? opt.n_samples : 2000000, opt.seed, 32, false, offset};
    offset += 32;
    const McEstimate e = mc_mean(mc, [&](Rng& rng) {
      const double x11 = rng.uniform(), x22 = rng.uniform(), x12 = 2.0 * rng.uniform() - 1.0;
      const double dx = x11 * x22 - x12 * x12;
      const double di = (1 - x11) * (1 - x22) - x12 * x12;
      if (dx <= 0 || di <= 0 || x11 >= 1 || x22 >= 1) return 0.0;
      return 2.0 * std::pow(dx, a - 1.5) * std::pow(di, b - 1.5);
    });
    add_case(r, "beta-integral/p=2", "type-1 matrix beta integral equals Gamma_p(a)Gamma_p(b)/Gamma_p(a+b)",
             gamma2(a) * gamma2(b) / gamma2(a + b), e.mean, e.se, 3.0 * e.se);
  }
  for (double alpha = 0.5; alpha <= 10.0; alpha += 0.5)
    add_case(r, "gamma-p1/alpha=" + num(alpha), "Gamma_1 is the scalar gamma", std::lgamma(alpha),
             ln_gamma_p(1, alpha), 0.0, 1e-13 * std::max(1.0, std::abs(std::lgamma(alpha))));
  for (int p = 1; p <= 3; ++p)
    for (double alpha : {1.3, 2.0, 3.7}) {
      double prod = 1.0;
      for (int i = 0; i < p; ++i) prod *= alpha - 0.5 * i;
      add_rel(r, "gamma-p-recurrence/p=" + std::to_string(p) + "/alpha=" + num(alpha),
              "Gamma_p(alpha+1)/Gamma_p(alpha) = prod(alpha - i/2)", prod, gamma_p(p, alpha + 1) / gamma_p(p, alpha),
              1e-12);
    }
  return r;
}

SuiteResult dirichlet_chain(const SuiteOptions& opt) {
  SuiteResult r;
  const int p = opt.p < 1 ? 2 : opt.p;
  if (p > 3) throw Error(ErrorCode::InvalidArgument, "dirichlet-chain suite runs at p <= 3");
  {
    Rng rng({opt.seed, 0});
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      std::vector<SymMat> y;
      for (int j = 0; j < 3; ++j) y.push_back(sample_matrix_beta({p, 1.0 + 0.5 * p, 1.0 + 0.5 * p}, rng));
      const std::vector<SymMat> x = dirichlet_chain_forward(y);
      const std::vector<SymMat> back = inverse_dirichlet_chain(x);
      for (int j = 0; j < 3; ++j) worst = std::max(worst, (back[j] - y[j]).frobenius_norm());
      const std::vector<SymMat> x2 = dirichlet_chain_forward(back);
      for (int j = 0; j < 3; ++j) worst = std::max(worst, (x2[j] - x[j]).frobenius_norm());
    }
    add_case(r, "round-trip/k=3", "forward and inverse chain maps are inverse", 0.0, worst, 0.0, 1e-10);
  }
  const std::size_t n = opt.n_samples ? opt.n_samples : 100000;
  const std::vector<double> zeta{1.0, 0.5};
  const double tail = 1.0 + 0.5 * (p + 1);
  const double h = 0.5 * (p + 1);
  // shapes of the Dirichlet (a_1, a_2; a_3) the chain should reproduce
  const double a1 = zeta[0] + h, a2 = zeta[1] + h, a3 = tail;
  std::uint64_t offset = 32;
  for (ChainRule rule : {ChainRule::dirichlet_scaled, ChainRule::dirichlet}) {
    if (rule == ChainRule::dirichlet && p != 1) continue;
    const std::string rname = rule == ChainRule::dirichlet ? "verbatim" : "scaled";
    const std::vector<double> second = param_chain({rule, p, zeta, {}, tail});
    if (!chain_shapes_valid(p, second)) throw Error(ErrorCode::ChainDomainError, "chain shapes out of domain");
    const DirichletChainParams cp{p, zeta, second};
    MCConfig mc{n, opt.seed, 32, false, offset};
    offset += 32;
    const std::vector<McEstimate> e = mc_mean_vec(mc, 6, [&](Rng& rng, std::span<double> out) {
      const std::vector<SymMat> x = sample_dirichlet_chain(cp, rng);
      const std::vector<SymMat> y = inverse_dirichlet_chain(x);
      const double d1 = determinant(y[0]), d2 = determinant(y[1]);
      out[0] = d1;
      out[1] = d2;
      out[2] = d1 * d2;
      out[3] = determinant(x[0]);
      out[4] = determinant(x[1]);
      out[5] = determinant(SymMat::identity(p) - x[0] - x[1]);
    });
    const std::string tag = rname + "/p=" + std::to_string(p);
    const double m1 = beta_det_moment(p, a1, second[0], 1.0);
    const double m2 = beta_det_moment(p, a2, second[1], 1.0);
    add_case(r, "y1-moment/" + tag, "recovered Y_1 is matrix beta", m1, e[0].mean, e[0].se, 3.0 * e[0].se);
    add_case(r, "y2-moment/" + tag, "recovered Y_2 is matrix beta", m2, e[1].mean, e[1].se, 3.0 * e[1].se);
    add_case(r, "y1y2-product/" + tag, "recovered Y_1, Y_2 independent", m1 * m2, e[2].mean, e[2].se, 3.0 * e[2].se);
    add_case(r, "x1-moment/" + tag, "X_1 marginal of the matrix Dirichlet", beta_det_moment(p, a1, a2 + a3, 1.0),
             e[3].mean, e[3].se, 3.0 * e[3].se);
    add_case(r, "x2-moment/" + tag, "X_2 marginal of the matrix Dirichlet", beta_det_moment(p, a2, a1 + a3, 1.0),
             e[4].mean, e[4].se, 3.0 * e[4].se);
    add_case(r, "rest-moment/" + tag, "I - X_1 - X_2 of the matrix Dirichlet", beta_det_moment(p, a3, a1 + a2, 1.0),
             e[5].mean, e[5].se, 3.0 * e[5].se);
  }
  return r;
}

struct TransformCase {
  MatrixOpParams params;
  MatrixTestFunction f;
  std::vector<MPoint> grid;
  std::string tag;
};

std::vector<TransformCase> transform_cases(OperatorKind kind, int p) {
  std::vector<TransformCase> out;
  const bool first = kind == OperatorKind::first;
  if (p == 1) {
    if (first) {
      out.push_back({{kind, 1, {{1.0, 0.5}}},
                     MatrixTestFunction::exp_neg_trace(),
                     {{{0.8}}, {{1.2}}, {{1.5}}, {{1.8}}, {{1.95}}},
                     "k=1/exp"});
      out.push_back({{kind, 1, {{2.5, 0.5}, {3.0, 1.5}}},
                     MatrixTestFunction::det_power_times_exp(1.7),
                     {{{1.5, 2.0}}, {{2.0, 2.5}}, {{2.5, 1.5}}, {{3.0, 3.0}}, {{2.0, 3.5}}},
                     "k=2/det-power-exp"});
    } else {
      out.push_back({{kind, 1, {{1.0, 0.5}}},
                     MatrixTestFunction::exp_neg_trace(),
                     {{{0.8}}, {{1.5}}, {{2.0}}, {{3.0}}, {{4.0}}},
                     "k=1/exp"});
      out.push_back({{kind, 1, {{1.0, 0.5}, {0.5, 1.5}}},
                     MatrixTestFunction::exp_neg_trace(),
                     {{{1.5, 2.0}}, {{2.0, 2.5}}, {{2.5, 1.5}}, {{3.0, 3.0}}, {{2.0, 3.5}}},
                     "k=2/exp"});
    }
  } else if (p == 2) {
    const std::vector<MPoint> grid = first ? std::vector<MPoint>{{{0.7}}, {{0.9}}, {{1.1}}, {{1.3}}, {{1.5}}}
                                           : std::vector<MPoint>{{{0.9}}, {{1.3}}, {{1.7}}, {{2.1}}, {{2.5}}};
    out.push_back({{kind, 2, {{2.0, 1.5}}}, MatrixTestFunction::wishart_density(3.0), grid, "k=1/wishart"});
  } else {
    throw Error(ErrorCode::InvalidArgument, "M-transform suites run at p = 1 or 2");
  }
  return out;
}

SuiteResult mtransform_suite(OperatorKind kind, const SuiteOptions& opt) {
  SuiteResult r;
  const std::string ref =
      kind == OperatorKind::first ? "first-kind M-transform gamma ratio" : "second-kind M-transform gamma ratio";
  MCConfig mc{opt.n_samples ? opt.n_samples : 1000000, opt.seed};
  const TransformTolerance tol;
  for (const TransformCase& c : transform_cases(kind, opt.p)) {
    const std::vector<TransformReport> reps = verify_transform(c.params, c.f, c.grid, mc, {}, tol);
    mc.stream_offset += c.grid.size() * mc.n_streams;
    for (const TransformReport& t : reps) {
      std::string id = "p=" + std::to_string(opt.p) + "/" + c.tag + "/s=";
      for (std::size_t j = 0; j < t.s.size(); ++j) id += (j ? "," : "") + num(t.s[j]);
      SuiteCase sc{id, ref, t.rhs, t.lhs, t.lhs_se, t.tol, t.pass};
      if (!t.error.empty()) {
        sc.paper_ref += " (" + t.error + ")";
        sc.pass = false;
      }
      r.cases.push_back(sc);
    }
  }
  return r;
}

SuiteResult density_identity(const SuiteOptions& opt) {
  SuiteResult r;
  const int p = opt.p;
  if (p < 1 || p > 3) throw Error(ErrorCode::InvalidArgument, "density-identity suite runs at p <= 3");
  const std::size_t n = opt.n_samples ? opt.n_samples : 1000000;
  const MatrixTestFunction f = MatrixTestFunction::wishart_density(p + 1.0);
  std::uint64_t offset = 0;
  for (OperatorKind kind : {OperatorKind::second, OperatorKind::first}) {
    const DensityModeSetup setup{MatrixOpParams{kind, p, {{2.0, 1.5}}}, f};
    // |V|^(2s-(p+1)) must be integrable under the Wishart density for a finite variance
    const std::vector<double> grid = kind == OperatorKind::second ? std::vector<double>{1.2, 1.6, 2.0}
                                                                   : std::vector<double>{1.2, 1.4, 1.6};
    for (double s : grid) {
      const MPoint pt{{s}};
      MCConfig a{n, opt.seed, 32, false, offset};
      MCConfig b{n, opt.seed, 32, false, offset + 32};
      offset += 64;
      const McEstimate dm = mtransform_mc(setup, pt, a);
      const McEstimate op = mtransform_operator_mc(setup.params, f, pt, b);
      const double se = std::hypot(dm.se, op.se);
      add_case(r, std::string(kind == OperatorKind::first ? "first" : "second") + "/p=" + std::to_string(p) + "/s=" + num(s),
               "density constant times M-moment of density-mode draws equals M-transform of the operator", op.mean,
               dm.mean, se, 3.0 * se);
    }
  }
  return r;
}

}  // namespace

bool SuiteResult::all_pass() const {
  return std::all_of(cases.begin(), cases.end(), [](const SuiteCase& c) { return c.pass; });
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"scalar-closed-forms", "jacobians",        "beta-moments",
                                              "dirichlet-chain",     "mtransform-first", "mtransform-second",
                                              "density-identity"};
  return names;
}

bool is_suite(const std::string& name) {
  const auto& n = suite_names();
  return std::find(n.begin(), n.end(), name) != n.end();
}

SuiteResult run_suite(const std::string& name, const SuiteOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  SuiteResult r;
  if (name == "scalar-closed-forms") {
    r = scalar_closed_forms(opt);
  } else if (name == "jacobians") {
    r = jacobians(opt);
  } else if (name == "beta-moments") {
    r = beta_moments(opt);
  } else if (name == "dirichlet-chain") {
    r = dirichlet_chain(opt);
  } else if (name == "mtransform-first") {
    r = mtransform_suite(OperatorKind::first, opt);
  } else if (name == "mtransform-second") {
    r = mtransform_suite(OperatorKind::second, opt);
  } else if (name == "density-identity") {
    r = density_identity(opt);
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown suite '" + name + "'");
  }
  r.suite = name;
  r.seed = opt.seed;
  r.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

void add_case(SuiteResult& r, std::string id, std::string ref, double expected, double got, double se, double tol) {
  const bool pass = std::isfinite(got) && std::abs(got - expected) <= tol;
  r.cases.push_back({std::move(id), std::move(ref), expected, got, se, tol, pass});
}

std::string format12(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

namespace {

nlohmann::ordered_json json_num(double x) {
  if (!std::isfinite(x)) return nullptr;
  return std::strtod(format12(x).c_str(), nullptr);
}

}  // namespace

std::string to_json(const SuiteResult& r, bool timing) {
  nlohmann::ordered_json j;
  j["suite"] = r.suite;
  j["seed"] = r.seed;
  nlohmann::ordered_json cases = nlohmann::ordered_json::array();
  for (const SuiteCase& c : r.cases) {
    nlohmann::ordered_json o;
    o["id"] = c.id;
    o["paper_ref"] = c.paper_ref;
    o["expected"] = json_num(c.expected);
    o["got"] = json_num(c.got);
    o["se"] = json_num(c.se);
    o["tol"] = json_num(c.tol);
    o["pass"] = c.pass;
    cases.push_back(std::move(o));
  }
  j["cases"] = std::move(cases);
  if (timing) j["elapsed_ms"] = json_num(r.elapsed_ms);
  return j.dump(2) + "\n";
}

std::string to_csv(const SuiteResult& r) {
  std::ostringstream os;
  os << "suite,seed,id,paper_ref,expected,got,se,tol,pass\r\n";
  for (const SuiteCase& c : r.cases) {
    os << csv_field(r.suite) << ',' << r.seed << ',' << csv_field(c.id) << ',' << csv_field(c.paper_ref) << ','
       << format12(c.expected) << ',' << format12(c.got) << ',' << format12(c.se) << ',' << format12(c.tol) << ','
       << (c.pass ? "true" : "false") << "\r\n";
  }
  return os.str();
}

}  // namespace kober
