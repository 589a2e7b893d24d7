#include "kober/mtransform.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "kober/error.hpp"
#include "kober/matgamma.hpp"

namespace kober {

namespace {

constexpr int kMaxCells = 40;
constexpr int kFarCells = 12;

double half_p1(int p) { return 0.5 * (p + 1); }

std::vector<double> zetas(const MatrixOpParams& params) {
  std::vector<double> z;
  for (const KernelPair& kp : params.pairs) z.push_back(kp.zeta);
  return z;
}

std::vector<double> alphas(const MatrixOpParams& params) {
  std::vector<double> a;
  for (const KernelPair& kp : params.pairs) a.push_back(kp.alpha);
  return a;
}

void check_arity(const MatrixOpParams& params, const MPoint& s) {
  if (int(s.s.size()) != params.k()) throw Error(ErrorCode::DimensionMismatch, "need one s per kernel pair");
}

// log-space cell of x^s g(x) over [y0, y1], y = ln x
double log_cell(const std::function<double(double)>& h, double y0, double y1, double tol) {
  double err = 0.0, l1 = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(h, y0, y1, 12, tol, &err, &l1);
  if (!std::isfinite(v)) throw Error(ErrorCode::TailDivergence, "Mellin integrand is not finite");
  if (err > 10.0 * tol * l1 && err > 1e-300) {
    throw Error(ErrorCode::QuadratureNotConverged, "Mellin cell error " + std::to_string(err) + " exceeds tolerance");
  }
  return v;
}

// Moment-divergence screen on batch means: robust spread from the median
// absolute deviation.
void screen_batches(const McEstimate& e) {
  std::vector<double> m = e.batch_means;
  if (m.size() < 4) return;
  std::vector<double> sorted = m;
  std::sort(sorted.begin(), sorted.end());
  const double med = 0.5 * (sorted[(sorted.size() - 1) / 2] + sorted[sorted.size() / 2]);
  std::vector<double> dev;
  for (double x : m) dev.push_back(std::abs(x - med));
  std::sort(dev.begin(), dev.end());
  const double mad = 0.5 * (dev[(dev.size() - 1) / 2] + dev[dev.size() / 2]);
  const double spread = 1.4826 * mad;
  if (!std::isfinite(e.mean) || !std::isfinite(e.se)) {
    throw Error(ErrorCode::MomentDivergence, "moment estimate is not finite");
  }
  if (spread == 0.0) return;
  for (double x : m) {
    if (std::abs(x - med) > 5.0 * spread) {
      throw Error(ErrorCode::MomentDivergence, "batch means disagree beyond 5 standard errors (heavy tail)");
    }
  }
}

void scale_estimate(McEstimate& e, double c) {
  e.mean *= c;
  e.se *= std::abs(c);
  for (double& m : e.batch_means) m *= c;
}

// proposal for U matching the behaviour of f near O
double proposal_shape(const MatrixTestFunction& f, int p, double s) {
  switch (f.family()) {
    case MatrixTestFunction::Family::exp_neg_trace: return s;
    case MatrixTestFunction::Family::det_power_times_exp: return f.param() + s - half_p1(p);
    case MatrixTestFunction::Family::wishart_density: return 0.5 * f.param() + s - half_p1(p);
    default: break;
  }
  throw Error(ErrorCode::InvalidArgument, "Monte Carlo M-transform needs an exponentially decaying family");
}

double proposal_scale(const MatrixTestFunction& f) {
  return f.family() == MatrixTestFunction::Family::wishart_density ? 2.0 : 1.0;
}

// Cell layout of a one-variable Mellin integral: `head` log-cells below 1,
// `tail` above, plus Jacobi remainders beyond them.
struct MellinCells {
  int head = 0;
  int tail = 0;
  bool head_rem = false;
  bool tail_rem = false;
  double total = 0.0;
};

MellinCells plan_cells(const std::function<double(double)>& g, double s, double decay, const QuadConfig& q) {
  validate(q);
  if (!std::isfinite(s)) throw Error(ErrorCode::InvalidArgument, "s must be finite");
  if (!(decay > s)) {
    throw Error(ErrorCode::TailDivergence,
                "Mellin transform needs decay > s (decay = " + std::to_string(decay) + ", s = " + std::to_string(s) + ")");
  }
  const double tol = std::max(q.rel_tol, 1e-14);
  const auto h = [&](double y) {
    const double gx = g(std::exp(y));
    return gx == 0.0 ? 0.0 : std::exp(s * y) * gx;
  };
  const double step = std::log(4.0);
  const double negligible = 1e-2 * tol;

  MellinCells c;
  double y = 0.0;
  int quiet = 0, j = 0;
  for (; j < kMaxCells; ++j) {
    const double v = log_cell(h, y - step, y, tol);
    c.total += v;
    y -= step;
    quiet = std::abs(v) <= negligible * std::abs(c.total) ? quiet + 1 : 0;
    if (quiet == 2) break;
  }
  if (j == kMaxCells) throw Error(ErrorCode::TailDivergence, "Mellin integrand does not vanish towards 0");
  c.head = j + 1;
  if (s > 0.0) {
    const double x0 = std::exp(y);
    const QuadResult r = integrate_jacobi([&](double t) { return g(x0 * t); }, 0.0, s - 1.0, q);
    c.total += std::pow(x0, s) * r.value;
    c.head_rem = true;
  }

  y = 0.0;
  quiet = 0;
  const bool algebraic = std::isfinite(decay);
  for (j = 0; j < kMaxCells; ++j) {
    if (algebraic && j >= kFarCells) break;
    const double v = log_cell(h, y, y + step, tol);
    c.total += v;
    y += step;
    quiet = std::abs(v) <= negligible * std::abs(c.total) ? quiet + 1 : 0;
    if (quiet == 2) {
      ++j;
      break;
    }
  }
  c.tail = j;
  if (algebraic && quiet < 2) {
    // x = X / t: X^s int_0^1 t^(decay-s-1) [t^-decay g(X/t)] dt
    const double big = std::exp(y);
    const QuadResult r = integrate_jacobi([&](double t) { return std::pow(t, -decay) * g(big / t); }, 0.0,
                                          decay - s - 1.0, q);
    c.total += std::pow(big, s) * r.value;
    c.tail_rem = true;
  } else if (j == kMaxCells) {
    throw Error(ErrorCode::TailDivergence, "Mellin integrand does not vanish towards infinity");
  }
  return c;
}

// Fixed rule sum_i w_i g(x_i) ~ int x^(s-1) g(x) dx on a cell layout.
GaussRule mellin_rule(const MellinCells& c, double s, double decay, int n) {
  GaussRule r;
  const double step = std::log(4.0);
  const GaussRule& gl = gauss_jacobi_unit(n, 0.0, 0.0);
  auto cell = [&](double y0) {
    for (int i = 0; i < n; ++i) {
      const double y = y0 + step * gl.nodes[i];
      r.nodes.push_back(std::exp(y));
      r.weights.push_back(step * gl.weights[i] * std::exp(s * y));
    }
  };
  for (int j = 0; j < c.head; ++j) cell(-(j + 1) * step);
  for (int j = 0; j < c.tail; ++j) cell(j * step);
  if (c.head_rem) {
    const double x0 = std::exp(-c.head * step);
    const GaussRule& gj = gauss_jacobi_unit(n, 0.0, s - 1.0);
    for (int i = 0; i < n; ++i) {
      r.nodes.push_back(x0 * gj.nodes[i]);
      r.weights.push_back(std::pow(x0, s) * gj.weights[i]);
    }
  }
  if (c.tail_rem) {
    const double big = std::exp(c.tail * step);
    const GaussRule& gj = gauss_jacobi_unit(n, 0.0, decay - s - 1.0);
    for (int i = 0; i < n; ++i) {
      r.nodes.push_back(big / gj.nodes[i]);
      r.weights.push_back(std::pow(big, s) * gj.weights[i] * std::pow(gj.nodes[i], -decay));
    }
  }
  return r;
}

}  // namespace

double mellin_numeric_1d(const std::function<double(double)>& g, double s, const QuadConfig& q, double decay) {
  return plan_cells(g, s, decay, q).total;
}

double mellin_numeric_2d(const std::function<double(double, double)>& g, double s1, double s2, const QuadConfig& q,
                         double decay1, double decay2) {
  MellinCells c1 = plan_cells([&](double x) { return g(x, 1.0); }, s1, decay1, q);
  MellinCells c2 = plan_cells([&](double x) { return g(1.0, x); }, s2, decay2, q);
  for (MellinCells* c : {&c1, &c2}) {
    c->head += 2;
    if (!c->tail_rem) c->tail += 2;
  }
  auto apply = [&](int n) {
    const GaussRule r1 = mellin_rule(c1, s1, decay1, n);
    const GaussRule r2 = mellin_rule(c2, s2, decay2, n);
    double total = 0.0;
    for (std::size_t i = 0; i < r1.nodes.size(); ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < r2.nodes.size(); ++j) row += r2.weights[j] * g(r1.nodes[i], r2.nodes[j]);
      total += r1.weights[i] * row;
    }
    return total;
  };
  const double coarse = apply(8);
  const double fine = apply(12);
  if (!std::isfinite(fine)) throw Error(ErrorCode::TailDivergence, "two-variable Mellin integrand is not finite");
  if (std::abs(fine - coarse) > 1e2 * std::max(q.rel_tol, 1e-14) * std::abs(fine)) {
    throw Error(ErrorCode::QuadratureNotConverged,
                "two-variable Mellin rules differ by " + std::to_string(std::abs(fine - coarse) / std::abs(fine)));
  }
  return fine;
}

bool transform_domain_ok(const MatrixOpParams& params, const MPoint& s) {
  if (int(s.s.size()) != params.k()) return false;
  const double lo = 0.5 * (params.p - 1);
  for (int j = 0; j < params.k(); ++j) {
    const KernelPair& kp = params.pairs[j];
    if (!(kp.alpha > lo)) return false;
    if (params.kind == OperatorKind::first) {
      if (!(s.s[j] < kp.zeta + 1.0)) return false;
    } else if (!(kp.zeta + s.s[j] > lo)) {
      return false;
    }
  }
  return true;
}

double gamma_ratio_first(const MatrixOpParams& params, const MPoint& s) {
  check_arity(params, s);
  const int p = params.p;
  GammaRatioSpec g{p, {}, {}};
  for (int j = 0; j < params.k(); ++j) {
    const KernelPair& kp = params.pairs[j];
    if (!(kp.alpha > 0.5 * (p - 1))) throw Error(ErrorCode::DomainError, "alpha_j must exceed (p-1)/2");
    if (!(s.s[j] < kp.zeta + 1.0)) {
      throw Error(ErrorCode::DomainError, "first kind needs s_j < zeta_j + 1 (s_j = " + std::to_string(s.s[j]) +
                                              ", zeta_j = " + std::to_string(kp.zeta) + ")");
    }
    g.numerator.push_back(half_p1(p) + kp.zeta - s.s[j]);
    g.denominator.push_back(half_p1(p) + kp.alpha + kp.zeta - s.s[j]);
  }
  return gamma_ratio(g);
}

double gamma_ratio_second(const MatrixOpParams& params, const MPoint& s) {
  check_arity(params, s);
  const int p = params.p;
  GammaRatioSpec g{p, {}, {}};
  for (int j = 0; j < params.k(); ++j) {
    const KernelPair& kp = params.pairs[j];
    if (!(kp.alpha > 0.5 * (p - 1))) throw Error(ErrorCode::DomainError, "alpha_j must exceed (p-1)/2");
    if (!(kp.zeta + s.s[j] > 0.5 * (p - 1))) {
      throw Error(ErrorCode::DomainError, "second kind needs zeta_j + s_j > (p-1)/2 (zeta_j + s_j = " +
                                              std::to_string(kp.zeta + s.s[j]) + ")");
    }
    g.numerator.push_back(kp.zeta + s.s[j]);
    g.denominator.push_back(kp.alpha + kp.zeta + s.s[j]);
  }
  return gamma_ratio(g);
}

double gamma_ratio(const MatrixOpParams& params, const MPoint& s) {
  return params.kind == OperatorKind::first ? gamma_ratio_first(params, s) : gamma_ratio_second(params, s);
}

McEstimate mtransform_mc(const DensityModeSetup& setup, const MPoint& s, const MCConfig& mc) {
  const MatrixOpParams& params = setup.params;
  validate(params);
  check_arity(params, s);
  const int p = params.p, k = params.k();
  if (!transform_domain_ok(params, s) || !setup.f.mtransform_defined(p, s.s)) {
    throw Error(ErrorCode::MomentDivergence, "determinant moment is infinite at this s");
  }
  auto v_sampler = setup.f.density_sampler(p, k);
  if (!v_sampler) throw Error(ErrorCode::InvalidArgument, "no sampler for the normalized density of f");
  const std::vector<double> z = zetas(params), b = alphas(params);
  const double c = setup.f.mass(p, k) * density_constant(params.kind, p, z, b);
  auto sampler = density_mode_sampler(params.kind, p, z, b, v_sampler);
  const double shift = half_p1(p);
  McEstimate e = mc_mean(mc, [&](Rng& rng) {
    const std::vector<SymMat> u = sampler(rng);
    double ln = 0.0;
    for (int j = 0; j < k; ++j) ln += (s.s[j] - shift) * std::log(determinant(u[j]));
    return std::exp(ln);
  });
  screen_batches(e);
  scale_estimate(e, c);
  return e;
}

namespace {

// 2 sum ln T_ii = ln|T T'|
double ln_diag2(const Mat& t) {
  double r = 0.0;
  for (int i = 0; i < t.dim(); ++i) r += std::log(std::abs(t(i, i)));
  return 2.0 * r;
}

}  // namespace

McEstimate mtransform_operator_mc(const MatrixOpParams& params, const MatrixTestFunction& f, const MPoint& s,
                                  const MCConfig& mc) {
  validate(params);
  check_arity(params, s);
  if (!transform_domain_ok(params, s)) throw Error(ErrorCode::DomainError, "s outside the transform domain");
  const int p = params.p, k = params.k();
  const double shift = half_p1(p), lo = 0.5 * (p - 1);
  const bool first = params.kind == OperatorKind::first;
  const double ck = kober_matrix_constant(params);

  struct Axis {
    double a, b, theta, ln_norm;
    BetaMatParams inner;
    bool reweight;
  };
  std::vector<Axis> axes;
  for (int j = 0; j < k; ++j) {
    const KernelPair& kp = params.pairs[j];
    Axis ax{};
    ax.a = proposal_shape(f, p, s.s[j]);
    if (!(ax.a > lo)) throw Error(ErrorCode::ProposalDomainError, "proposal shape outside (p-1)/2");
    ax.theta = proposal_scale(f);
    if (first) {
      // type-2 beta proposal; tail index b kept below zeta + 1 - s for finite variance
      const double hi = kp.zeta + 1.0 - s.s[j];
      ax.b = hi > lo + 0.1 ? 0.5 * (lo + hi) : lo + 0.05;
      ax.ln_norm = ln_gamma_p(p, ax.a) + ln_gamma_p(p, ax.b) - ln_gamma_p(p, ax.a + ax.b) +
                   p * ax.a * std::log(ax.theta);
      ax.inner = {p, kp.zeta + shift, kp.alpha};
      ax.reweight = false;
    } else {
      ax.b = 0.0;
      ax.ln_norm = p * ax.a * std::log(ax.theta) + ln_gamma_p(p, ax.a);
      ax.reweight = kp.zeta <= lo;
      ax.inner = {p, ax.reweight ? kp.zeta + 1.0 : kp.zeta, kp.alpha};
    }
    axes.push_back(ax);
  }

  McEstimate e = mc_mean(mc, [&](Rng& rng) {
    std::vector<SymMat> v;
    v.reserve(k);
    double ln_w = 0.0;
    for (int j = 0; j < k; ++j) {
      const Axis& ax = axes[j];
      // U = R R' with R built from Bartlett factors, so |U| never goes through a determinant
      Mat r(p);
      double ld_u = 0.0;
      double ln_w_j = ax.ln_norm;
      if (first) {
        const Mat t1 = sample_wishart_factor(p, 2.0 * ax.a, rng);
        const Mat t2 = sample_wishart_factor(p, 2.0 * ax.b, rng);
        const Mat m = inverse(t2).transpose() * t1;
        r = std::sqrt(ax.theta) * m;
        ld_u = ln_diag2(t1) - ln_diag2(t2) + p * std::log(ax.theta);
        ln_w_j += (ax.a + ax.b) * log_det_spd(SymMat::identity(p) + congruence(m, SymMat::identity(p)));
      } else {
        const Mat t = sample_wishart_factor(p, 2.0 * ax.a, rng);
        r = std::sqrt(0.5 * ax.theta) * t;
        ld_u = ln_diag2(t) + p * std::log(0.5 * ax.theta);
        double fro = 0.0;
        for (int i = 0; i < p; ++i)
          for (int c = 0; c <= i; ++c) fro += t(i, c) * t(i, c);
        ln_w_j += 0.5 * fro;
      }
      if (s.s[j] != ax.a) ln_w_j += (s.s[j] - ax.a) * ld_u;
      ln_w += ln_w_j;
      const SymMat w = sample_matrix_beta(ax.inner, rng);
      if (first) {
        v.push_back(congruence(r, w));
      } else {
        if (ax.reweight) ln_w -= log_det_spd(w);
        v.push_back(congruence(r, inverse(w)));
      }
    }
    const double fv = f(v);
    return fv == 0.0 ? 0.0 : fv * std::exp(ln_w);
  });
  scale_estimate(e, ck);
  return e;
}

double mtransform_operator_quad(const MatrixOpParams& params, const MatrixTestFunction& f, const MPoint& s,
                                const QuadConfig& q) {
  validate(params);
  check_arity(params, s);
  const int k = params.k();
  if (params.p != 1 || k > 2) throw Error(ErrorCode::InvalidArgument, "quadrature M-transform needs p = 1 and k <= 2");
  if (!transform_domain_ok(params, s)) throw Error(ErrorCode::DomainError, "s outside the transform domain");
  const MultiFunction mf = f.scalar_form(k);
  std::vector<double> decay(k);
  for (int j = 0; j < k; ++j) {
    decay[j] = mf.decay[j];
    if (params.kind == OperatorKind::first) decay[j] = std::min(decay[j], params.pairs[j].zeta + 1.0);
  }
  const QuadConfig op_q{k == 1 ? 32 : 8, 8, k == 1 ? 1e-12 : 1e-10};
  const QuadConfig mel_q{q.base_nodes, q.max_doublings, std::min(q.rel_tol, 1e-10)};
  const OperatorKind kind = params.kind;
  if (k == 1) {
    return mellin_numeric_1d(
        [&](double u) { return multivar_op(kind, params.pairs, mf, std::span<const double>(&u, 1), op_q).value; },
        s.s[0], mel_q, decay[0]);
  }
  if (mf.is_separable()) {
    // a tensor rule on a product integrand is the product of the axis rules
    const QuadConfig axis_q{32, 8, 1e-12};
    std::map<double, double> memo[2];
    auto axis = [&](int j, double u) {
      auto it = memo[j].find(u);
      if (it != memo[j].end()) return it->second;
      const MultiFunction fj = MultiFunction::separable({mf.factors[j]});
      const double v = multivar_op(kind, {params.pairs[j]}, fj, std::span<const double>(&u, 1), axis_q).value;
      memo[j].emplace(u, v);
      return v;
    };
    return mellin_numeric_2d([&](double u1, double u2) { return axis(0, u1) * axis(1, u2); }, s.s[0], s.s[1], mel_q,
                             decay[0], decay[1]);
  }
  return mellin_numeric_2d(
      [&](double u1, double u2) {
        const double u[2] = {u1, u2};
        return multivar_op(kind, params.pairs, mf, std::span<const double>(u, 2), op_q).value;
      },
      s.s[0], s.s[1], mel_q, decay[0], decay[1]);
}

std::vector<TransformReport> verify_transform(const MatrixOpParams& params, const MatrixTestFunction& f,
                                              const std::vector<MPoint>& s_grid, const MCConfig& mc,
                                              const QuadConfig& q, const TransformTolerance& tol) {
  validate(params);
  std::vector<TransformReport> out;
  const bool quad = params.p == 1 && params.k() <= 2;
  for (std::size_t i = 0; i < s_grid.size(); ++i) {
    TransformReport r;
    r.s = s_grid[i].s;
    r.method = quad ? "quadrature" : "monte-carlo";
    try {
      check_arity(params, s_grid[i]);
      if (!transform_domain_ok(params, s_grid[i])) {
        gamma_ratio(params, s_grid[i]);  // throws the descriptive DomainError
        throw Error(ErrorCode::DomainError, "s outside the transform domain");
      }
      r.rhs = f.mtransform(params.p, r.s) * gamma_ratio(params, s_grid[i]);
      if (quad) {
        r.lhs = mtransform_operator_quad(params, f, s_grid[i], q);
        r.ratio = r.lhs / r.rhs;
        r.tol = tol.quad_rel * std::abs(r.rhs);
        r.pass = std::abs(r.lhs - r.rhs) < r.tol;
      } else {
        MCConfig m = mc;
        m.stream_offset = mc.stream_offset + i * std::uint64_t(mc.n_streams);
        const McEstimate e = mtransform_operator_mc(params, f, s_grid[i], m);
        r.lhs = e.mean;
        r.lhs_se = e.se;
        r.ratio = r.lhs / r.rhs;
        r.tol = std::min(tol.mc_sigmas * r.lhs_se, tol.mc_rel_cap * std::abs(r.rhs));
        r.pass = e.se_converged && std::abs(r.lhs - r.rhs) <= r.tol;
      }
    } catch (const Error& e) {
      r.error = e.what();
      r.pass = false;
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace kober
