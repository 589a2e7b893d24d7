#include "kober/matrix_ops.hpp"

#include <cmath>
#include <numbers>

#include "kober/error.hpp"
#include "kober/matgamma.hpp"

namespace kober {

namespace {

double half_p1(int p) { return 0.5 * (p + 1); }

void check_args(const MatrixOpParams& params, std::span<const SymMat> u) {
  validate(params);
  if (int(u.size()) != params.k()) throw Error(ErrorCode::DimensionMismatch, "expected one U per kernel pair");
  for (const SymMat& m : u) {
    if (m.dim() != params.p) throw Error(ErrorCode::DimensionMismatch, "U has the wrong dimension");
    if (!spd_check(m).is_pd) throw Error(ErrorCode::NotPositiveDefinite, "U must be positive definite");
  }
}

// e ln|m|, with 0 for e = 0 even when m is numerically singular
double det_term(const SymMat& m, double e) { return e == 0.0 ? 0.0 : e * log_det_spd(m); }

// second kind needs the fallback proposal when zeta is at or below (p-1)/2
bool second_needs_shift(int p, double zeta) { return zeta <= 0.5 * (p - 1); }

}  // namespace

void validate(const MatrixOpParams& params) {
  if (params.p < 1 || params.p > kMaxDim) throw Error(ErrorCode::InvalidArgument, "p must be in 1..4");
  if (params.k() < 1) throw Error(ErrorCode::InvalidArgument, "need at least one kernel pair");
  const double lo = 0.5 * (params.p - 1);
  for (const KernelPair& kp : params.pairs) {
    if (!std::isfinite(kp.zeta) || !std::isfinite(kp.alpha)) throw Error(ErrorCode::InvalidArgument, "non-finite parameter");
    if (kp.alpha <= lo) throw Error(ErrorCode::DomainError, "alpha must exceed (p-1)/2");
    if (params.kind == OperatorKind::first) {
      if (kp.zeta <= -1.0) throw Error(ErrorCode::DomainError, "first kind needs zeta > -1");
    } else if (kp.zeta <= lo - 1.0) {
      throw Error(ErrorCode::ProposalDomainError, "second kind needs zeta > (p-3)/2");
    }
  }
}

MatrixTestFunction MatrixTestFunction::det_power(double lambda) {
  MatrixTestFunction f;
  f.family_ = Family::det_power;
  f.param_ = lambda;
  return f;
}

MatrixTestFunction MatrixTestFunction::exp_neg_trace() {
  MatrixTestFunction f;
  f.family_ = Family::exp_neg_trace;
  return f;
}

MatrixTestFunction MatrixTestFunction::det_power_times_exp(double gamma) {
  MatrixTestFunction f;
  f.family_ = Family::det_power_times_exp;
  f.param_ = gamma;
  return f;
}

MatrixTestFunction MatrixTestFunction::wishart_density(double df) {
  MatrixTestFunction f;
  f.family_ = Family::wishart_density;
  f.param_ = df;
  return f;
}

MatrixTestFunction MatrixTestFunction::inverted_dirichlet(double c) {
  MatrixTestFunction f;
  f.family_ = Family::inverted_dirichlet;
  f.param_ = c;
  return f;
}

MatrixTestFunction MatrixTestFunction::callback(std::function<double(std::span<const SymMat>)> fn) {
  if (!fn) throw Error(ErrorCode::InvalidArgument, "empty callback");
  MatrixTestFunction f;
  f.family_ = Family::callback;
  f.fn_ = std::move(fn);
  return f;
}

double MatrixTestFunction::operator()(std::span<const SymMat> v) const {
  switch (family_) {
    case Family::det_power: {
      double r = 1.0;
      for (const SymMat& m : v) r *= std::exp(det_term(m, param_));
      return r;
    }
    case Family::exp_neg_trace: {
      double t = 0.0;
      for (const SymMat& m : v) t += m.trace();
      return std::exp(-t);
    }
    case Family::det_power_times_exp: {
      double ln = 0.0;
      for (const SymMat& m : v) ln += det_term(m, param_ - half_p1(m.dim())) - m.trace();
      return std::exp(ln);
    }
    case Family::wishart_density: {
      double ln = 0.0;
      for (const SymMat& m : v) {
        const int p = m.dim();
        ln += det_term(m, 0.5 * (param_ - p - 1)) - 0.5 * m.trace() -
              0.5 * param_ * p * std::numbers::ln2 - ln_gamma_p(p, 0.5 * param_);
      }
      return std::exp(ln);
    }
    case Family::inverted_dirichlet: {
      if (v.empty()) return 1.0;
      SymMat s = SymMat::identity(v.front().dim());
      for (const SymMat& m : v) s += m;
      return std::exp(det_term(s, -param_));
    }
    case Family::callback:
      return fn_(v);
  }
  return 0.0;
}

bool MatrixTestFunction::has_mtransform() const noexcept {
  return family_ == Family::exp_neg_trace || family_ == Family::det_power_times_exp ||
         family_ == Family::wishart_density || family_ == Family::inverted_dirichlet;
}

bool MatrixTestFunction::mtransform_defined(int p, std::span<const double> s) const {
  if (!has_mtransform() || s.empty()) return false;
  const double lo = 0.5 * (p - 1);
  const double shift = half_p1(p);
  double total = 0.0;
  for (double sj : s) {
    total += sj;
    switch (family_) {
      case Family::exp_neg_trace:
      case Family::inverted_dirichlet:
        if (sj <= lo) return false;
        break;
      case Family::det_power_times_exp:
        if (param_ + sj - shift <= lo) return false;
        break;
      case Family::wishart_density:
        if (0.5 * param_ + sj - shift <= lo) return false;
        break;
      default:
        return false;
    }
  }
  if (family_ == Family::inverted_dirichlet && param_ - total <= lo) return false;
  return true;
}

double MatrixTestFunction::mtransform(int p, std::span<const double> s) const {
  if (!has_mtransform()) throw Error(ErrorCode::InvalidArgument, "no closed-form M-transform for this family");
  if (!mtransform_defined(p, s)) throw Error(ErrorCode::DomainError, "s outside the region of convergence");
  const double shift = half_p1(p);
  double ln = 0.0;
  double total = 0.0;
  for (double sj : s) {
    total += sj;
    switch (family_) {
      case Family::exp_neg_trace:
        ln += ln_gamma_p(p, sj);
        break;
      case Family::det_power_times_exp:
        ln += ln_gamma_p(p, param_ + sj - shift);
        break;
      case Family::wishart_density:
        ln += p * (sj - shift) * std::numbers::ln2 + ln_gamma_p(p, 0.5 * param_ + sj - shift) -
              ln_gamma_p(p, 0.5 * param_);
        break;
      case Family::inverted_dirichlet:
        ln += ln_gamma_p(p, sj);
        break;
      default:
        break;
    }
  }
  if (family_ == Family::inverted_dirichlet) ln += ln_gamma_p(p, param_ - total) - ln_gamma_p(p, param_);
  if (ln > 709.78) throw Error(ErrorCode::Overflow, "M-transform overflows double");
  return std::exp(ln);
}

double MatrixTestFunction::mass(int p, int k) const {
  const std::vector<double> s(std::size_t(k), half_p1(p));
  return mtransform(p, s);
}

std::function<std::vector<SymMat>(Rng&)> MatrixTestFunction::density_sampler(int p, int k) const {
  const double shift = half_p1(p);
  switch (family_) {
    case Family::exp_neg_trace:
    case Family::det_power_times_exp: {
      const double shape = family_ == Family::exp_neg_trace ? shift : param_;
      if (shape <= 0.5 * (p - 1)) return {};
      return [p, k, shape](Rng& rng) {
        std::vector<SymMat> v;
        v.reserve(k);
        for (int j = 0; j < k; ++j) v.push_back(sample_matrix_gamma(p, shape, 1.0, rng));
        return v;
      };
    }
    case Family::wishart_density: {
      const double df = param_;
      if (df <= p - 1) return {};
      return [p, k, df](Rng& rng) {
        std::vector<SymMat> v;
        v.reserve(k);
        for (int j = 0; j < k; ++j) v.push_back(sample_wishart(p, df, rng));
        return v;
      };
    }
    case Family::inverted_dirichlet: {
      const double last = param_ - k * shift;
      if (last <= 0.5 * (p - 1)) return {};
      return [p, k, shift, last](Rng& rng) {
        std::vector<SymMat> v;
        v.reserve(k);
        for (int j = 0; j < k; ++j) v.push_back(sample_wishart(p, 2.0 * shift, rng));
        const SymMat r = sym_inv_sqrt(sample_wishart(p, 2.0 * last, rng));
        for (SymMat& m : v) m = congruence(r, m);
        return v;
      };
    }
    default:
      return {};
  }
}

MultiFunction MatrixTestFunction::scalar_form(int k) const {
  const double inf = TestFunction1D::infinity();
  switch (family_) {
    case Family::det_power: {
      std::vector<TestFunction1D> fs(std::size_t(k), TestFunction1D::power(param_));
      return MultiFunction::separable(std::move(fs));
    }
    case Family::exp_neg_trace: {
      std::vector<TestFunction1D> fs(std::size_t(k), TestFunction1D::exp_decay(1.0));
      return MultiFunction::separable(std::move(fs));
    }
    case Family::det_power_times_exp: {
      std::vector<TestFunction1D> fs(std::size_t(k), TestFunction1D::power_times_exp(param_ - 1.0, 1.0));
      return MultiFunction::separable(std::move(fs));
    }
    case Family::wishart_density: {
      const double df = param_;
      const double ln_norm = 0.5 * df * std::numbers::ln2 + ln_gamma(0.5 * df);
      auto one = TestFunction1D::callback(
          [df, ln_norm](double v) { return std::exp((0.5 * df - 1.0) * std::log(v) - 0.5 * v - ln_norm); }, inf, -1);
      std::vector<TestFunction1D> fs(std::size_t(k), one);
      return MultiFunction::separable(std::move(fs));
    }
    case Family::inverted_dirichlet: {
      const double c = param_;
      return MultiFunction::general(
          [c](std::span<const double> v) {
            double s = 1.0;
            for (double x : v) s += x;
            return std::pow(s, -c);
          },
          std::vector<double>(std::size_t(k), c));
    }
    case Family::callback: {
      auto fn = fn_;
      return MultiFunction::general(
          [fn](std::span<const double> v) {
            std::vector<SymMat> m;
            m.reserve(v.size());
            for (double x : v) m.push_back(SymMat::scalar(1, x));
            return fn(m);
          },
          std::vector<double>(std::size_t(k), 0.0));
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown family");
}

double kober_matrix_constant(const MatrixOpParams& params) {
  validate(params);
  const int p = params.p;
  GammaRatioSpec g{p, {}, {}};
  for (const KernelPair& kp : params.pairs) {
    double a = kp.zeta;
    if (params.kind == OperatorKind::first) {
      a = kp.zeta + half_p1(p);
    } else if (second_needs_shift(p, kp.zeta)) {
      a = kp.zeta + 1.0;
    }
    g.numerator.push_back(a);
    g.denominator.push_back(a + kp.alpha);
  }
  return gamma_ratio(g);
}

McEstimate kober_matrix_second(const MatrixOpParams& params, const MatrixTestFunction& f, std::span<const SymMat> u,
                               const MCConfig& mc) {
  if (params.kind != OperatorKind::second) throw Error(ErrorCode::InvalidArgument, "expected second-kind parameters");
  check_args(params, u);
  const int p = params.p, k = params.k();
  const double c = kober_matrix_constant(params);
  std::vector<SymMat> roots;
  std::vector<BetaMatParams> props;
  std::vector<bool> shifted;
  for (int j = 0; j < k; ++j) {
    roots.push_back(sym_sqrt(u[j]));
    const KernelPair& kp = params.pairs[j];
    const bool sh = second_needs_shift(p, kp.zeta);
    shifted.push_back(sh);
    props.push_back({p, sh ? kp.zeta + 1.0 : kp.zeta, kp.alpha});
  }
  McEstimate e = mc_mean(mc, [&](Rng& rng) {
    std::vector<SymMat> v;
    v.reserve(k);
    double w = 1.0;
    for (int j = 0; j < k; ++j) {
      const SymMat b = sample_matrix_beta(props[j], rng);
      if (shifted[j]) w /= determinant(b);
      v.push_back(congruence(roots[j], inverse(b)));
    }
    return w * f(v);
  });
  e.mean *= c;
  e.se *= c;
  for (double& m : e.batch_means) m *= c;
  return e;
}

McEstimate kober_matrix_first(const MatrixOpParams& params, const MatrixTestFunction& f, std::span<const SymMat> u,
                              const MCConfig& mc) {
  if (params.kind != OperatorKind::first) throw Error(ErrorCode::InvalidArgument, "expected first-kind parameters");
  check_args(params, u);
  const int p = params.p, k = params.k();
  const double c = kober_matrix_constant(params);
  std::vector<SymMat> roots;
  std::vector<BetaMatParams> props;
  for (int j = 0; j < k; ++j) {
    roots.push_back(sym_sqrt(u[j]));
    props.push_back({p, params.pairs[j].zeta + half_p1(p), params.pairs[j].alpha});
  }
  McEstimate e = mc_mean(mc, [&](Rng& rng) {
    std::vector<SymMat> v;
    v.reserve(k);
    for (int j = 0; j < k; ++j) v.push_back(congruence(roots[j], sample_matrix_beta(props[j], rng)));
    return f(v);
  });
  e.mean *= c;
  e.se *= c;
  for (double& m : e.batch_means) m *= c;
  return e;
}

McEstimate kober_matrix(const MatrixOpParams& params, const MatrixTestFunction& f, std::span<const SymMat> u,
                        const MCConfig& mc) {
  return params.kind == OperatorKind::first ? kober_matrix_first(params, f, u, mc)
                                            : kober_matrix_second(params, f, u, mc);
}

std::vector<double> param_chain(const ChainSpec& spec) {
  if (spec.p < 1 || spec.p > kMaxDim) throw Error(ErrorCode::InvalidArgument, "p must be in 1..4");
  std::vector<double> out;
  switch (spec.rule) {
    case ChainRule::dirichlet:
    case ChainRule::dirichlet_scaled: {
      const int k = int(spec.zeta.size());
      if (k < 1) throw Error(ErrorCode::InvalidArgument, "need at least one zeta");
      const double step = spec.rule == ChainRule::dirichlet ? 1.0 : half_p1(spec.p);
      for (int j = 1; j <= k; ++j) {
        double b = spec.tail + (k - j) * step;
        for (int i = j + 1; i <= k; ++i) b += spec.zeta[i - 1];
        out.push_back(b);
      }
      break;
    }
    case ChainRule::dirichlet_first_kind: {
      const int k = int(spec.zeta.size()) - 1;
      if (k < 1) throw Error(ErrorCode::InvalidArgument, "first-kind chain needs k+1 zetas");
      for (int j = 1; j <= k; ++j) {
        double b = 0.0;
        for (int i = j + 1; i <= k + 1; ++i) b += spec.zeta[i - 1];
        out.push_back(b);
      }
      break;
    }
    case ChainRule::generalized_dirichlet: {
      const int k = int(spec.beta.size());
      if (k < 1) throw Error(ErrorCode::InvalidArgument, "generalized chain needs k betas");
      const int last = int(spec.zeta.size());
      if (last < k) throw Error(ErrorCode::InvalidArgument, "generalized chain needs at least k zetas");
      for (int j = 1; j <= k; ++j) {
        double b = 0.0;
        for (int i = j + 1; i <= last; ++i) b += spec.zeta[i - 1];
        for (int i = j; i <= k; ++i) b += spec.beta[i - 1];
        out.push_back(b);
      }
      break;
    }
  }
  return out;
}

bool chain_shapes_valid(int p, std::span<const double> shapes) {
  for (double b : shapes) {
    if (!(b > 0.5 * (p - 1))) return false;
  }
  return true;
}

double density_constant(OperatorKind kind, int p, std::span<const double> zeta, std::span<const double> b) {
  if (zeta.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "zeta and b lengths differ");
  GammaRatioSpec g{p, {}, {}};
  for (std::size_t j = 0; j < zeta.size(); ++j) {
    const double a = kind == OperatorKind::second ? zeta[j] + half_p1(p) : zeta[j];
    g.numerator.push_back(a);
    g.denominator.push_back(a + b[j]);
  }
  return gamma_ratio(g);
}

std::function<std::vector<SymMat>(Rng&)> density_mode_sampler(OperatorKind kind, int p, std::vector<double> zeta,
                                                              std::vector<double> b,
                                                              std::function<std::vector<SymMat>(Rng&)> v_sampler) {
  if (zeta.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "zeta and b lengths differ");
  if (!v_sampler) throw Error(ErrorCode::InvalidArgument, "no sampler for V");
  std::vector<BetaMatParams> betas;
  for (std::size_t j = 0; j < zeta.size(); ++j) {
    BetaMatParams bp{p, kind == OperatorKind::second ? zeta[j] + half_p1(p) : zeta[j], b[j]};
    if (!(bp.a > 0.5 * (p - 1)) || !(bp.b > 0.5 * (p - 1))) {
      throw Error(ErrorCode::ChainDomainError, "beta shape outside (p-1)/2");
    }
    betas.push_back(bp);
  }
  return [kind, betas, v_sampler](Rng& rng) {
    std::vector<SymMat> v = v_sampler(rng);
    if (v.size() != betas.size()) throw Error(ErrorCode::DimensionMismatch, "sampler returned the wrong k");
    for (std::size_t j = 0; j < v.size(); ++j) {
      // a Cholesky factor of V_j in place of V_j^(1/2): Y is orthogonally invariant
      const SymMat y = sample_matrix_beta(betas[j], rng);
      v[j] = congruence(cholesky(v[j]), kind == OperatorKind::second ? y : inverse(y));
    }
    return v;
  };
}

std::vector<std::vector<SymMat>> density_mode_sample(OperatorKind kind, int p, const std::vector<double>& zeta,
                                                     const std::vector<double>& b,
                                                     const std::function<std::vector<SymMat>(Rng&)>& v_sampler,
                                                     const MCConfig& mc) {
  validate(mc);
  auto draw = density_mode_sampler(kind, p, zeta, b, v_sampler);
  std::vector<std::vector<SymMat>> out;
  out.reserve(mc.n_samples);
  const std::size_t base = mc.n_samples / mc.n_streams, extra = mc.n_samples % mc.n_streams;
  for (int s = 0; s < mc.n_streams; ++s) {
    Rng rng(RngStream{mc.seed, mc.stream_offset + std::uint64_t(s)});
    const std::size_t n = base + (std::size_t(s) < extra ? 1 : 0);
    for (std::size_t i = 0; i < n; ++i) out.push_back(draw(rng));
  }
  return out;
}

}  // namespace kober
