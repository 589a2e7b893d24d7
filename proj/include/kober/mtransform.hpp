#pragma once

// Mellin and M-transforms of operator outputs, the closed-form gamma ratios
// they reduce to, and reports comparing the two.

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "kober/matrix_ops.hpp"
#include "kober/montecarlo.hpp"
#include "kober/quadrature.hpp"

namespace kober {

struct MPoint {
  std::vector<double> s;
};

struct TransformReport {
  std::vector<double> s;
  double lhs = 0.0;
  double lhs_se = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  /// Absolute bound on |lhs - rhs|: quad_rel |rhs|, or min(mc_sigmas se, mc_rel_cap |rhs|).
  double tol = 0.0;
  std::string method;  // "quadrature" or "monte-carlo"
  bool pass = false;
  /// Non-empty when the point could not be evaluated (domain error etc.).
  std::string error;
};

/// int_0^inf x^(s-1) g(x) dx. The range is split at x = 1 into cells
/// growing geometrically towards 0 and infinity (adaptive Gauss-Legendre in
/// log x); the remainder near 0 uses a Gauss-Jacobi x^(s-1) weight and, for
/// algebraic decay g = O(x^-decay), the far tail is mapped onto a Jacobi
/// weight as well. Throws TailDivergence when decay <= s or when the cells
/// do not shrink.
double mellin_numeric_1d(const std::function<double(double)>& g, double s, const QuadConfig& q = {},
                         double decay = std::numeric_limits<double>::infinity());

/// Two-variable transform int int x1^(s1-1) x2^(s2-1) g(x1, x2) on a
/// tensor product of fixed per-axis log-cell rules. Cell ranges come from
/// the slices g(., 1) and g(1, .); the result is checked against a coarser
/// rule and QuadratureNotConverged is thrown if they disagree.
double mellin_numeric_2d(const std::function<double(double, double)>& g, double s1, double s2,
                         const QuadConfig& q = {}, double decay1 = std::numeric_limits<double>::infinity(),
                         double decay2 = std::numeric_limits<double>::infinity());

/// prod_j Gamma_p((p+1)/2 + zeta_j - s_j) / Gamma_p((p+1)/2 + alpha_j + zeta_j - s_j)
double gamma_ratio_first(const MatrixOpParams& params, const MPoint& s);
/// prod_j Gamma_p(zeta_j + s_j) / Gamma_p(alpha_j + zeta_j + s_j)
double gamma_ratio_second(const MatrixOpParams& params, const MPoint& s);
/// Dispatches on params.kind.
double gamma_ratio(const MatrixOpParams& params, const MPoint& s);

/// True when the first-kind (s_j < zeta_j + 1) or second-kind
/// (zeta_j + s_j > (p-1)/2) transform exists at s.
bool transform_domain_ok(const MatrixOpParams& params, const MPoint& s);

/// Density-mode setup: V ~ f / mass(f), U from density_mode_sampler with the
/// operator's alpha_j as second shapes.
struct DensityModeSetup {
  MatrixOpParams params;
  MatrixTestFunction f = MatrixTestFunction::exp_neg_trace();
};

/// M-transform of the operator output estimated from density-mode draws:
/// mass(f) * density_constant * E prod |U_j|^(s_j-(p+1)/2). Throws
/// MomentDivergence when s is outside the moment domain or when a batch
/// mean strays more than 5 batch standard deviations from the pooled mean.
McEstimate mtransform_mc(const DensityModeSetup& setup, const MPoint& s, const MCConfig& mc);

/// M-transform of the operator output by importance sampling: U from a
/// matrix-gamma (second kind) or scaled type-2 beta (first kind) proposal,
/// times a one-draw estimate of the operator at U.
McEstimate mtransform_operator_mc(const MatrixOpParams& params, const MatrixTestFunction& f, const MPoint& s,
                                  const MCConfig& mc);

/// M-transform of the operator output by nested quadrature (p = 1, k <= 2).
double mtransform_operator_quad(const MatrixOpParams& params, const MatrixTestFunction& f, const MPoint& s,
                                const QuadConfig& q = {});

struct TransformTolerance {
  double quad_rel = 1e-6;
  double mc_sigmas = 3.0;
  double mc_rel_cap = 0.02;
};

/// lhs = M-transform of the operator output (quadrature at p = 1, Monte
/// Carlo at p >= 2), rhs = f*(s) * gamma_ratio. Out-of-domain points yield
/// failed reports with the error text; nothing is thrown for them.
std::vector<TransformReport> verify_transform(const MatrixOpParams& params, const MatrixTestFunction& f,
                                              const std::vector<MPoint>& s_grid, const MCConfig& mc,
                                              const QuadConfig& q = {}, const TransformTolerance& tol = {});

}  // namespace kober
