#pragma once

// Matrix-argument Kober operators of the first and second kind, estimated
// by exact importance sampling from matrix-variate beta draws, the
// Dirichlet parameter chains, and sampling of operator-transformed
// densities.

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "kober/common.hpp"
#include "kober/montecarlo.hpp"
#include "kober/randmat.hpp"
#include "kober/scalar_ops.hpp"
#include "kober/spd.hpp"

namespace kober {

struct MatrixOpParams {
  OperatorKind kind = OperatorKind::second;
  int p = 2;
  /// One (zeta_j, alpha_j) per matrix argument.
  std::vector<KernelPair> pairs{KernelPair{}};

  int k() const noexcept { return static_cast<int>(pairs.size()); }
};

/// Checks p, k and the (zeta, alpha) domain of the chosen kind.
void validate(const MatrixOpParams& params);

/// f(V_1, ..., V_k) of k symmetric p x p matrices.
class MatrixTestFunction {
 public:
  enum class Family { det_power, exp_neg_trace, det_power_times_exp, wishart_density, inverted_dirichlet, callback };

  /// prod |V_j|^lambda
  static MatrixTestFunction det_power(double lambda);
  /// prod exp(-tr V_j)
  static MatrixTestFunction exp_neg_trace();
  /// prod |V_j|^(gamma-(p+1)/2) exp(-tr V_j)
  static MatrixTestFunction det_power_times_exp(double gamma);
  /// prod of W_p(df, I) densities
  static MatrixTestFunction wishart_density(double df);
  /// |I + V_1 + ... + V_k|^(-c)
  static MatrixTestFunction inverted_dirichlet(double c);
  static MatrixTestFunction callback(std::function<double(std::span<const SymMat>)> fn);

  double operator()(std::span<const SymMat> v) const;

  Family family() const noexcept { return family_; }
  double param() const noexcept { return param_; }

  /// True when the M-transform has a closed form.
  bool has_mtransform() const noexcept;
  /// f*(s) = int prod |V_j|^(s_j-(p+1)/2) f(V) dV; throws DomainError outside
  /// the region of convergence and InvalidArgument without a closed form.
  double mtransform(int p, std::span<const double> s) const;
  /// Region of convergence check for mtransform.
  bool mtransform_defined(int p, std::span<const double> s) const;

  /// Total mass int f dV (the M-transform at s_j = (p+1)/2).
  double mass(int p, int k) const;
  /// Draws V from the density f / mass; empty function if not available.
  std::function<std::vector<SymMat>(Rng&)> density_sampler(int p, int k) const;

  /// The p = 1 restriction as a function of k positive scalars, with decay
  /// exponents for quadrature.
  MultiFunction scalar_form(int k) const;

 private:
  Family family_ = Family::det_power;
  double param_ = 0.0;
  std::function<double(std::span<const SymMat>)> fn_;
};

/// Second kind: (1/Gamma_p(alpha)) int_{V>U} |V-U|^(alpha-(p+1)/2) |V|^(-zeta-alpha) |U|^zeta f(V) dV
/// per argument. Estimated as Gamma_p(zeta)/Gamma_p(zeta+alpha) E f(U^(1/2) W^-1 U^(1/2)),
/// W ~ beta(zeta, alpha). For (p-3)/2 < zeta <= (p-1)/2 a beta(zeta+1, alpha)
/// proposal is reweighted by |W|^-1.
McEstimate kober_matrix_second(const MatrixOpParams& params, const MatrixTestFunction& f, std::span<const SymMat> u,
                               const MCConfig& mc = {});

/// First kind: (|U|^(-zeta-alpha)/Gamma_p(alpha)) int_{O<V<U} |U-V|^(alpha-(p+1)/2) |V|^zeta f(V) dV
/// per argument. Estimated as Gamma_p(zeta+(p+1)/2)/Gamma_p(zeta+(p+1)/2+alpha) E f(U^(1/2) W U^(1/2)),
/// W ~ beta(zeta+(p+1)/2, alpha).
McEstimate kober_matrix_first(const MatrixOpParams& params, const MatrixTestFunction& f, std::span<const SymMat> u,
                              const MCConfig& mc = {});

/// Dispatches on params.kind.
McEstimate kober_matrix(const MatrixOpParams& params, const MatrixTestFunction& f, std::span<const SymMat> u,
                        const MCConfig& mc = {});

/// The importance-sampling constant multiplying E f in the two estimators.
double kober_matrix_constant(const MatrixOpParams& params);

enum class ChainRule {
  /// beta_j = zeta_{j+1} + ... + zeta_k + (k - j) + tail
  dirichlet,
  /// beta_j = zeta_{j+1} + ... + zeta_k + (k - j)(p+1)/2 + tail
  dirichlet_scaled,
  /// gamma_j = zeta_{j+1} + ... + zeta_{k+1}   (zeta has k+1 entries)
  dirichlet_first_kind,
  /// delta_j = zeta_{j+1} + ... + zeta_last + beta_j + ... + beta_k
  generalized_dirichlet,
};

struct ChainSpec {
  ChainRule rule = ChainRule::dirichlet;
  int p = 1;
  std::vector<double> zeta;
  /// Only for generalized_dirichlet; its length is k.
  std::vector<double> beta;
  double tail = 0.0;
};

/// Second shapes (b_1, ..., b_k) produced by a chain rule. Values are not
/// domain checked; see chain_shapes_valid.
std::vector<double> param_chain(const ChainSpec& spec);

/// True when every b_j > (p-1)/2.
bool chain_shapes_valid(int p, std::span<const double> shapes);

/// Constant c such that (operator with second shapes b_j applied to the
/// density of V) = c * (density of U drawn by the density-mode sampler).
///   second kind: prod Gamma_p(zeta_j+(p+1)/2) / Gamma_p(b_j+zeta_j+(p+1)/2)
///   first kind:  prod Gamma_p(zeta_j) / Gamma_p(zeta_j+b_j)
double density_constant(OperatorKind kind, int p, std::span<const double> zeta, std::span<const double> b);

/// Sampler of U given a sampler of V:
///   second kind: U_j = V_j^(1/2) Y_j V_j^(1/2), Y_j ~ beta(zeta_j+(p+1)/2, b_j)
///   first kind:  U_j = V_j^(1/2) Y_j^(-1) V_j^(1/2), Y_j ~ beta(zeta_j, b_j)
std::function<std::vector<SymMat>(Rng&)> density_mode_sampler(OperatorKind kind, int p, std::vector<double> zeta,
                                                              std::vector<double> b,
                                                              std::function<std::vector<SymMat>(Rng&)> v_sampler);

/// n draws of U from density_mode_sampler, taken from mc.n_streams substreams.
std::vector<std::vector<SymMat>> density_mode_sample(OperatorKind kind, int p, const std::vector<double>& zeta,
                                                     const std::vector<double>& b,
                                                     const std::function<std::vector<SymMat>(Rng&)>& v_sampler,
                                                     const MCConfig& mc);

}  // namespace kober
