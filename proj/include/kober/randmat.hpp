#pragma once

// Seeded samplers: scalar gamma/beta/normal/chi-square, Wishart via the
// Bartlett triangle, type-1 and type-2 matrix-variate beta, and the
// Dirichlet chain map between dependent X_j and independent Y_j.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "kober/spd.hpp"

namespace kober {

/// Identifies an independent substream: (seed, stream_id) is expanded
/// through std::seed_seq into the engine state.
struct RngStream {
  std::uint64_t seed = 0xE4DE17;
  std::uint64_t stream_id = 0;
};

/// Bit-reproducible generator. All variates are produced by code in this
/// library (no std:: distributions, whose output is implementation defined).
/// In mirrored mode every base uniform u is replaced by 1 - u and every
/// normal z by -z, which yields the antithetic partner of a stream.
class Rng {
 public:
  explicit Rng(RngStream stream, bool mirrored = false);

  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  /// Gamma(shape, scale 1), shape > 0 (Marsaglia-Tsang).
  double gamma(double shape);
  double chi_square(double df);
  double beta(double a, double b);

 private:
  std::mt19937_64 engine_;
  bool mirrored_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Standard Wishart W_p(df, I) for real df > p - 1.
SymMat sample_wishart(int p, double df, Rng& rng);
/// Lower-triangular Bartlett factor T of a W_p(df, I) draw, W = T T'.
Mat sample_wishart_factor(int p, double df, Rng& rng);

struct BetaMatParams {
  int p = 1;
  double a = 1.0;
  double b = 1.0;
};

void validate(const BetaMatParams& params);

/// Type-1 matrix beta: density proportional to |X|^(a-(p+1)/2) |I-X|^(b-(p+1)/2)
/// on O < X < I, drawn as (S1+S2)^(-1/2) S1 (S1+S2)^(-1/2) with S1 ~ W(2a),
/// S2 ~ W(2b).
SymMat sample_matrix_beta(const BetaMatParams& params, Rng& rng);

/// Type-2 matrix beta: density proportional to |X|^(a-(p+1)/2) |I+X|^-(a+b)
/// on X > O, drawn as L^-T S1 L^-1 with L L' = S2 (equal in law to
/// S2^(-1/2) S1 S2^(-1/2) since S1 is orthogonally invariant).
SymMat sample_matrix_beta2(const BetaMatParams& params, Rng& rng);

/// Matrix gamma: density |X|^(a-(p+1)/2) exp(-tr(X)/scale) / (scale^(pa) Gamma_p(a)).
SymMat sample_matrix_gamma(int p, double shape, double scale, Rng& rng);

/// Matrix Dirichlet with shapes (a_1, ..., a_k; a_{k+1}), built from
/// independent Wisharts normalized by the symmetric square root of their sum.
/// Returns X_1..X_k.
std::vector<SymMat> sample_matrix_dirichlet(int p, std::span<const double> shapes, Rng& rng);

struct DirichletChainParams {
  int p = 1;
  /// zeta_j; the first beta shape of Y_j is zeta_j + (p+1)/2.
  std::vector<double> zeta;
  /// Second beta shape of Y_j, produced by a parameter-chain rule.
  std::vector<double> second;

  int k() const noexcept { return static_cast<int>(zeta.size()); }
};

/// Draws independent Y_j ~ beta(zeta_j + (p+1)/2, second_j) and maps them
/// through dirichlet_chain_forward. Throws ChainDomainError when a derived
/// shape is outside (p-1)/2.
std::vector<SymMat> sample_dirichlet_chain(const DirichletChainParams& params, Rng& rng);

/// Y -> X: X_1 = Y_1, X_j = (I - S_{j-1})^(1/2) Y_j (I - S_{j-1})^(1/2) with
/// S_{j-1} = X_1 + ... + X_{j-1}.
std::vector<SymMat> dirichlet_chain_forward(std::span<const SymMat> y);

/// X -> Y: Y_1 = X_1, Y_j = (I - S_{j-1})^(-1/2) X_j (I - S_{j-1})^(-1/2).
std::vector<SymMat> inverse_dirichlet_chain(std::span<const SymMat> x);

}  // namespace kober
