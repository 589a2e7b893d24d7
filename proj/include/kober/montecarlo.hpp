#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "kober/randmat.hpp"

namespace kober {

inline constexpr std::uint64_t kDefaultSeed = 0xE4DE17;

struct MCConfig {
  std::size_t n_samples = 100000;
  std::uint64_t seed = kDefaultSeed;
  int n_streams = 32;
  /// Average each draw with its mirrored-stream partner.
  bool antithetic = false;
  /// Offset added to every stream id, so independent estimates can share a seed.
  std::uint64_t stream_offset = 0;
};

void validate(const MCConfig& mc);

/// Mean and standard error from stream-wise batch means.
struct McEstimate {
  double mean = 0.0;
  double se = 0.0;
  std::size_t n = 0;
  /// False when the batch-means s.e. is not finite or disagrees with the
  /// pooled i.i.d. s.e. by more than a factor of two.
  bool se_converged = false;
  std::vector<double> batch_means;
};

/// Runs `draw` n_samples times split over n_streams independent substreams.
/// Streams are processed in parallel when more than one hardware thread is
/// available; results are reduced in stream order and do not depend on the
/// thread count.
McEstimate mc_mean(const MCConfig& mc, const std::function<double(Rng&)>& draw);

/// Several functionals of the same draws. `draw` writes `dim` values.
std::vector<McEstimate> mc_mean_vec(const MCConfig& mc, int dim, const std::function<void(Rng&, std::span<double>)>& draw);

/// |a - b| / sqrt(se_a^2 + se_b^2), or |a - b| / se_a when b is exact.
double z_score(double a, double se_a, double b, double se_b = 0.0);

}  // namespace kober
