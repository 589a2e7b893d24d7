#pragma once

namespace kober {

/// First kind: Mellin convolution of a ratio (integration over V < U).
/// Second kind: Mellin convolution of a product (integration over V > U).
enum class OperatorKind { first, second };

/// Per-variable operator parameters (zeta_j, alpha_j).
struct KernelPair {
  double zeta = 0.0;
  double alpha = 1.0;
};

}  // namespace kober
