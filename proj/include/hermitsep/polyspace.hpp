#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "hermitsep/polynomial.hpp"
#include "hermitsep/types.hpp"

namespace hermitsep {

/// Real-variable layout of the gauge-fixed multi-sphere model K.  Mode j
/// contributes the block
///   ( (x_j^re)_1, ..., (x_j^re)_{n_j}, (x_j^im)_2, ..., (x_j^im)_{n_j} )
/// of 2 n_j - 1 variables; (x_j^im)_1 is identically zero and has no slot.
struct VariableLayout {
  Shape shape;
  std::vector<int> offsets;
  int nvars = 0;

  explicit VariableLayout(const Shape& s) : shape(s) {
    offsets.resize(s.order());
    int off = 0;
    for (int j = 0; j < s.order(); ++j) {
      offsets[j] = off;
      off += 2 * s.dims[j] - 1;
    }
    nvars = off;
  }

  int modeCount() const { return shape.order(); }
  int blockSize(int j) const { return 2 * shape.dims[j] - 1; }
  int blockOffset(int j) const { return offsets[j]; }

  /// Index of (x_j^re)_{t+1}, t in [0, n_j).
  int reIndex(int j, int t) const { return offsets[j] + t; }
  /// Index of (x_j^im)_{t+1}, t in [1, n_j).
  int imIndex(int j, int t) const { return offsets[j] + shape.dims[j] + (t - 1); }
};

/// Real and imaginary parts of P_IJ(x) = prod_s (x_s^re + i x_s^im)_{i_s}
/// (x_s^re - i x_s^im)_{j_s}, with (x_s^im)_1 = 0.  Multi-indices are 0-based.
/// Both polynomials have degree 2m; T is identically zero when I = J.
std::pair<RealPolynomial, RealPolynomial> buildPij(const std::vector<int>& I,
                                                   const std::vector<int>& J,
                                                   const VariableLayout& layout);

struct KConstraints {
  std::vector<RealPolynomial> sphere;  // h_j = ||x_j||^2 - 1
  std::vector<RealPolynomial> gauge;   // g_j = (x_j)_1
};

KConstraints constraintsK(const VariableLayout& layout);

/// F = [x]_m^T (G^T G) [x]_m with G square standard-normal, deterministic per
/// seed.  F is a sum of squares, generically in the interior of Sigma[x]_{2m}.
RealPolynomial genericObjective(std::uint64_t seed, const VariableLayout& layout);

/// Lifts a real point of the layout to the tuple of complex mode vectors.
std::vector<Vector> complexLift(const RealVector& v, const VariableLayout& layout);

/// Inverse of complexLift for gauge-fixed vectors (first entries real).
RealVector realifyPoint(const std::vector<Vector>& u, const VariableLayout& layout);

}  // namespace hermitsep
