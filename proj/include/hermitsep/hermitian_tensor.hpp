#pragma once

#include <optional>
#include <vector>

#include "hermitsep/types.hpp"

namespace hermitsep {

/// Hermitian tensor H in C^{[n_1,...,n_m]}, stored as its Hermitian
/// flattening matrix (side M = n_1...n_m).  Entries are addressed either
/// through the flattening or through multi-index pairs (I, J); the two views
/// are related by a pure index translation.
class HermitianTensor {
 public:
  HermitianTensor() = default;

  /// Builds a tensor from its flattening.  The matrix must be Hermitian
  /// within `tol * max(1, max|entry|)`; entries are then symmetrized so the
  /// stored matrix is exactly Hermitian.
  static HermitianTensor fromFlattening(const Shape& shape, const Matrix& flat,
                                        double tol = 1e-12);

  const Shape& shape() const { return shape_; }
  const Matrix& flattening() const { return flat_; }
  long flatSize() const { return flat_.rows(); }

  Complex entry(const std::vector<int>& I, const std::vector<int>& J) const {
    return flat_(shape_.linearIndex(I), shape_.linearIndex(J));
  }

  double frobeniusNorm() const { return flat_.norm(); }

  /// Swaps the two modes of an order-2 tensor: H'_{i2 i1 j2 j1} = H_{i1 i2 j1 j2}.
  HermitianTensor swappedModes() const;

 private:
  Shape shape_;
  Matrix flat_;
};

struct DecompositionTerm {
  double weight = 0.0;
  std::vector<Vector> vectors;  // one per mode
};

struct HermitianDecomposition {
  std::vector<DecompositionTerm> terms;
};

struct PsdTerm {
  std::vector<Matrix> factors;  // Hermitian psd, sizes n_j x n_j
};

struct PsdDecomposition {
  std::vector<PsdTerm> terms;
};

/// Kronecker product, complex dense.
Matrix kronecker(const Matrix& a, const Matrix& b);
Matrix kroneckerAll(const std::vector<Matrix>& factors);
Vector kroneckerAll(const std::vector<Vector>& factors);

/// Flattening of the rank-1 Hermitian tensor [u_1,...,u_m]_oh, i.e.
/// (u_1 u_1*) kron ... kron (u_m u_m*).
Matrix rankOneFlattening(const std::vector<Vector>& vectors);

/// Identity view: the flattening matrix m(H).
inline const Matrix& flattenMatrix(const HermitianTensor& h) { return h.flattening(); }

/// Inverse of flattenMatrix: exact index re-interpretation, no arithmetic.
HermitianTensor unflattenMatrix(const Matrix& flat, const Shape& shape, double tol = 1e-12);

/// <H, [z_1,...,z_m]_oh>; real for Hermitian H.  Throws if the imaginary
/// part of the raw inner product exceeds 1e-10 relative to the value.
double evalForm(const HermitianTensor& h, const std::vector<Vector>& z);

HermitianTensor fromDecomposition(const HermitianDecomposition& d, const Shape& shape);
HermitianTensor assembleFromPsd(const PsdDecomposition& p, const Shape& shape);

/// || H - candidate ||_F / max(1, ||H||_F).
double residual(const HermitianTensor& h, const HermitianTensor& candidate);

}  // namespace hermitsep
