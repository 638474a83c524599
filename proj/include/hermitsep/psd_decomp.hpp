#pragma once

#include <optional>
#include <string>
#include <variant>

#include "hermitsep/cpd.hpp"
#include "hermitsep/hermitian_tensor.hpp"

namespace hermitsep {

/// Order-m flattening T(H) with dims (n_1^2, ..., n_m^2); the entry at
/// (vec(i_1,j_1), ..., vec(i_m,j_m)) is H_{I,J}, with vec(i,j) = i*n + j.
ComplexTensor flattenT(const HermitianTensor& h);

/// m = 2 only: T1 has dims (n1, n1, n2^2) with T1[a, b, vec(c,d)] = H_{a c b d}.
ComplexTensor flattenT1(const HermitianTensor& h);

/// m = 2 only: T2 has dims (n1^2, n2, n2) with T2[vec(a,b), c, d] = H_{a c b d}.
ComplexTensor flattenT2(const HermitianTensor& h);

/// Merges modes 3..m of an order-m tensor (m > 3) into one mode; CPD terms of
/// the merged tensor are Kronecker products of the original per-mode factors.
ComplexTensor cubicReshape(const ComplexTensor& t);

struct HermitianPhaseFix {
  Matrix matrix;   // Hermitian, trace >= 0
  Complex phase;   // unit scalar with v = phase * vec(matrix)
  double hermitianResidual = 0.0;
};

/// Rotates a vectorized matrix by a unit phase so it becomes Hermitian.
/// Fails when the vector is not a scalar multiple of a Hermitian matrix
/// within hermTol.
std::optional<HermitianPhaseFix> phaseFixToHermitian(const Vector& v, int n,
                                                     double hermTol = 1e-6);

/// Real coordinates of a Hermitian matrix: real upper triangle including the
/// diagonal (lexicographic), then imaginary strict upper triangle.
RealVector realifyHermitian(const Matrix& b, double tol = 1e-10);

/// Largest k such that every k-subset is linearly independent (per-subset
/// smallest singular value > tol * largest).  Refuses more than 20 vectors.
int kruskalRank(const std::vector<Vector>& vectors, double tol = 1e-8);

struct UniquenessCertificate {
  enum class Kind { Kruskal, CompoundMatrix, None };
  Kind kind = Kind::None;
  std::vector<int> kruskalRanks;  // Kruskal kind
  int kruskalRequired = 0;        // 2s + m - 1
  int rankA = -1;                 // CompoundMatrix kind
  double compoundSigmaRatio = 0.0;

  bool certified() const { return kind != Kind::None; }
};

std::string kindName(UniquenessCertificate::Kind k);

UniquenessCertificate kruskalUniquenessCheck(const Cpd& cpd, double tol = 1e-8);

/// Matrix of all 2x2 minors; rows and columns indexed by lexicographic pairs.
Matrix compoundMatrix(const Matrix& x);

/// Three-mode check of rank(A) = s plus independent columns of C(B) kr C(C);
/// the A mode is the one with the most rows (ties: first).
UniquenessCertificate compoundUniquenessCheck(const Cpd& cpd, double tol = 1e-8);

struct PsdCertification {
  PsdDecomposition decomposition;
  UniquenessCertificate certificate;
  double residual = 0.0;  // relative reconstruction residual
  int rank = 0;           // decomposition length s
  bool rankIsExact = false;  // true when a certificate pins psdrank(H) = s (m >= 3 routes)
};

struct PsdFailure {
  std::string stage;  // "fit", "structure", "phase", "gamma", "psd", "residual", "kron-split"
  int term = -1;
  int mode = -1;
  std::string detail;
};

using PsdResult = std::variant<PsdCertification, PsdFailure>;

/// Turns a CPD of flattenT(H) into a psd decomposition: phase-fix every
/// factor, fold the per-term scalar (must be real positive), check each
/// matrix psd, verify the reconstruction, then attach a uniqueness
/// certificate (Kruskal first, compound-matrix fallback).
PsdResult certifyPsdDecomposition(const HermitianTensor& h, const Cpd& cpd, double tol = 1e-8);

enum class PsdRoute { Auto, T, Cubic, T1, T2 };

struct PsdDecomposeOptions {
  PsdRoute route = PsdRoute::Auto;
  CpdOptions cpd;
  double fitAccept = 1e-8;       // relative CPD fit gate
  double psdTol = 1e-8;          // eigenvalue clip threshold, relative
  double gammaTol = 1e-8;        // per-term scalar must be real within this
  double reconTolFactor = 1e-6;  // ||H - Hhat|| <= factor * (1 + ||H||)
};

/// The full flattening route: route auto picks T (m = 3), cubic (m >= 4), or
/// T1 with a T2 fallback (m = 2).  For m = 2 the reported rank is only an
/// upper bound on psdrank(H).
PsdResult psdDecompose(const HermitianTensor& h, int rank,
                       const PsdDecomposeOptions& opts = {});

/// Sweeps s = 1..maxRank and returns the first certified decomposition.
PsdResult psdDecomposeSweep(const HermitianTensor& h, int maxRank,
                            const PsdDecomposeOptions& opts = {});

}  // namespace hermitsep
