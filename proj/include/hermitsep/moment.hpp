#pragma once

#include <Eigen/SparseCore>

#include <string>
#include <vector>

#include "hermitsep/hermitian_tensor.hpp"
#include "hermitsep/monomials.hpp"
#include "hermitsep/polynomial.hpp"
#include "hermitsep/polyspace.hpp"

namespace hermitsep {

/// Truncated moment sequence: a real vector indexed by the graded-lex
/// monomials of degree <= degreeBound over nvars variables.
struct Tms {
  int nvars = 0;
  int degreeBound = 0;
  RealVector values;

  long length() const { return values.size(); }

  /// Prefix corresponding to degree <= newBound.
  Tms truncated(int newBound) const;
};

/// Moments of the Dirac measure at x: entry alpha = x^alpha.
Tms tmsOfPoint(const RealVector& x, int degreeBound);
Tms tmsOfPoint(const RealVector& x, int degreeBound, const MonomialBasis& basis);

/// (M_d(y))_{ab} = y_{a+b} over monomials of degree <= d.
RealMatrix momentMatrix(const Tms& y, int d, const MonomialBasis& basis);

/// d-th localizing matrix of p: <p f1 f2, y> = vec(f1)^T L_p^{(d)}(y) vec(f2).
RealMatrix localizingMatrix(const RealPolynomial& p, const Tms& y, int d,
                            const MonomialBasis& basis);

/// Affine map w -> symmetric matrix, stored as upper-triangle quadruples.
struct PsdBlockMap {
  std::string name;
  int side = 0;
  struct Entry {
    int row, col;   // row <= col
    long monomial;  // index into the tms
    double coeff;
  };
  std::vector<Entry> entries;

  RealMatrix evaluate(const RealVector& w) const;
};

/// Order-k semidefinite relaxation of the separability moment program for a
/// Hermitian tensor: equality rows (tensor matching + localizing-h entries),
/// psd blocks (moment matrix and one localizing-g block per mode).
struct SdpProblem {
  Shape shape;
  int order = 0;  // relaxation order k
  int nvars = 0;
  long tmsLength = 0;
  RealVector c;  // objective coefficients against the tms
  Eigen::SparseMatrix<double, Eigen::RowMajor> A;
  RealVector b;
  std::vector<PsdBlockMap> blocks;
  long tensorRowCount = 0;  // leading rows of A that carry tensor data
  double hScale = 1.0;      // max(1, ||H||_F); used by the solver to normalize b
};

SdpProblem assembleSdp(const HermitianTensor& h, int k, const RealPolynomial& objective);

}  // namespace hermitsep
