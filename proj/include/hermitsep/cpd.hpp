#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "hermitsep/types.hpp"

namespace hermitsep {

/// Dense complex tensor, row-major (last index fastest).
struct ComplexTensor {
  std::vector<long> dims;
  std::vector<Complex> values;

  ComplexTensor() = default;
  explicit ComplexTensor(std::vector<long> d);

  int order() const { return static_cast<int>(dims.size()); }
  long entryCount() const { return static_cast<long>(values.size()); }
  long linearIndex(const std::vector<long>& idx) const;
  Complex& at(const std::vector<long>& idx) { return values[linearIndex(idx)]; }
  Complex at(const std::vector<long>& idx) const { return values[linearIndex(idx)]; }

  double norm() const;

  /// Mode-n unfolding, dims[n] x prod(other dims); among the column modes the
  /// lower mode index varies fastest.
  Matrix unfolding(int mode) const;

  static ComplexTensor fromRankOne(const std::vector<Vector>& factors);
  ComplexTensor& operator+=(const ComplexTensor& other);
};

/// Column-wise Kronecker product of two matrices with equal column counts.
Matrix khatriRao(const Matrix& u, const Matrix& v);

struct Cpd {
  std::vector<Matrix> factors;  // per-term scales folded into mode 0
  double fit = std::numeric_limits<double>::infinity();  // relative ||T - That|| / ||T||

  int rank() const { return factors.empty() ? 0 : static_cast<int>(factors[0].cols()); }
  ComplexTensor reconstruct(const std::vector<long>& dims) const;
};

struct CpdOptions {
  int maxSweeps = 2000;
  double fitTol = 1e-10;
  int restarts = 10;
  std::uint64_t seed = 1;
  double stagnationImprovement = 1e-4;  // relative per-window improvement to keep going
  int stagnationWindow = 50;
};

/// Alternating least squares with random complex Gaussian restarts.  Returns
/// the best run; callers decide whether the recorded fit is acceptable.
Cpd cpdAls(const ComplexTensor& t, int rank, const CpdOptions& opts = {});

}  // namespace hermitsep
