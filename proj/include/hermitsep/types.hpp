#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <vector>

namespace hermitsep {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Mode dimensions (n_1, ..., n_m) of a Hermitian tensor.
///
/// The flattening matrix has side M = n_1 * ... * n_m.  Multi-indices are
/// 0-based and map to linear indices in row-major order (first mode varies
/// slowest), which makes the lexicographic multi-index order coincide with
/// the linear order.
struct Shape {
  std::vector<int> dims;

  Shape() = default;
  explicit Shape(std::vector<int> d, long maxFlatEntries = kDefaultMaxFlatEntries)
      : dims(std::move(d)) {
    validate(maxFlatEntries);
  }

  static constexpr long kDefaultMaxFlatEntries = 1L << 26;  // entries of the M x M flattening

  int order() const { return static_cast<int>(dims.size()); }

  long flatSize() const {
    long m = 1;
    for (int n : dims) m *= n;
    return m;
  }

  int totalDim() const {
    int n = 0;
    for (int d : dims) n += d;
    return n;
  }

  /// Number of real variables 2N - m of the gauge-fixed model of the multi-sphere.
  int varCount() const { return 2 * totalDim() - order(); }

  long linearIndex(const std::vector<int>& index) const {
    long lin = 0;
    for (int s = 0; s < order(); ++s) lin = lin * dims[s] + index[s];
    return lin;
  }

  std::vector<int> multiIndex(long lin) const {
    std::vector<int> index(order());
    for (int s = order() - 1; s >= 0; --s) {
      index[s] = static_cast<int>(lin % dims[s]);
      lin /= dims[s];
    }
    return index;
  }

  bool operator==(const Shape& other) const { return dims == other.dims; }

 private:
  void validate(long maxFlatEntries) const {
    if (dims.empty()) throw std::invalid_argument("Shape: at least one mode required");
    for (int n : dims)
      if (n < 1) throw std::invalid_argument("Shape: mode dimensions must be >= 1");
    long m = 1;
    for (int n : dims) {
      m *= n;
      if (m <= 0 || m > (1L << 31)) throw std::invalid_argument("Shape: flattening side overflows");
    }
    if (m * m > maxFlatEntries) throw std::invalid_argument("Shape: flattening entry count exceeds limit");
  }
};

}  // namespace hermitsep
