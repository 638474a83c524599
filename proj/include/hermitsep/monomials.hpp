#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

namespace hermitsep {

long long binomial(int n, int k);

/// All monomials over `nvars` variables up to `maxDegree`, in graded
/// lexicographic order: degrees ascend, and inside a degree exponent vectors
/// descend lexicographically, so [x]_d = (1, x1, ..., xn, x1^2, x1 x2, ...).
/// Index-of-monomial and monomial-of-index are mutual inverses.
class MonomialBasis {
 public:
  MonomialBasis(int nvars, int maxDegree);

  int nvars() const { return nvars_; }
  int maxDegree() const { return maxDegree_; }
  long size() const { return static_cast<long>(exponents_.size()); }

  /// Number of monomials of degree <= d (a prefix of the basis).
  long sizeUpToDegree(int d) const;

  const std::vector<int>& exponents(long index) const { return exponents_[index]; }
  int degree(long index) const { return degrees_[index]; }

  long indexOf(const std::vector<int>& exponents) const;
  long indexOfSum(long a, long b) const;

 private:
  struct ExpHash {
    std::size_t operator()(const std::vector<int>& v) const {
      std::size_t h = 1469598103934665603ULL;
      for (int x : v) {
        h ^= static_cast<std::size_t>(x) + 0x9e3779b9;
        h *= 1099511628211ULL;
      }
      return h;
    }
  };

  int nvars_;
  int maxDegree_;
  std::vector<std::vector<int>> exponents_;
  std::vector<int> degrees_;
  std::unordered_map<std::vector<int>, long, ExpHash> index_;
};

}  // namespace hermitsep
