#pragma once

#include <map>
#include <vector>

#include "hermitsep/types.hpp"

namespace hermitsep {

/// Sparse real polynomial over a fixed number of variables.  Terms are keyed
/// by exponent vectors; coefficients with magnitude below 1e-300 are never
/// stored.  The term map iterates in lexicographic exponent order, which
/// keeps downstream assembly deterministic.
class RealPolynomial {
 public:
  using Exponents = std::vector<int>;
  using TermMap = std::map<Exponents, double>;

  explicit RealPolynomial(int nvars) : nvars_(nvars) {}

  static RealPolynomial constant(int nvars, double value);
  static RealPolynomial variable(int nvars, int index, double coeff = 1.0);

  int nvars() const { return nvars_; }
  bool isZero() const { return terms_.empty(); }
  /// Max |alpha| over stored terms; 0 for the zero polynomial.
  int degree() const;

  const TermMap& terms() const { return terms_; }

  void addTerm(const Exponents& exponents, double coeff);

  double evaluate(const RealVector& x) const;

  RealPolynomial& operator+=(const RealPolynomial& other);
  RealPolynomial& operator-=(const RealPolynomial& other);
  RealPolynomial& operator*=(double scale);
  RealPolynomial operator*(const RealPolynomial& other) const;

  friend RealPolynomial operator+(RealPolynomial a, const RealPolynomial& b) { return a += b; }
  friend RealPolynomial operator-(RealPolynomial a, const RealPolynomial& b) { return a -= b; }
  friend RealPolynomial operator*(double s, RealPolynomial p) { return p *= s; }

  /// Drops terms with |coeff| <= eps (cancellation dust from expansions).
  RealPolynomial cleaned(double eps) const;

 private:
  int nvars_;
  TermMap terms_;
};

}  // namespace hermitsep
