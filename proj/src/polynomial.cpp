#include "hermitsep/polynomial.hpp"

#include <cmath>
#include <stdexcept>

namespace hermitsep {

RealPolynomial RealPolynomial::constant(int nvars, double value) {
  RealPolynomial p(nvars);
  p.addTerm(Exponents(nvars, 0), value);
  return p;
}

RealPolynomial RealPolynomial::variable(int nvars, int index, double coeff) {
  if (index < 0 || index >= nvars) throw std::out_of_range("RealPolynomial: variable index");
  RealPolynomial p(nvars);
  Exponents e(nvars, 0);
  e[index] = 1;
  p.addTerm(e, coeff);
  return p;
}

int RealPolynomial::degree() const {
  int deg = 0;
  for (const auto& [e, c] : terms_) {
    int d = 0;
    for (int x : e) d += x;
    if (d > deg) deg = d;
  }
  return deg;
}

void RealPolynomial::addTerm(const Exponents& exponents, double coeff) {
  if (static_cast<int>(exponents.size()) != nvars_)
    throw std::invalid_argument("RealPolynomial: exponent arity mismatch");
  auto [it, inserted] = terms_.emplace(exponents, coeff);
  if (!inserted) it->second += coeff;
  if (std::abs(it->second) < 1e-300) terms_.erase(it);
}

double RealPolynomial::evaluate(const RealVector& x) const {
  if (x.size() != nvars_) throw std::invalid_argument("RealPolynomial: point arity mismatch");
  double total = 0.0;
  for (const auto& [e, c] : terms_) {
    double term = c;
    for (int i = 0; i < nvars_; ++i)
      for (int k = 0; k < e[i]; ++k) term *= x[i];
    total += term;
  }
  return total;
}

RealPolynomial& RealPolynomial::operator+=(const RealPolynomial& other) {
  for (const auto& [e, c] : other.terms_) addTerm(e, c);
  return *this;
}

RealPolynomial& RealPolynomial::operator-=(const RealPolynomial& other) {
  for (const auto& [e, c] : other.terms_) addTerm(e, -c);
  return *this;
}

RealPolynomial& RealPolynomial::operator*=(double scale) {
  if (scale == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto& [e, c] : terms_) c *= scale;
  return *this;
}

RealPolynomial RealPolynomial::operator*(const RealPolynomial& other) const {
  RealPolynomial out(nvars_);
  Exponents sum(nvars_);
  for (const auto& [ea, ca] : terms_)
    for (const auto& [eb, cb] : other.terms_) {
      for (int i = 0; i < nvars_; ++i) sum[i] = ea[i] + eb[i];
      out.addTerm(sum, ca * cb);
    }
  return out;
}

RealPolynomial RealPolynomial::cleaned(double eps) const {
  RealPolynomial out(nvars_);
  for (const auto& [e, c] : terms_)
    if (std::abs(c) > eps) out.addTerm(e, c);
  return out;
}

}  // namespace hermitsep
