#include "hermitsep/polyspace.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include "hermitsep/monomials.hpp"
#include "hermitsep/rng.hpp"

namespace hermitsep {

namespace {

// Complex polynomial used only for expanding P_IJ.
using CTermMap = std::map<std::vector<int>, Complex>;

void addC(CTermMap& terms, const std::vector<int>& e, Complex c) {
  auto [it, inserted] = terms.emplace(e, c);
  if (!inserted) it->second += c;
}

CTermMap multiply(const CTermMap& a, const CTermMap& b, int nvars) {
  CTermMap out;
  std::vector<int> sum(nvars);
  for (const auto& [ea, ca] : a)
    for (const auto& [eb, cb] : b) {
      for (int i = 0; i < nvars; ++i) sum[i] = ea[i] + eb[i];
      addC(out, sum, ca * cb);
    }
  return out;
}

// (x_j^re + sign * i * x_j^im)_{t+1} as a complex-coefficient linear polynomial.
CTermMap modeFactor(const VariableLayout& layout, int j, int t, double sign) {
  CTermMap terms;
  std::vector<int> e(layout.nvars, 0);
  e[layout.reIndex(j, t)] = 1;
  addC(terms, e, Complex(1.0, 0.0));
  if (t > 0) {
    std::vector<int> ei(layout.nvars, 0);
    ei[layout.imIndex(j, t)] = 1;
    addC(terms, ei, Complex(0.0, sign));
  }
  return terms;
}

constexpr double kCoeffCleanup = 1e-14;

}  // namespace

std::pair<RealPolynomial, RealPolynomial> buildPij(const std::vector<int>& I,
                                                   const std::vector<int>& J,
                                                   const VariableLayout& layout) {
  const int m = layout.modeCount();
  if (static_cast<int>(I.size()) != m || static_cast<int>(J.size()) != m)
    throw std::invalid_argument("buildPij: index arity mismatch");
  for (int s = 0; s < m; ++s)
    if (I[s] < 0 || I[s] >= layout.shape.dims[s] || J[s] < 0 || J[s] >= layout.shape.dims[s])
      throw std::out_of_range("buildPij: multi-index out of range");

  CTermMap prod;
  addC(prod, std::vector<int>(layout.nvars, 0), Complex(1.0, 0.0));
  for (int s = 0; s < m; ++s) {
    prod = multiply(prod, modeFactor(layout, s, I[s], +1.0), layout.nvars);
    prod = multiply(prod, modeFactor(layout, s, J[s], -1.0), layout.nvars);
  }

  RealPolynomial re(layout.nvars);
  RealPolynomial im(layout.nvars);
  for (const auto& [e, c] : prod) {
    if (std::abs(c.real()) > kCoeffCleanup) re.addTerm(e, c.real());
    if (std::abs(c.imag()) > kCoeffCleanup) im.addTerm(e, c.imag());
  }
  return {re, im};
}

KConstraints constraintsK(const VariableLayout& layout) {
  KConstraints out;
  for (int j = 0; j < layout.modeCount(); ++j) {
    RealPolynomial h(layout.nvars);
    for (int q = 0; q < layout.blockSize(j); ++q) {
      std::vector<int> e(layout.nvars, 0);
      e[layout.blockOffset(j) + q] = 2;
      h.addTerm(e, 1.0);
    }
    h.addTerm(std::vector<int>(layout.nvars, 0), -1.0);
    out.sphere.push_back(std::move(h));
    out.gauge.push_back(RealPolynomial::variable(layout.nvars, layout.blockOffset(j)));
  }
  return out;
}

RealPolynomial genericObjective(std::uint64_t seed, const VariableLayout& layout) {
  const int m = layout.modeCount();
  const MonomialBasis basis(layout.nvars, m);
  const long side = basis.size();

  Rng rng(mixSeed(seed, 0x0b1ec71feULL));
  RealMatrix g(side, side);
  for (long i = 0; i < side; ++i)
    for (long j = 0; j < side; ++j) g(i, j) = rng.gaussian();
  const RealMatrix gram = g.transpose() * g;

  RealPolynomial f(layout.nvars);
  std::vector<int> sum(layout.nvars);
  for (long a = 0; a < side; ++a) {
    const std::vector<int>& ea = basis.exponents(a);
    for (long b = 0; b < side; ++b) {
      const std::vector<int>& eb = basis.exponents(b);
      for (int i = 0; i < layout.nvars; ++i) sum[i] = ea[i] + eb[i];
      f.addTerm(sum, gram(a, b));
    }
  }
  return f;
}

std::vector<Vector> complexLift(const RealVector& v, const VariableLayout& layout) {
  if (v.size() != layout.nvars) throw std::invalid_argument("complexLift: point arity mismatch");
  std::vector<Vector> out;
  out.reserve(layout.modeCount());
  for (int j = 0; j < layout.modeCount(); ++j) {
    const int n = layout.shape.dims[j];
    Vector u(n);
    u(0) = Complex(v[layout.reIndex(j, 0)], 0.0);
    for (int t = 1; t < n; ++t) u(t) = Complex(v[layout.reIndex(j, t)], v[layout.imIndex(j, t)]);
    out.push_back(std::move(u));
  }
  return out;
}

RealVector realifyPoint(const std::vector<Vector>& u, const VariableLayout& layout) {
  if (static_cast<int>(u.size()) != layout.modeCount())
    throw std::invalid_argument("realifyPoint: mode count mismatch");
  RealVector v = RealVector::Zero(layout.nvars);
  for (int j = 0; j < layout.modeCount(); ++j) {
    const int n = layout.shape.dims[j];
    if (u[j].size() != n) throw std::invalid_argument("realifyPoint: vector length mismatch");
    if (std::abs(u[j](0).imag()) > 1e-12 * std::max(1.0, u[j].norm()))
      throw std::invalid_argument("realifyPoint: leading entry must be real (gauge-fixed)");
    v[layout.reIndex(j, 0)] = u[j](0).real();
    for (int t = 1; t < n; ++t) {
      v[layout.reIndex(j, t)] = u[j](t).real();
      v[layout.imIndex(j, t)] = u[j](t).imag();
    }
  }
  return v;
}

}  // namespace hermitsep
