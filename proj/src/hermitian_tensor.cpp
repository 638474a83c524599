#include "hermitsep/hermitian_tensor.hpp"

#include <cmath>
#include <stdexcept>

namespace hermitsep {

HermitianTensor HermitianTensor::fromFlattening(const Shape& shape, const Matrix& flat,
                                                double tol) {
  const long m = shape.flatSize();
  if (flat.rows() != m || flat.cols() != m)
    throw std::invalid_argument("HermitianTensor: flattening size does not match shape");
  const double scale = std::max(1.0, flat.cwiseAbs().maxCoeff());
  const double dev = (flat - flat.adjoint()).cwiseAbs().maxCoeff();
  if (dev > tol * scale)
    throw std::invalid_argument("HermitianTensor: matrix is not Hermitian within tolerance");
  HermitianTensor h;
  h.shape_ = shape;
  h.flat_ = 0.5 * (flat + flat.adjoint().eval());
  return h;
}

HermitianTensor HermitianTensor::swappedModes() const {
  if (shape_.order() != 2)
    throw std::invalid_argument("swappedModes: only defined for order-2 tensors");
  const int n1 = shape_.dims[0];
  const int n2 = shape_.dims[1];
  Shape swapped(std::vector<int>{n2, n1});
  Matrix flat(flat_.rows(), flat_.cols());
  for (int i1 = 0; i1 < n1; ++i1)
    for (int i2 = 0; i2 < n2; ++i2)
      for (int j1 = 0; j1 < n1; ++j1)
        for (int j2 = 0; j2 < n2; ++j2)
          flat(i2 * n1 + i1, j2 * n1 + j1) = flat_(i1 * n2 + i2, j1 * n2 + j2);
  HermitianTensor h;
  h.shape_ = swapped;
  h.flat_ = std::move(flat);
  return h;
}

Matrix kronecker(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (long i = 0; i < a.rows(); ++i)
    for (long j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix kroneckerAll(const std::vector<Matrix>& factors) {
  if (factors.empty()) throw std::invalid_argument("kroneckerAll: empty factor list");
  Matrix out = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) out = kronecker(out, factors[i]);
  return out;
}

Vector kroneckerAll(const std::vector<Vector>& factors) {
  if (factors.empty()) throw std::invalid_argument("kroneckerAll: empty factor list");
  Vector out = factors.front();
  for (std::size_t i = 1; i < factors.size(); ++i) {
    Vector next(out.size() * factors[i].size());
    for (long a = 0; a < out.size(); ++a)
      next.segment(a * factors[i].size(), factors[i].size()) = out(a) * factors[i];
    out = std::move(next);
  }
  return out;
}

Matrix rankOneFlattening(const std::vector<Vector>& vectors) {
  std::vector<Matrix> outer;
  outer.reserve(vectors.size());
  for (const Vector& u : vectors) outer.push_back(u * u.adjoint());
  return kroneckerAll(outer);
}

HermitianTensor unflattenMatrix(const Matrix& flat, const Shape& shape, double tol) {
  return HermitianTensor::fromFlattening(shape, flat, tol);
}

double evalForm(const HermitianTensor& h, const std::vector<Vector>& z) {
  const Shape& shape = h.shape();
  if (static_cast<int>(z.size()) != shape.order())
    throw std::invalid_argument("evalForm: wrong number of mode vectors");
  for (int j = 0; j < shape.order(); ++j)
    if (z[j].size() != shape.dims[j])
      throw std::invalid_argument("evalForm: mode vector length mismatch");
  const Vector v = kroneckerAll(z);
  const Complex raw = v.adjoint() * h.flattening() * v;
  if (std::abs(raw.imag()) > 1e-10 * std::max(1.0, std::abs(raw)))
    throw std::runtime_error("evalForm: value has a non-negligible imaginary part");
  return raw.real();
}

HermitianTensor fromDecomposition(const HermitianDecomposition& d, const Shape& shape) {
  const long m = shape.flatSize();
  Matrix flat = Matrix::Zero(m, m);
  for (const DecompositionTerm& term : d.terms) {
    if (static_cast<int>(term.vectors.size()) != shape.order())
      throw std::invalid_argument("fromDecomposition: term mode count mismatch");
    for (int j = 0; j < shape.order(); ++j)
      if (term.vectors[j].size() != shape.dims[j])
        throw std::invalid_argument("fromDecomposition: vector length mismatch");
    flat += term.weight * rankOneFlattening(term.vectors);
  }
  return HermitianTensor::fromFlattening(shape, flat, 1e-10);
}

HermitianTensor assembleFromPsd(const PsdDecomposition& p, const Shape& shape) {
  const long m = shape.flatSize();
  Matrix flat = Matrix::Zero(m, m);
  for (const PsdTerm& term : p.terms) {
    if (static_cast<int>(term.factors.size()) != shape.order())
      throw std::invalid_argument("assembleFromPsd: term mode count mismatch");
    for (int j = 0; j < shape.order(); ++j)
      if (term.factors[j].rows() != shape.dims[j] || term.factors[j].cols() != shape.dims[j])
        throw std::invalid_argument("assembleFromPsd: factor size mismatch");
    flat += kroneckerAll(term.factors);
  }
  return HermitianTensor::fromFlattening(shape, flat, 1e-10);
}

double residual(const HermitianTensor& h, const HermitianTensor& candidate) {
  if (!(h.shape() == candidate.shape()))
    throw std::invalid_argument("residual: shape mismatch");
  return (h.flattening() - candidate.flattening()).norm() / std::max(1.0, h.frobeniusNorm());
}

}  // namespace hermitsep
