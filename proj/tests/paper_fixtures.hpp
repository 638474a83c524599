#pragma once

// Well-known benchmark tensors used across the test suites.

#include <cmath>
#include <numbers>

#include "hermitsep/hermitian_tensor.hpp"

namespace fixtures {

using hermitsep::Complex;
using hermitsep::HermitianTensor;
using hermitsep::Matrix;
using hermitsep::Shape;
using hermitsep::Vector;

// Hankel tensor on C^{[2,2]}: H_{i1 i2 j1 j2} = i1+i2+j1+j2 (1-based labels).
// Its flattening has a negative eigenvalue, so the tensor is not separable.
inline HermitianTensor hankelC22() {
  const Shape shape({2, 2});
  Matrix flat(4, 4);
  for (int i1 = 1; i1 <= 2; ++i1)
    for (int i2 = 1; i2 <= 2; ++i2)
      for (int j1 = 1; j1 <= 2; ++j1)
        for (int j2 = 1; j2 <= 2; ++j2)
          flat((i1 - 1) * 2 + (i2 - 1), (j1 - 1) * 2 + (j2 - 1)) = i1 + i2 + j1 + j2;
  return HermitianTensor::fromFlattening(shape, flat);
}

// C^{[3,3]}: H_{i1 i2 j1 j2} = i1 j1 + i2 j2; separable with two weight-42 terms.
inline HermitianTensor lambda42C33() {
  const Shape shape({3, 3});
  Matrix flat(9, 9);
  for (int i1 = 1; i1 <= 3; ++i1)
    for (int i2 = 1; i2 <= 3; ++i2)
      for (int j1 = 1; j1 <= 3; ++j1)
        for (int j2 = 1; j2 <= 3; ++j2)
          flat((i1 - 1) * 3 + (i2 - 1), (j1 - 1) * 3 + (j2 - 1)) = i1 * j1 + i2 * j2;
  return HermitianTensor::fromFlattening(shape, flat);
}

inline Vector lambda42VectorA() {  // (1,2,3)/sqrt(14)
  Vector a(3);
  a << 1.0, 2.0, 3.0;
  return a / std::sqrt(14.0);
}

inline Vector lambda42VectorB() {  // (1,1,1)/sqrt(3)
  Vector b(3);
  b << 1.0, 1.0, 1.0;
  return b / std::sqrt(3.0);
}

// Entangled two-qubit mixed state: H = 1/2 psi1 psi1* + 1/2 psi2 psi2*.
inline HermitianTensor psiStateC22() {
  const Complex i(0.0, 1.0);
  Vector v1(4), v2(4);
  v1 << 1.0, 1.0, 0.0, i;            // psi1 entries (1,1),(1,2),(2,1),(2,2)
  v1 /= std::sqrt(3.0);
  v2 << 1.0, -1.0, 4.0 * i, 0.0;
  v2 /= 3.0 * std::sqrt(2.0);
  Matrix flat = 0.5 * (v1 * v1.adjoint()) + 0.5 * (v2 * v2.adjoint());
  return HermitianTensor::fromFlattening(Shape({2, 2}), flat);
}

// Separable C^{[2,2]} tensor with the listed 4x4 flattening (7 known atoms).
inline HermitianTensor comparison1C22() {
  const Complex i(0.0, 1.0);
  Matrix flat(4, 4);
  flat << 32.0, -8.0 + 4.0 * i, 5.0 + i, -4.0,
      -8.0 - 4.0 * i, 32.0, 2.0 - 8.0 * i, 1.0 - 3.0 * i,
      5.0 - i, 2.0 + 8.0 * i, 28.0, -8.0 + 5.0 * i,
      -4.0, 1.0 + 3.0 * i, -8.0 - 5.0 * i, 27.0;
  return HermitianTensor::fromFlattening(Shape({2, 2}), flat);
}

// Separable C^{[3,3]} tensor with the listed 9x9 flattening (9 known atoms).
inline HermitianTensor comparison2C33() {
  const Complex i(0.0, 1.0);
  Matrix flat(9, 9);
  flat << 10.0, -2.0 - 2.0 * i, 1.0 + i, 7.0 - i, -2.0 - 4.0 * i, 2.0 * i, -4.0 - 6.0 * i, 0.0, -2.0,
      -2.0 + 2.0 * i, 10.0, -6.0 + i, -2.0, 5.0 + 3.0 * i, -5.0 + i, -4.0 - 4.0 * i, -4.0 + 2.0 * i, 3.0 + i,
      1.0 - i, -6.0 - i, 12.0, 2.0 + 4.0 * i, -5.0 - i, 8.0 + i, 4.0 + 6.0 * i, -3.0 - i, -4.0 - 2.0 * i,
      7.0 + i, -2.0, 2.0 - 4.0 * i, 9.0, -1.0 - 3.0 * i, -1.0 - i, 1.0 - 7.0 * i, -2.0, -4.0 + 2.0 * i,
      -2.0 + 4.0 * i, 5.0 - 3.0 * i, -5.0 + i, -1.0 + 3.0 * i, 8.0, -5.0 - i, -2.0 * i, 4.0, 2.0 * i,
      -2.0 * i, -5.0 - i, 8.0 - i, -1.0 + i, -5.0 + i, 11.0, 2.0 + 4.0 * i, -2.0 + 4.0 * i, 3.0 - 5.0 * i,
      -4.0 + 6.0 * i, -4.0 + 4.0 * i, 4.0 - 6.0 * i, 1.0 + 7.0 * i, 2.0 * i, 2.0 - 4.0 * i, 20.0, -3.0 - i, 2.0,
      0.0, -4.0 - 2.0 * i, -3.0 + i, -2.0, 4.0, -2.0 - 4.0 * i, -3.0 + i, 17.0, -9.0 + i,
      -2.0, 3.0 - i, -4.0 + 2.0 * i, -4.0 - 2.0 * i, -2.0 * i, 3.0 + 5.0 * i, 2.0, -9.0 - i, 22.0;
  return HermitianTensor::fromFlattening(Shape({3, 3}), flat);
}

// The A/B factors of the C^{[8,8,8]} psd-decomposition benchmark (both psd):
// A has diagonal 7 + i^2 and off-diagonal 6 + (j - i) sqrt(-1); B is the
// Fourier-type Gram matrix sum_k exp((k-1)/8 (i-j) pi sqrt(-1)).
inline Matrix cube888FactorA() {
  const Complex i(0.0, 1.0);
  Matrix a(8, 8);
  for (int r = 1; r <= 8; ++r)
    for (int c = 1; c <= 8; ++c)
      a(r - 1, c - 1) = (r == c) ? Complex(7.0 + r * r, 0.0) : Complex(6.0, 0.0) + double(c - r) * i;
  return a;
}

inline Matrix cube888FactorB() {
  Matrix b = Matrix::Zero(8, 8);
  for (int r = 1; r <= 8; ++r)
    for (int c = 1; c <= 8; ++c)
      for (int k = 1; k <= 8; ++k)
        b(r - 1, c - 1) += std::polar(1.0, (k - 1) / 8.0 * (r - c) * std::numbers::pi);
  return b;
}

// m(H) = A kr B kr I + B kr I kr A + I kr A kr B on C^{[8,8,8]}; psd rank 3.
inline HermitianTensor cube888() {
  const Matrix a = cube888FactorA();
  const Matrix b = cube888FactorB();
  const Matrix id = Matrix::Identity(8, 8);
  using hermitsep::kroneckerAll;
  using MatList = std::vector<Matrix>;
  Matrix flat = kroneckerAll(MatList{a, b, id}) + kroneckerAll(MatList{b, id, a}) +
                kroneckerAll(MatList{id, a, b});
  return HermitianTensor::fromFlattening(Shape({8, 8, 8}), flat);
}

// C^{[4,3]} benchmark for the T1 route:
// H_{i1 i2 j1 j2} = (4 i1 j1 + sqrt(-1)(j1 - i1) + 1) delta_{i2 j2}
//                   + i1 j1 (i2 - j2) sqrt(-1).
inline HermitianTensor m2ExampleC43() {
  const Complex i(0.0, 1.0);
  Matrix flat(12, 12);
  for (int i1 = 1; i1 <= 4; ++i1)
    for (int i2 = 1; i2 <= 3; ++i2)
      for (int j1 = 1; j1 <= 4; ++j1)
        for (int j2 = 1; j2 <= 3; ++j2) {
          Complex v = double(i1 * j1) * double(i2 - j2) * i;
          if (i2 == j2) v += 4.0 * i1 * j1 + double(j1 - i1) * i + 1.0;
          flat((i1 - 1) * 3 + (i2 - 1), (j1 - 1) * 3 + (j2 - 1)) = v;
        }
  return HermitianTensor::fromFlattening(Shape({4, 3}), flat);
}

// The two displayed T1 terms of the C^{[4,3]} example.
inline Vector m2ExampleVectorA1() {
  Vector a(4);
  a << 1.0, 2.0, 3.0, 4.0;
  return a;
}

inline Matrix m2ExampleMatrixB1() {
  const Complex i(0.0, 1.0);
  Matrix b(3, 3);
  b << 3.0, -i, -2.0 * i,
      i, 3.0, -i,
      2.0 * i, i, 3.0;
  return b;
}

inline Vector m2ExampleVectorA2() {
  const Complex i(0.0, 1.0);
  Vector a(4);
  a << 1.0 + i, 2.0 + i, 3.0 + i, 4.0 + i;
  return a;
}

inline Matrix m2ExampleMatrixB2() { return Matrix::Identity(3, 3); }

}  // namespace fixtures
