#include "hermitsep/psd_decomp.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace hermitsep {

ComplexTensor flattenT(const HermitianTensor& h) {
  const Shape& shape = h.shape();
  const int m = shape.order();
  std::vector<long> dims(m);
  for (int j = 0; j < m; ++j) dims[j] = static_cast<long>(shape.dims[j]) * shape.dims[j];
  ComplexTensor t(dims);
  const long flatSide = shape.flatSize();
  std::vector<long> idx(m);
  for (long li = 0; li < flatSide; ++li) {
    const std::vector<int> I = shape.multiIndex(li);
    for (long lj = 0; lj < flatSide; ++lj) {
      const std::vector<int> J = shape.multiIndex(lj);
      for (int s = 0; s < m; ++s) idx[s] = static_cast<long>(I[s]) * shape.dims[s] + J[s];
      t.at(idx) = h.flattening()(li, lj);
    }
  }
  return t;
}

ComplexTensor flattenT1(const HermitianTensor& h) {
  if (h.shape().order() != 2)
    throw std::invalid_argument("flattenT1: only defined for m = 2");
  const int n1 = h.shape().dims[0];
  const int n2 = h.shape().dims[1];
  ComplexTensor t({n1, n1, static_cast<long>(n2) * n2});
  for (int a = 0; a < n1; ++a)
    for (int b = 0; b < n1; ++b)
      for (int c = 0; c < n2; ++c)
        for (int d = 0; d < n2; ++d)
          t.at({a, b, static_cast<long>(c) * n2 + d}) =
              h.flattening()(static_cast<long>(a) * n2 + c, static_cast<long>(b) * n2 + d);
  return t;
}

ComplexTensor flattenT2(const HermitianTensor& h) {
  if (h.shape().order() != 2)
    throw std::invalid_argument("flattenT2: only defined for m = 2");
  const int n1 = h.shape().dims[0];
  const int n2 = h.shape().dims[1];
  ComplexTensor t({static_cast<long>(n1) * n1, n2, n2});
  for (int a = 0; a < n1; ++a)
    for (int b = 0; b < n1; ++b)
      for (int c = 0; c < n2; ++c)
        for (int d = 0; d < n2; ++d)
          t.at({static_cast<long>(a) * n1 + b, c, d}) =
              h.flattening()(static_cast<long>(a) * n2 + c, static_cast<long>(b) * n2 + d);
  return t;
}

ComplexTensor cubicReshape(const ComplexTensor& t) {
  if (t.order() <= 3) throw std::invalid_argument("cubicReshape: order must exceed 3");
  long merged = 1;
  for (int k = 2; k < t.order(); ++k) merged *= t.dims[k];
  ComplexTensor out({t.dims[0], t.dims[1], merged});
  out.values = t.values;  // row-major: trailing modes already contiguous
  return out;
}

std::optional<HermitianPhaseFix> phaseFixToHermitian(const Vector& v, int n, double hermTol) {
  if (v.size() != static_cast<long>(n) * n)
    throw std::invalid_argument("phaseFixToHermitian: length is not n^2");
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = v[static_cast<long>(i) * n + j];
  const double norm2 = m.squaredNorm();
  if (norm2 == 0.0) return std::nullopt;
  // For v = alpha * vec(B) with B Hermitian, tr(V^2)/||V||^2 = alpha^2/|alpha|^2.
  const Complex rho = (m * m).trace() / norm2;
  if (std::abs(std::abs(rho) - 1.0) > hermTol) return std::nullopt;
  const double theta = -0.5 * std::arg(rho);
  Matrix b0 = std::polar(1.0, theta) * m;
  const double hermRes = (b0 - b0.adjoint()).norm() / b0.norm();
  if (hermRes > hermTol) return std::nullopt;
  HermitianPhaseFix fix;
  fix.matrix = 0.5 * (b0 + b0.adjoint().eval());
  fix.phase = std::polar(1.0, -theta);
  fix.hermitianResidual = hermRes;
  if (fix.matrix.trace().real() < 0.0) {
    fix.matrix = -fix.matrix;
    fix.phase = -fix.phase;
  }
  return fix;
}

RealVector realifyHermitian(const Matrix& b, double tol) {
  const int n = static_cast<int>(b.rows());
  if (b.cols() != n) throw std::invalid_argument("realifyHermitian: matrix must be square");
  if ((b - b.adjoint()).norm() > tol * std::max(1.0, b.norm()))
    throw std::invalid_argument("realifyHermitian: matrix is not Hermitian");
  RealVector out(static_cast<long>(n) * n);
  long p = 0;
  for (int r = 0; r < n; ++r)
    for (int c = r; c < n; ++c) out[p++] = b(r, c).real();
  for (int r = 0; r < n; ++r)
    for (int c = r + 1; c < n; ++c) out[p++] = b(r, c).imag();
  return out;
}

int kruskalRank(const std::vector<Vector>& vectors, double tol) {
  const int s = static_cast<int>(vectors.size());
  if (s < 1) throw std::invalid_argument("kruskalRank: empty family");
  if (s > 20) throw std::invalid_argument("kruskalRank: more than 20 vectors");
  const long dim = vectors[0].size();
  for (const Vector& v : vectors)
    if (v.size() != dim) throw std::invalid_argument("kruskalRank: length mismatch");

  auto subsetIndependent = [&](const std::vector<int>& subset) {
    Matrix m(dim, subset.size());
    for (std::size_t i = 0; i < subset.size(); ++i) m.col(i) = vectors[subset[i]];
    Eigen::JacobiSVD<Matrix> svd(m);
    const RealVector& sv = svd.singularValues();
    if (sv.size() == 0 || sv[0] == 0.0) return false;
    return sv[sv.size() - 1] > tol * sv[0];
  };

  for (int k = static_cast<int>(std::min<long>(s, dim)); k >= 1; --k) {
    bool allPass = true;
    std::vector<int> subset(k);
    for (int i = 0; i < k; ++i) subset[i] = i;
    while (allPass) {
      if (!subsetIndependent(subset)) {
        allPass = false;
        break;
      }
      // next k-combination of {0..s-1}
      int i = k - 1;
      while (i >= 0 && subset[i] == s - k + i) --i;
      if (i < 0) break;
      ++subset[i];
      for (int j = i + 1; j < k; ++j) subset[j] = subset[j - 1] + 1;
    }
    if (allPass) return k;
  }
  return 0;
}

std::string kindName(UniquenessCertificate::Kind k) {
  switch (k) {
    case UniquenessCertificate::Kind::Kruskal: return "Kruskal";
    case UniquenessCertificate::Kind::CompoundMatrix: return "CompoundMatrix";
    case UniquenessCertificate::Kind::None: return "None";
  }
  return "?";
}

UniquenessCertificate kruskalUniquenessCheck(const Cpd& cpd, double tol) {
  UniquenessCertificate cert;
  const int s = cpd.rank();
  const int m = static_cast<int>(cpd.factors.size());
  if (s == 0 || m == 0) return cert;

  int total = 0;
  for (const Matrix& u : cpd.factors) {
    std::vector<Vector> cols;
    cols.reserve(s);
    for (int i = 0; i < s; ++i) cols.push_back(u.col(i));
    const int k = kruskalRank(cols, tol);
    cert.kruskalRanks.push_back(k);
    total += k;
  }
  if (s == 1) {
    // a rank-1 decomposition is unique once every factor is nonzero
    cert.kruskalRequired = m;
    if (total >= m) cert.kind = UniquenessCertificate::Kind::Kruskal;
    return cert;
  }
  cert.kruskalRequired = 2 * s + m - 1;
  if (total >= cert.kruskalRequired) cert.kind = UniquenessCertificate::Kind::Kruskal;
  return cert;
}

Matrix compoundMatrix(const Matrix& x) {
  const long p = x.rows();
  const long q = x.cols();
  if (p < 2 || q < 2) throw std::invalid_argument("compoundMatrix: needs at least 2x2");
  Matrix out(p * (p - 1) / 2, q * (q - 1) / 2);
  long row = 0;
  for (long i = 0; i < p; ++i)
    for (long j = i + 1; j < p; ++j) {
      long col = 0;
      for (long k = 0; k < q; ++k)
        for (long l = k + 1; l < q; ++l) {
          out(row, col) = x(i, k) * x(j, l) - x(i, l) * x(j, k);
          ++col;
        }
      ++row;
    }
  return out;
}

UniquenessCertificate compoundUniquenessCheck(const Cpd& cpd, double tol) {
  UniquenessCertificate cert;
  if (cpd.factors.size() != 3) return cert;
  const int s = cpd.rank();
  if (s == 1) {
    bool nonzero = true;
    for (const Matrix& u : cpd.factors)
      if (u.col(0).norm() == 0.0) nonzero = false;
    if (nonzero) {
      cert.kind = UniquenessCertificate::Kind::CompoundMatrix;
      cert.rankA = 1;
      cert.compoundSigmaRatio = 1.0;
    }
    return cert;
  }

  int aMode = 0;
  for (int k = 1; k < 3; ++k)
    if (cpd.factors[k].rows() > cpd.factors[aMode].rows()) aMode = k;
  std::vector<int> rest;
  for (int k = 0; k < 3; ++k)
    if (k != aMode) rest.push_back(k);

  const Matrix& a = cpd.factors[aMode];
  Eigen::JacobiSVD<Matrix> svdA(a);
  const RealVector& svA = svdA.singularValues();
  if (svA.size() < s || svA[0] == 0.0 || svA[s - 1] <= tol * svA[0]) return cert;

  const Matrix& b = cpd.factors[rest[0]];
  const Matrix& c = cpd.factors[rest[1]];
  if (b.rows() < 2 || c.rows() < 2) return cert;
  const Matrix kr = khatriRao(compoundMatrix(b), compoundMatrix(c));
  Eigen::JacobiSVD<Matrix> svdK(kr);
  const RealVector& svK = svdK.singularValues();
  const long cols = kr.cols();
  if (svK.size() < cols || svK[0] == 0.0) return cert;
  const double ratio = svK[cols - 1] / svK[0];
  if (ratio <= tol) return cert;

  cert.kind = UniquenessCertificate::Kind::CompoundMatrix;
  cert.rankA = s;
  cert.compoundSigmaRatio = ratio;
  return cert;
}

namespace {

constexpr double kGammaTolDefault = 1e-8;
constexpr double kReconTolFactor = 1e-6;

/// Clips eigenvalues in [-tol*||B||, 0) to zero; fails on anything lower.
std::optional<Matrix> projectPsdFactor(const Matrix& b, double tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(b);
  const RealVector& lam = eig.eigenvalues();
  const double scale = std::max(std::abs(lam[0]), std::abs(lam[lam.size() - 1]));
  if (lam[0] < -tol * std::max(scale, 1e-300)) return std::nullopt;
  if (lam[0] >= 0.0) return b;
  RealVector clipped = lam.cwiseMax(0.0);
  return Matrix(eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().adjoint());
}

UniquenessCertificate certificateFor(const Cpd& cpd) {
  UniquenessCertificate cert = kruskalUniquenessCheck(cpd);
  if (!cert.certified() && cpd.factors.size() == 3) {
    UniquenessCertificate compound = compoundUniquenessCheck(cpd);
    if (compound.certified()) {
      compound.kruskalRanks = cert.kruskalRanks;
      compound.kruskalRequired = cert.kruskalRequired;
      return compound;
    }
  }
  return cert;
}

/// Splits v = x kron y kron ... into the per-mode pieces via rank-1 SVD of
/// successive reshapes; returns nothing when the reshape is not rank-1.
std::optional<std::vector<Vector>> splitKronecker(const Vector& v,
                                                  const std::vector<long>& lens,
                                                  double tol) {
  std::vector<Vector> parts;
  Vector current = v;
  for (std::size_t k = 0; k + 1 < lens.size(); ++k) {
    long rest = 1;
    for (std::size_t j = k + 1; j < lens.size(); ++j) rest *= lens[j];
    Matrix r(lens[k], rest);
    for (long i = 0; i < lens[k]; ++i)
      for (long j = 0; j < rest; ++j) r(i, j) = current[i * rest + j];
    Eigen::JacobiSVD<Matrix> svd(r, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RealVector& sv = svd.singularValues();
    if (sv.size() == 0 || sv[0] == 0.0) return std::nullopt;
    if (sv.size() > 1 && sv[1] > tol * sv[0]) return std::nullopt;
    parts.push_back(sv[0] * svd.matrixU().col(0));
    current = svd.matrixV().col(0).conjugate();
  }
  parts.push_back(current);
  return parts;
}

PsdResult certifyFromFactorTuples(const HermitianTensor& h,
                                  const std::vector<std::vector<Vector>>& termVectors,
                                  const Cpd& certCpd, double psdTol, double gammaTol,
                                  double reconTolFactor, bool rankExactWhenCertified) {
  const Shape& shape = h.shape();
  const int m = shape.order();
  PsdDecomposition dec;
  for (std::size_t i = 0; i < termVectors.size(); ++i) {
    PsdTerm term;
    Complex gamma(1, 0);
    for (int j = 0; j < m; ++j) {
      auto fix = phaseFixToHermitian(termVectors[i][j], shape.dims[j]);
      if (!fix)
        return PsdFailure{"phase", static_cast<int>(i), j, "factor is not a Hermitian multiple"};
      term.factors.push_back(fix->matrix);
      gamma *= fix->phase;
    }
    if (std::abs(gamma.imag()) > gammaTol * std::abs(gamma) || gamma.real() <= 0.0)
      return PsdFailure{"gamma", static_cast<int>(i), -1,
                        "per-term scalar is not real positive"};
    term.factors[0] *= gamma.real();
    for (int j = 0; j < m; ++j) {
      auto projected = projectPsdFactor(term.factors[j], psdTol);
      if (!projected)
        return PsdFailure{"psd", static_cast<int>(i), j, "factor has a negative eigenvalue"};
      term.factors[j] = std::move(*projected);
    }
    dec.terms.push_back(std::move(term));
  }

  const HermitianTensor rebuilt = assembleFromPsd(dec, shape);
  const double diff = (h.flattening() - rebuilt.flattening()).norm();
  if (diff > reconTolFactor * (1.0 + h.frobeniusNorm()))
    return PsdFailure{"residual", -1, -1,
                      "reconstruction residual " + std::to_string(diff)};

  PsdCertification out;
  out.decomposition = std::move(dec);
  out.certificate = certificateFor(certCpd);
  out.residual = residual(h, rebuilt);
  out.rank = static_cast<int>(termVectors.size());
  out.rankIsExact = rankExactWhenCertified && out.certificate.certified();
  return out;
}

/// One least-squares refit of a single mode with the other factors fixed.
void refitMode(const ComplexTensor& t, std::vector<Matrix>& factors, int mode) {
  const int ord = static_cast<int>(factors.size());
  Matrix z;
  bool first = true;
  for (int k = ord - 1; k >= 0; --k) {
    if (k == mode) continue;
    if (first) {
      z = factors[k];
      first = false;
    } else {
      z = khatriRao(z, factors[k]);
    }
  }
  Matrix gram = Matrix::Ones(factors[0].cols(), factors[0].cols());
  for (int k = 0; k < ord; ++k) {
    if (k == mode) continue;
    gram = gram.cwiseProduct((factors[k].adjoint() * factors[k]).eval());
  }
  Matrix reg = gram;
  reg.diagonal().array() += 1e-14 * gram.diagonal().real().maxCoeff();
  const Matrix rhs = t.unfolding(mode) * z.conjugate();
  factors[mode] = reg.ldlt().solve(rhs.transpose()).transpose();
}

/// m = 2 flattening routes.  `useT1` picks T1 (tie modes 0,1) or T2 (tie 1,2).
PsdResult decomposeOrderTwo(const HermitianTensor& h, int rank, bool useT1,
                            const PsdDecomposeOptions& opts) {
  const bool swapped = h.shape().dims[0] < h.shape().dims[1];
  const HermitianTensor work = swapped ? h.swappedModes() : h;
  const int n1 = work.shape().dims[0];
  const int n2 = work.shape().dims[1];

  const ComplexTensor t = useT1 ? flattenT1(work) : flattenT2(work);
  Cpd cpd = cpdAls(t, rank, opts.cpd);
  if (cpd.fit > opts.fitAccept)
    return PsdFailure{"fit", -1, -1, "CPD fit " + std::to_string(cpd.fit)};

  // Enforce the conjugate-pair structure on the tied modes, then refit the
  // free mode once.
  const int tieA = useT1 ? 0 : 1;
  const int tieB = useT1 ? 1 : 2;
  const int freeMode = useT1 ? 2 : 0;
  for (int i = 0; i < rank; ++i) {
    const Vector a = cpd.factors[tieA].col(i);
    const Vector b = cpd.factors[tieB].col(i);
    const double an2 = a.squaredNorm();
    if (an2 == 0.0) return PsdFailure{"structure", i, tieA, "zero factor"};
    const Complex c = (a.transpose() * b).value() / an2;
    if ((b - c * a.conjugate()).norm() > 1e-6 * std::max(b.norm(), 1e-300))
      return PsdFailure{"structure", i, tieB, "tied modes are not conjugate"};
    const Vector tied = 0.5 * (a + (b / c).conjugate());
    cpd.factors[tieA].col(i) = tied;
    cpd.factors[tieB].col(i) = tied.conjugate();
    cpd.factors[freeMode].col(i) *= c;
  }
  refitMode(t, cpd.factors, freeMode);
  {
    const ComplexTensor approx = cpd.reconstruct(t.dims);
    double err = 0.0;
    for (long i = 0; i < t.entryCount(); ++i) err += std::norm(approx.values[i] - t.values[i]);
    cpd.fit = std::sqrt(err) / std::max(t.norm(), 1e-300);
    if (cpd.fit > opts.fitAccept)
      return PsdFailure{"structure", -1, -1, "structured refit lost the fit"};
  }

  const int matDim = useT1 ? n2 : n1;
  PsdDecomposition dec;
  for (int i = 0; i < rank; ++i) {
    auto fix = phaseFixToHermitian(cpd.factors[freeMode].col(i), matDim);
    if (!fix) return PsdFailure{"phase", i, freeMode, "factor is not a Hermitian multiple"};
    const Complex gamma = fix->phase;
    if (std::abs(gamma.imag()) > opts.gammaTol * std::abs(gamma) || gamma.real() <= 0.0)
      return PsdFailure{"gamma", i, -1, "per-term scalar is not real positive"};
    auto projected = projectPsdFactor(gamma.real() * fix->matrix, opts.psdTol);
    if (!projected) return PsdFailure{"psd", i, freeMode, "factor has a negative eigenvalue"};

    const Vector tied = cpd.factors[tieA].col(i);
    Matrix rankOne = tied * tied.adjoint();
    PsdTerm term;
    if (useT1) {
      term.factors = {std::move(rankOne), std::move(*projected)};
    } else {
      term.factors = {std::move(*projected), std::move(rankOne)};
    }
    if (swapped) std::swap(term.factors[0], term.factors[1]);
    dec.terms.push_back(std::move(term));
  }

  const HermitianTensor rebuilt = assembleFromPsd(dec, h.shape());
  const double diff = (h.flattening() - rebuilt.flattening()).norm();
  if (diff > opts.reconTolFactor * (1.0 + h.frobeniusNorm()))
    return PsdFailure{"residual", -1, -1, "reconstruction residual " + std::to_string(diff)};

  PsdCertification out;
  out.decomposition = std::move(dec);
  out.certificate = certificateFor(cpd);
  out.residual = residual(h, rebuilt);
  out.rank = rank;
  out.rankIsExact = false;  // m = 2: upper bound only
  return out;
}

}  // namespace

PsdResult certifyPsdDecomposition(const HermitianTensor& h, const Cpd& cpd, double tol) {
  const Shape& shape = h.shape();
  const int m = shape.order();
  if (static_cast<int>(cpd.factors.size()) != m)
    throw std::invalid_argument("certifyPsdDecomposition: mode count mismatch");
  for (int j = 0; j < m; ++j)
    if (cpd.factors[j].rows() != static_cast<long>(shape.dims[j]) * shape.dims[j])
      throw std::invalid_argument("certifyPsdDecomposition: factor row count mismatch");

  std::vector<std::vector<Vector>> termVectors;
  for (int i = 0; i < cpd.rank(); ++i) {
    std::vector<Vector> vs;
    for (int j = 0; j < m; ++j) vs.push_back(cpd.factors[j].col(i));
    termVectors.push_back(std::move(vs));
  }
  return certifyFromFactorTuples(h, termVectors, cpd, tol, kGammaTolDefault, kReconTolFactor,
                                 m >= 3);
}

PsdResult psdDecompose(const HermitianTensor& h, int rank, const PsdDecomposeOptions& opts) {
  if (rank < 1) throw std::invalid_argument("psdDecompose: rank must be >= 1");
  const int m = h.shape().order();
  PsdRoute route = opts.route;
  if (route == PsdRoute::Auto) {
    if (m == 2)
      route = PsdRoute::T1;
    else if (m == 3)
      route = PsdRoute::T;
    else
      route = PsdRoute::Cubic;
  }

  switch (route) {
    case PsdRoute::T: {
      const ComplexTensor t = flattenT(h);
      const Cpd cpd = cpdAls(t, rank, opts.cpd);
      if (cpd.fit > opts.fitAccept)
        return PsdFailure{"fit", -1, -1, "CPD fit " + std::to_string(cpd.fit)};
      return certifyPsdDecomposition(h, cpd, opts.psdTol);
    }
    case PsdRoute::Cubic: {
      if (m <= 3) throw std::invalid_argument("psdDecompose: cubic route needs m > 3");
      const ComplexTensor merged = cubicReshape(flattenT(h));
      const Cpd cpd = cpdAls(merged, rank, opts.cpd);
      if (cpd.fit > opts.fitAccept)
        return PsdFailure{"fit", -1, -1, "CPD fit " + std::to_string(cpd.fit)};
      std::vector<long> tailLens;
      for (int j = 2; j < m; ++j)
        tailLens.push_back(static_cast<long>(h.shape().dims[j]) * h.shape().dims[j]);
      std::vector<std::vector<Vector>> termVectors;
      for (int i = 0; i < rank; ++i) {
        auto tail = splitKronecker(cpd.factors[2].col(i), tailLens, 1e-6);
        if (!tail)
          return PsdFailure{"kron-split", i, 2, "merged factor is not a Kronecker product"};
        std::vector<Vector> vs{cpd.factors[0].col(i), cpd.factors[1].col(i)};
        for (Vector& piece : *tail) vs.push_back(std::move(piece));
        termVectors.push_back(std::move(vs));
      }
      return certifyFromFactorTuples(h, termVectors, cpd, opts.psdTol, opts.gammaTol,
                                     opts.reconTolFactor, true);
    }
    case PsdRoute::T1:
    case PsdRoute::T2: {
      if (m != 2) throw std::invalid_argument("psdDecompose: T1/T2 routes need m = 2");
      PsdResult result = decomposeOrderTwo(h, rank, route == PsdRoute::T1, opts);
      if (opts.route == PsdRoute::Auto && std::holds_alternative<PsdFailure>(result)) {
        PsdResult fallback = decomposeOrderTwo(h, rank, false, opts);
        if (std::holds_alternative<PsdCertification>(fallback)) return fallback;
      }
      return result;
    }
    case PsdRoute::Auto: break;
  }
  throw std::logic_error("psdDecompose: unresolved route");
}

PsdResult psdDecomposeSweep(const HermitianTensor& h, int maxRank,
                            const PsdDecomposeOptions& opts) {
  PsdResult last = PsdFailure{"fit", -1, -1, "no rank tried"};
  for (int s = 1; s <= maxRank; ++s) {
    last = psdDecompose(h, s, opts);
    if (std::holds_alternative<PsdCertification>(last)) return last;
    const PsdFailure& failure = std::get<PsdFailure>(last);
    if (failure.stage != "fit") return last;  // rank found; later stage decides
  }
  return last;
}

}  // namespace hermitsep
