#include "hermitsep/cpd.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <stdexcept>

#include "hermitsep/rng.hpp"

namespace hermitsep {

ComplexTensor::ComplexTensor(std::vector<long> d) : dims(std::move(d)) {
  long count = 1;
  for (long n : dims) {
    if (n < 1) throw std::invalid_argument("ComplexTensor: dimensions must be >= 1");
    count *= n;
  }
  values.assign(count, Complex(0, 0));
}

long ComplexTensor::linearIndex(const std::vector<long>& idx) const {
  long lin = 0;
  for (int k = 0; k < order(); ++k) lin = lin * dims[k] + idx[k];
  return lin;
}

double ComplexTensor::norm() const {
  double s = 0.0;
  for (const Complex& v : values) s += std::norm(v);
  return std::sqrt(s);
}

Matrix ComplexTensor::unfolding(int mode) const {
  const int ord = order();
  if (mode < 0 || mode >= ord) throw std::out_of_range("ComplexTensor: unfolding mode");
  long cols = 1;
  for (int k = 0; k < ord; ++k)
    if (k != mode) cols *= dims[k];
  Matrix out(dims[mode], cols);
  std::vector<long> idx(ord, 0);
  for (long lin = 0; lin < entryCount(); ++lin) {
    long rem = lin;
    for (int k = ord - 1; k >= 0; --k) {
      idx[k] = rem % dims[k];
      rem /= dims[k];
    }
    long col = 0;
    for (int k = ord - 1; k >= 0; --k) {
      if (k == mode) continue;
      col = col * dims[k] + idx[k];
    }
    // reverse accumulation above walks high modes first, giving low modes the
    // fastest stride, i.e. col = sum_{k != mode} idx_k * prod_{m<k, m!=mode} dims_m
    out(idx[mode], col) = values[lin];
  }
  return out;
}

ComplexTensor ComplexTensor::fromRankOne(const std::vector<Vector>& factors) {
  std::vector<long> dims;
  dims.reserve(factors.size());
  for (const Vector& f : factors) dims.push_back(f.size());
  ComplexTensor t(dims);
  std::vector<long> idx(factors.size(), 0);
  for (long lin = 0; lin < t.entryCount(); ++lin) {
    long rem = lin;
    Complex v(1, 0);
    for (int k = t.order() - 1; k >= 0; --k) {
      idx[k] = rem % dims[k];
      rem /= dims[k];
    }
    for (int k = 0; k < t.order(); ++k) v *= factors[k](idx[k]);
    t.values[lin] = v;
  }
  return t;
}

ComplexTensor& ComplexTensor::operator+=(const ComplexTensor& other) {
  if (dims != other.dims) throw std::invalid_argument("ComplexTensor: dimension mismatch");
  for (long i = 0; i < entryCount(); ++i) values[i] += other.values[i];
  return *this;
}

Matrix khatriRao(const Matrix& u, const Matrix& v) {
  if (u.cols() != v.cols()) throw std::invalid_argument("khatriRao: column count mismatch");
  Matrix out(u.rows() * v.rows(), u.cols());
  for (long c = 0; c < u.cols(); ++c)
    for (long i = 0; i < u.rows(); ++i)
      out.col(c).segment(i * v.rows(), v.rows()) = u(i, c) * v.col(c);
  return out;
}

ComplexTensor Cpd::reconstruct(const std::vector<long>& dims) const {
  ComplexTensor t(dims);
  const int ord = t.order();
  std::vector<long> idx(ord, 0);
  for (long lin = 0; lin < t.entryCount(); ++lin) {
    long rem = lin;
    for (int k = ord - 1; k >= 0; --k) {
      idx[k] = rem % dims[k];
      rem /= dims[k];
    }
    Complex v(0, 0);
    for (int i = 0; i < rank(); ++i) {
      Complex term(1, 0);
      for (int k = 0; k < ord; ++k) term *= factors[k](idx[k], i);
      v += term;
    }
    t.values[lin] = v;
  }
  return t;
}

namespace {

/// Khatri-Rao product of all factors except `skip`, highest mode first, so it
/// matches the unfolding's column ordering.
Matrix khatriRaoExcept(const std::vector<Matrix>& factors, int skip) {
  Matrix z;
  bool first = true;
  for (int k = static_cast<int>(factors.size()) - 1; k >= 0; --k) {
    if (k == skip) continue;
    if (first) {
      z = factors[k];
      first = false;
    } else {
      z = khatriRao(z, factors[k]);
    }
  }
  return z;
}

}  // namespace

Cpd cpdAls(const ComplexTensor& t, int rank, const CpdOptions& opts) {
  if (rank < 1) throw std::invalid_argument("cpdAls: rank must be >= 1");
  const int ord = t.order();
  if (ord < 2) throw std::invalid_argument("cpdAls: tensor order must be >= 2");
  const double tnorm = std::max(t.norm(), 1e-300);

  std::vector<Matrix> unfoldings(ord);
  for (int n = 0; n < ord; ++n) unfoldings[n] = t.unfolding(n);

  Cpd best;
  for (int restart = 0; restart < opts.restarts; ++restart) {
    Rng rng(mixSeed(opts.seed, 0xCDCD0000ULL + restart));
    std::vector<Matrix> factors(ord);
    for (int n = 0; n < ord; ++n) {
      factors[n].resize(t.dims[n], rank);
      for (long i = 0; i < t.dims[n]; ++i)
        for (int j = 0; j < rank; ++j) factors[n](i, j) = rng.gaussianComplex();
    }

    double fit = std::numeric_limits<double>::infinity();
    double windowBest = fit;
    int sinceImprovement = 0;
    for (int sweep = 0; sweep < opts.maxSweeps; ++sweep) {
      for (int n = 0; n < ord; ++n) {
        const Matrix z = khatriRaoExcept(factors, n);
        Matrix gram = Matrix::Ones(rank, rank);
        for (int k = 0; k < ord; ++k) {
          if (k == n) continue;
          gram = gram.cwiseProduct((factors[k].adjoint() * factors[k]).eval());
        }
        const Matrix rhs = unfoldings[n] * z.conjugate();
        // solve U_n * conj(G) = rhs  =>  G * U_n^T = rhs^T (G Hermitian psd)
        Matrix reg = gram;
        reg.diagonal().array() += 1e-14 * gram.diagonal().real().maxCoeff();
        factors[n] = reg.ldlt().solve(rhs.transpose()).transpose();
      }
      // fold column norms into mode 0
      for (int n = 1; n < ord; ++n)
        for (int j = 0; j < rank; ++j) {
          const double cn = factors[n].col(j).norm();
          if (cn > 0) {
            factors[n].col(j) /= cn;
            factors[0].col(j) *= cn;
          }
        }

      Cpd current;
      current.factors = factors;
      const ComplexTensor approx = current.reconstruct(t.dims);
      double err = 0.0;
      for (long i = 0; i < t.entryCount(); ++i) err += std::norm(approx.values[i] - t.values[i]);
      fit = std::sqrt(err) / tnorm;
      if (fit < best.fit) {
        best.factors = factors;
        best.fit = fit;
      }
      if (fit <= opts.fitTol) break;
      if (fit < windowBest * (1.0 - opts.stagnationImprovement)) {
        windowBest = fit;
        sinceImprovement = 0;
      } else if (++sinceImprovement >= opts.stagnationWindow) {
        break;
      }
    }
    if (best.fit <= opts.fitTol) break;
  }
  return best;
}

}  // namespace hermitsep
