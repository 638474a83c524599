#include "hermitsep/solver.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <lapacke.h>

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

extern "C" void openblas_set_num_threads(int) __attribute__((weak));

namespace hermitsep {

std::string statusName(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::PrimalInfeasible: return "PrimalInfeasible";
    case SolveStatus::Unbounded: return "Unbounded";
    case SolveStatus::Inexact: return "Inexact";
  }
  return "?";
}

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

struct ConeBlock {
  int side = 0;
  long svecDim = 0;
  long rowOffset = 0;  // into the full row space (after equality rows)
};

long svecDim(int side) { return static_cast<long>(side) * (side + 1) / 2; }
long svecIndex(int r, int c) { return static_cast<long>(c) * (c + 1) / 2 + r; }  // r <= c

void unsvec(const double* s, int side, RealMatrix& out) {
  out.resize(side, side);
  for (int c = 0; c < side; ++c)
    for (int r = 0; r <= c; ++r) {
      const double v = s[svecIndex(r, c)];
      if (r == c) {
        out(r, c) = v;
      } else {
        out(r, c) = v / kSqrt2;
        out(c, r) = v / kSqrt2;
      }
    }
}

void svecFrom(const RealMatrix& m, double* s) {
  const int side = static_cast<int>(m.rows());
  for (int c = 0; c < side; ++c)
    for (int r = 0; r <= c; ++r)
      s[svecIndex(r, c)] = (r == c) ? m(r, c) : kSqrt2 * 0.5 * (m(r, c) + m(c, r));
}

struct PsdProjector {
  RealMatrix work;
  RealMatrix original;
  RealVector lambda;
  Eigen::SelfAdjointEigenSolver<RealMatrix> eig;

  PsdProjector() {
    if (openblas_set_num_threads) openblas_set_num_threads(1);  // determinism
  }

  /// Projects the svec segment onto the psd cone in place.
  void operator()(double* s, int side) {
    unsvec(s, side, work);
    if (side >= 32) {
      original = work;
      lambda.resize(side);
      const int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', side, work.data(), side,
                                      lambda.data());
      if (info != 0) throw std::runtime_error("projectPsd: eigendecomposition failed");
      int firstNonNeg = 0;
      while (firstNonNeg < side && lambda[firstNonNeg] < 0.0) ++firstNonNeg;
      if (firstNonNeg == 0) return;  // already psd
      if (firstNonNeg == side) {
        for (long i = 0; i < svecDim(side); ++i) s[i] = 0.0;
        return;
      }
      // subtract the cheaper side of the spectrum
      if (firstNonNeg <= side - firstNonNeg) {
        const auto qNeg = work.leftCols(firstNonNeg);
        original.noalias() -=
            qNeg * lambda.head(firstNonNeg).asDiagonal() * qNeg.transpose();
        svecFrom(original, s);
      } else {
        const int nPos = side - firstNonNeg;
        const auto qPos = work.rightCols(nPos);
        original.noalias() =
            qPos * lambda.tail(nPos).asDiagonal() * qPos.transpose();
        svecFrom(original, s);
      }
      return;
    }
    eig.compute(work);
    const RealVector& lam = eig.eigenvalues();
    if (lam[0] >= 0.0) return;
    if (lam[side - 1] <= 0.0) {
      for (long i = 0; i < svecDim(side); ++i) s[i] = 0.0;
      return;
    }
    RealVector clipped = lam.cwiseMax(0.0);
    work = eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose();
    svecFrom(work, s);
  }
};

struct ConicData {
  long nx = 0;      // variables
  long neq = 0;     // equality rows
  long nrows = 0;   // equality + svec rows
  std::vector<ConeBlock> cones;
  Eigen::SparseMatrix<double> A;    // nrows x nx, unscaled (b already divided by hScale)
  Eigen::SparseMatrix<double> At;
  RealVector b;                     // nrows
  RealVector c;                     // nx
};

ConicData buildConicData(const SdpProblem& p) {
  ConicData d;
  d.nx = p.tmsLength;
  d.neq = p.A.rows();
  long rows = d.neq;
  for (const PsdBlockMap& blk : p.blocks) {
    ConeBlock cb;
    cb.side = blk.side;
    cb.svecDim = svecDim(blk.side);
    cb.rowOffset = rows;
    rows += cb.svecDim;
    d.cones.push_back(cb);
  }
  d.nrows = rows;

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(p.A.nonZeros() + rows);
  for (int k = 0; k < p.A.outerSize(); ++k)
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(p.A, k); it; ++it)
      trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  for (std::size_t l = 0; l < p.blocks.size(); ++l) {
    const ConeBlock& cb = d.cones[l];
    for (const PsdBlockMap::Entry& e : p.blocks[l].entries) {
      const double scale = (e.row == e.col) ? 1.0 : kSqrt2;
      trip.emplace_back(static_cast<int>(cb.rowOffset + svecIndex(e.row, e.col)),
                        static_cast<int>(e.monomial), -e.coeff * scale);
    }
  }
  d.A.resize(rows, d.nx);
  d.A.setFromTriplets(trip.begin(), trip.end());
  d.A.makeCompressed();
  d.At = d.A.transpose();

  d.b = RealVector::Zero(rows);
  d.b.head(d.neq) = p.b / p.hScale;
  d.c = p.c;
  return d;
}

struct Scaling {
  RealVector rowScale;  // e
  RealVector colScale;  // d
  double bFactor = 1.0;
  double cFactor = 1.0;
};

/// Ruiz equilibration with block-uniform row scaling on the psd cone rows.
Scaling equilibrate(ConicData& d, int iterations) {
  Scaling s;
  s.rowScale = RealVector::Ones(d.nrows);
  s.colScale = RealVector::Ones(d.nx);

  for (int pass = 0; pass < iterations; ++pass) {
    RealVector rowMax = RealVector::Zero(d.nrows);
    RealVector colMax = RealVector::Zero(d.nx);
    for (int k = 0; k < d.A.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(d.A, k); it; ++it) {
        const double v = std::abs(it.value());
        rowMax[it.row()] = std::max(rowMax[it.row()], v);
        colMax[it.col()] = std::max(colMax[it.col()], v);
      }
    for (const ConeBlock& cb : d.cones) {
      const double blockMax = rowMax.segment(cb.rowOffset, cb.svecDim).maxCoeff();
      rowMax.segment(cb.rowOffset, cb.svecDim).setConstant(blockMax);
    }
    RealVector rFac(d.nrows), cFac(d.nx);
    for (long i = 0; i < d.nrows; ++i)
      rFac[i] = rowMax[i] > 0 ? 1.0 / std::sqrt(rowMax[i]) : 1.0;
    for (long j = 0; j < d.nx; ++j)
      cFac[j] = colMax[j] > 0 ? 1.0 / std::sqrt(colMax[j]) : 1.0;
    for (int k = 0; k < d.A.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(d.A, k); it; ++it)
        it.valueRef() *= rFac[it.row()] * cFac[it.col()];
    s.rowScale.array() *= rFac.array();
    s.colScale.array() *= cFac.array();
  }
  d.At = d.A.transpose();
  return s;
}

}  // namespace

SolveOutcome solve(const SdpProblem& p, const SolveOptions& opts) {
  ConicData raw = buildConicData(p);

  // Keep an unscaled copy for residual checks; equilibrate a working copy.
  const Eigen::SparseMatrix<double> A0 = raw.A;
  const Eigen::SparseMatrix<double> A0t = raw.At;
  const RealVector b0 = raw.b;  // b/hScale on the equality rows
  const RealVector c0 = raw.c;

  Scaling sc = equilibrate(raw, 10);
  RealVector bhat = raw.b.cwiseProduct(sc.rowScale);
  RealVector chat = raw.c.cwiseProduct(sc.colScale);
  sc.bFactor = 1.0 / std::max(bhat.norm(), 1e-10);
  sc.cFactor = 1.0 / std::max(chat.norm(), 1e-10);
  bhat *= sc.bFactor;
  chat *= sc.cFactor;

  const long nx = raw.nx;
  const long ny = raw.nrows;
  const long ntot = nx + ny + 1;

  // Factor I + A^T A once.
  Eigen::SparseMatrix<double> gram = (raw.At * raw.A).pruned();
  {
    Eigen::SparseMatrix<double> eye(nx, nx);
    eye.setIdentity();
    gram = (gram + eye).pruned();
  }
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  ldlt.compute(gram);
  if (ldlt.info() != Eigen::Success)
    throw std::runtime_error("solve: factorization of the splitting system failed");

  auto solveM = [&](const RealVector& rx, const RealVector& ry, RealVector& ox, RealVector& oy) {
    ox = ldlt.solve(rx - raw.At * ry);
    oy = ry + raw.A * ox;
  };

  RealVector zetaX, zetaY;
  solveM(chat, bhat, zetaX, zetaY);
  const double denom = 1.0 + chat.dot(zetaX) + bhat.dot(zetaY);

  std::vector<PsdProjector> projectors(raw.cones.size());

  // Relaxed Douglas-Rachford as a fixed-point map on a single vector:
  //   p = Pi_C(z),  utld = (I+Q)^{-1}(2p - z),  F(z) = z + alpha (utld - p).
  // The cone-feasible iterate is u = p, and v = p - z lies in C*.
  const double alpha = opts.overRelaxation;
  RealVector px(nx), py(ny);
  auto projectC = [&](RealVector& z) {
    for (std::size_t l = 0; l < raw.cones.size(); ++l) {
      const ConeBlock& cb = raw.cones[l];
      projectors[l](z.data() + nx + cb.rowOffset, cb.side);
    }
    if (z[ntot - 1] < 0.0) z[ntot - 1] = 0.0;
  };
  RealVector fpP(ntot), fpR(ntot);
  auto fixedPointMap = [&](const RealVector& z) {
    fpP = z;
    projectC(fpP);
    fpR = 2.0 * fpP - z;
    solveM(fpR.head(nx), fpR.segment(nx, ny), px, py);
    const double utau =
        (fpR[ntot - 1] + chat.dot(px) + bhat.dot(py)) / denom;
    RealVector out = z;
    out.head(nx) += alpha * (px - zetaX * utau - fpP.head(nx));
    out.segment(nx, ny) += alpha * (py - zetaY * utau - fpP.segment(nx, ny));
    out[ntot - 1] += alpha * (utau - fpP[ntot - 1]);
    return out;
  };

  RealVector z = RealVector::Zero(ntot);
  z[ntot - 1] = 1.0;
  RealVector u(ntot), v(ntot);
  auto refreshUV = [&]() {
    u = z;
    projectC(u);
    v = u - z;
  };

  // Safeguarded Anderson acceleration (type II) on the fixed-point residual.
  const int aaMemory = opts.accelerationMemory;
  std::vector<RealVector> histF, histG;
  RealVector f = fixedPointMap(z);
  RealVector g = f - z;

  SolveOutcome out;
  out.residuals.iterations = 0;
  long aaAccepted = 0, aaRejected = 0;

  double epsTargetFeas = opts.epsFeas;
  double epsTargetGap = opts.epsGap;

  auto buildCandidateW = [&](double tau) {
    // unscaled tms values, back in the caller's units (times hScale)
    RealVector wc = u.head(nx).cwiseProduct(sc.colScale) / (sc.bFactor * tau);
    return RealVector(wc * p.hScale);
  };

  auto extractDuals = [&](const RealVector& yfull, RealVector& mu,
                          std::vector<RealMatrix>& blocks) {
    mu = yfull.head(raw.neq);
    blocks.clear();
    for (std::size_t l = 0; l < raw.cones.size(); ++l) {
      const ConeBlock& cb = raw.cones[l];
      RealMatrix z;
      unsvec(yfull.data() + cb.rowOffset, cb.side, z);
      blocks.push_back(std::move(z));
    }
  };

  int iter = 0;
  for (; iter < opts.maxIterations; ++iter) {
    histF.push_back(f);
    histG.push_back(g);
    if (static_cast<int>(histF.size()) > aaMemory + 1) {
      histF.erase(histF.begin());
      histG.erase(histG.begin());
    }

    bool stepped = false;
    const int hist = static_cast<int>(histF.size());
    if (hist >= 2) {
      RealMatrix dG(ntot, hist - 1), dF(ntot, hist - 1);
      for (int i = 0; i + 1 < hist; ++i) {
        dG.col(i) = histG[i + 1] - histG[i];
        dF.col(i) = histF[i + 1] - histF[i];
      }
      const RealVector gamma = dG.colPivHouseholderQr().solve(g);
      const RealVector zAcc = f - dF * gamma;
      const RealVector fAcc = fixedPointMap(zAcc);
      const RealVector gAcc = fAcc - zAcc;
      if (gAcc.norm() <= 2.0 * g.norm()) {  // safeguard against divergence
        z = zAcc;
        f = fAcc;
        g = gAcc;
        stepped = true;
        ++aaAccepted;
      } else {
        histF.clear();
        histG.clear();
        ++aaRejected;
      }
    }
    if (!stepped) {
      z = f;  // plain relaxed Douglas-Rachford step
      f = fixedPointMap(z);
      g = f - z;
    }

    if ((iter + 1) % opts.checkInterval != 0) continue;
    refreshUV();

    const double tau = u[ntot - 1];
    const double normU = u.norm() + 1e-300;

    // optimality candidate
    if (tau > 1e-12 * normU) {
      RealVector wTrue = buildCandidateW(tau);
      RealVector yTrue = u.segment(nx, ny).cwiseProduct(sc.rowScale) / (sc.cFactor * tau);
      RealVector sTrue =
          v.segment(nx, ny).cwiseQuotient(sc.rowScale) / (sc.bFactor * tau) * p.hScale;
      const RealVector bRaw = b0 * p.hScale;
      const double pres = (A0 * wTrue + sTrue - bRaw).norm() / (1.0 + bRaw.norm());
      const double dres = (A0t * yTrue + c0).norm() / (1.0 + c0.norm());
      const double pobj = c0.dot(wTrue);
      const double dobj = -bRaw.dot(yTrue);
      const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
      out.residuals.primal = pres;
      out.residuals.dual = dres;
      out.residuals.gap = gap;
      out.residuals.iterations = iter + 1;
      if (opts.verbosity > 0 && (iter + 1) % (opts.checkInterval * 40) == 0)
        std::fprintf(stderr, "  iter %6d  pres %.2e  dres %.2e  gap %.2e  aa %ld/%ld\n",
                     iter + 1, pres, dres, gap, aaAccepted, aaAccepted + aaRejected);

      if (pres <= epsTargetFeas && dres <= epsTargetFeas && gap <= epsTargetGap) {
        // final direct validation on the caller's data
        bool blocksOk = true;
        for (std::size_t l = 0; l < p.blocks.size() && blocksOk; ++l) {
          const RealMatrix s = p.blocks[l].evaluate(wTrue);
          Eigen::SelfAdjointEigenSolver<RealMatrix> es(s, Eigen::EigenvaluesOnly);
          if (es.eigenvalues()[0] < -opts.epsFeas * (1.0 + s.norm())) blocksOk = false;
        }
        const double eqres = (p.A * wTrue - p.b).norm();
        if (blocksOk && eqres <= opts.epsFeas * (1.0 + p.b.norm())) {
          out.status = SolveStatus::Optimal;
          out.momentVector.nvars = p.nvars;
          out.momentVector.degreeBound = 2 * p.order;
          out.momentVector.values = wTrue;
          extractDuals(yTrue, out.equalityDuals, out.blockDuals);
          out.objective = pobj;
          return out;
        }
        // candidate failed the direct check; tighten and keep iterating
        epsTargetFeas *= 0.3;
        epsTargetGap *= 0.3;
      }
    }

    // infeasibility candidates (directions, independent of tau)
    {
      RealVector yDir = u.segment(nx, ny).cwiseProduct(sc.rowScale);
      const double bty = p.b.dot(yDir.head(raw.neq));
      if (bty < -1e-14 * (1.0 + yDir.norm())) {
        RealVector yNorm = yDir / (-bty);
        InfeasibilityCertificate cert;
        extractDuals(yNorm, cert.mu, cert.blockCertificates);
        double znorm = 0.0;
        for (const RealMatrix& z : cert.blockCertificates) znorm += z.norm();
        const double res = (A0t * yNorm).norm();
        out.residuals.infeasibility = res / (1.0 + yNorm.head(raw.neq).norm() + znorm);
        if (out.residuals.infeasibility <= opts.epsInf &&
            verifyCertificate(p, cert, opts.epsInf)) {
          out.status = SolveStatus::PrimalInfeasible;
          out.certificate = std::move(cert);
          out.residuals.iterations = iter + 1;
          return out;
        }
      }

      // unboundedness direction (never expected for an SOS objective)
      RealVector xDir = u.head(nx).cwiseProduct(sc.colScale);
      const double ctx = c0.dot(xDir);
      if (tau <= 1e-12 * normU && ctx < -1e-12 * (1.0 + xDir.norm())) {
        RealVector xn = xDir / (-ctx);
        RealVector ax = A0 * xn;
        RealVector sProj = -ax;
        sProj.head(raw.neq).setZero();  // zero cone
        for (std::size_t l = 0; l < raw.cones.size(); ++l) {
          const ConeBlock& cb = raw.cones[l];
          projectors[l](sProj.data() + cb.rowOffset, cb.side);
        }
        if ((ax + sProj).norm() <= opts.epsInf * (1.0 + xn.norm())) {
          out.status = SolveStatus::Unbounded;
          out.residuals.iterations = iter + 1;
          return out;
        }
      }
    }
  }

  // iteration budget exhausted: report the best primal estimate, Inexact
  out.status = SolveStatus::Inexact;
  out.residuals.iterations = iter;
  refreshUV();
  const double tau = u[ntot - 1];
  if (tau > 1e-12 * (u.norm() + 1e-300)) {
    out.momentVector.nvars = p.nvars;
    out.momentVector.degreeBound = 2 * p.order;
    out.momentVector.values = buildCandidateW(tau);
    out.objective = c0.dot(out.momentVector.values);
  }
  return out;
}

bool verifyCertificate(const SdpProblem& p, const InfeasibilityCertificate& cert,
                       double epsInf) {
  if (cert.mu.size() != p.A.rows() ||
      cert.blockCertificates.size() != p.blocks.size())
    throw std::invalid_argument("verifyCertificate: certificate does not match the problem");
  for (std::size_t l = 0; l < p.blocks.size(); ++l)
    if (cert.blockCertificates[l].rows() != p.blocks[l].side ||
        cert.blockCertificates[l].cols() != p.blocks[l].side)
      throw std::invalid_argument("verifyCertificate: certificate block size mismatch");

  double znorm = 0.0;
  for (const RealMatrix& z : cert.blockCertificates) znorm += z.norm();
  const double scale = 1.0 + cert.mu.norm() + znorm;

  // A^T mu combined with the cone rows' adjoint applied to the blocks
  RealVector r = p.A.transpose() * cert.mu;
  for (std::size_t l = 0; l < p.blocks.size(); ++l) {
    const RealMatrix& z = cert.blockCertificates[l];
    for (const PsdBlockMap::Entry& e : p.blocks[l].entries)
      r[e.monomial] -=
          e.coeff * (e.row == e.col ? z(e.row, e.col) : z(e.row, e.col) + z(e.col, e.row));
  }
  if (r.norm() > epsInf * scale) return false;

  for (const RealMatrix& z : cert.blockCertificates) {
    const RealMatrix sym = 0.5 * (z + z.transpose());
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(sym, Eigen::EigenvaluesOnly);
    if (es.eigenvalues()[0] < -epsInf * (1.0 + z.norm())) return false;
  }

  return p.b.dot(cert.mu) <= -epsInf;
}

std::string exportSdpa(const SdpProblem& p) {
  const long nEq = p.A.rows();
  const long nVars = p.tmsLength;
  std::string outText;
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };

  outText += std::to_string(nVars) + "\n";
  outText += std::to_string(p.blocks.size() + 1) + "\n";
  for (const PsdBlockMap& blk : p.blocks) outText += std::to_string(blk.side) + " ";
  outText += std::to_string(-2 * nEq) + "\n";
  for (long i = 0; i < nVars; ++i) {
    if (i) outText += " ";
    outText += num(p.c[i]);
  }
  outText += "\n";

  const int diagBlock = static_cast<int>(p.blocks.size()) + 1;
  // F0: constant matrix; only the diagonal block is nonzero (b, -b)
  for (long k = 0; k < nEq; ++k) {
    if (p.b[k] == 0.0) continue;
    outText += "0 " + std::to_string(diagBlock) + " " + std::to_string(k + 1) + " " +
               std::to_string(k + 1) + " " + num(p.b[k]) + "\n";
    outText += "0 " + std::to_string(diagBlock) + " " + std::to_string(nEq + k + 1) + " " +
               std::to_string(nEq + k + 1) + " " + num(-p.b[k]) + "\n";
  }

  // group psd-block entries and equality columns by variable
  std::vector<std::vector<std::string>> perVar(nVars);
  for (std::size_t l = 0; l < p.blocks.size(); ++l)
    for (const PsdBlockMap::Entry& e : p.blocks[l].entries)
      perVar[e.monomial].push_back(std::to_string(l + 1) + " " + std::to_string(e.row + 1) +
                                   " " + std::to_string(e.col + 1) + " " + num(e.coeff));
  Eigen::SparseMatrix<double> acol = p.A;  // column-major copy
  for (int j = 0; j < acol.outerSize(); ++j)
    for (Eigen::SparseMatrix<double>::InnerIterator it(acol, j); it; ++it) {
      perVar[j].push_back(std::to_string(diagBlock) + " " + std::to_string(it.row() + 1) +
                          " " + std::to_string(it.row() + 1) + " " + num(it.value()));
      perVar[j].push_back(std::to_string(diagBlock) + " " + std::to_string(nEq + it.row() + 1) +
                          " " + std::to_string(nEq + it.row() + 1) + " " + num(-it.value()));
    }
  for (long i = 0; i < nVars; ++i)
    for (const std::string& entry : perVar[i])
      outText += std::to_string(i + 1) + " " + entry + "\n";
  return outText;
}

SdpaStructure parseSdpaStructure(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> dataLines;
  while (std::getline(in, line) && dataLines.size() < 3) {
    if (line.empty() || line[0] == '"' || line[0] == '*') continue;
    dataLines.push_back(line);
  }
  if (dataLines.size() < 3) throw std::runtime_error("parseSdpaStructure: truncated header");
  SdpaStructure s;
  s.varCount = std::stol(dataLines[0]);
  const long nblocks = std::stol(dataLines[1]);
  for (char& ch : dataLines[2])
    if (ch == ',' || ch == '(' || ch == ')' || ch == '{' || ch == '}') ch = ' ';
  std::istringstream bs(dataLines[2]);
  long v;
  while (bs >> v) s.blockSizes.push_back(v);
  if (static_cast<long>(s.blockSizes.size()) != nblocks)
    throw std::runtime_error("parseSdpaStructure: block count mismatch");
  return s;
}

}  // namespace hermitsep
