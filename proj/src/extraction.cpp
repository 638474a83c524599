#include "hermitsep/extraction.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <functional>

#include "hermitsep/rng.hpp"

namespace hermitsep {

namespace {

// Singular values of a symmetric matrix, descending (|eigenvalues| sorted).
RealVector symmetricSingularValues(const RealMatrix& m) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> eig(0.5 * (m + m.transpose()),
                                                Eigen::EigenvaluesOnly);
  RealVector sv = eig.eigenvalues().cwiseAbs();
  std::sort(sv.data(), sv.data() + sv.size(), std::greater<double>());
  return sv;
}

int countAbove(const RealVector& sv, double threshold) {
  int rank = 0;
  for (long i = 0; i < sv.size(); ++i)
    if (sv[i] > threshold) ++rank;
  return rank;
}

}  // namespace

int numericRank(const RealMatrix& m, double tau) {
  if (m.size() == 0) return 0;
  const RealVector sv = symmetricSingularValues(m);
  if (sv.size() == 0 || sv[0] == 0.0) return 0;
  return countAbove(sv, tau * sv[0]);
}

bool flatTruncationCheck(const Tms& w, int t, double tau, const MonomialBasis& basis) {
  if (t < 1 || 2 * t > w.degreeBound)
    throw std::out_of_range("flatTruncationCheck: t out of range");
  const Tms wt = w.truncated(2 * t);
  const RealVector svT = symmetricSingularValues(momentMatrix(wt, t, basis));
  const double sigmaRef = svT.size() ? svT[0] : 0.0;
  if (sigmaRef == 0.0) return true;  // zero moment matrix, both ranks 0
  const RealVector svPrev = symmetricSingularValues(momentMatrix(wt, t - 1, basis));
  return countAbove(svPrev, tau * sigmaRef) == countAbove(svT, tau * sigmaRef);
}

std::optional<AtomicMeasure> extractAtoms(const Tms& w, int t, const ExtractionOptions& opts,
                                          const MonomialBasis& basis,
                                          const VariableLayout& layout) {
  const int n = w.nvars;
  const Tms wt = w.truncated(2 * t);
  const RealMatrix mt = momentMatrix(wt, t, basis);
  const int r = numericRank(mt, opts.rankTau);
  if (r == 0) return std::nullopt;

  // Basis columns are picked among degree <= t-1 monomials (flatness
  // guarantees they span the column space) so every shift x_q * beta stays
  // inside M_t.
  const long lowCols = basis.sizeUpToDegree(t - 1);
  Eigen::ColPivHouseholderQR<RealMatrix> pivQr(mt.leftCols(lowCols));
  if (pivQr.rank() < r) return std::nullopt;
  std::vector<long> basisCols(r);
  for (int i = 0; i < r; ++i) basisCols[i] = pivQr.colsPermutation().indices()[i];

  RealMatrix b0(mt.rows(), r);
  for (int i = 0; i < r; ++i) b0.col(i) = mt.col(basisCols[i]);
  Eigen::ColPivHouseholderQR<RealMatrix> b0Qr(b0);

  std::vector<RealMatrix> mult(n);
  std::vector<int> shifted(basis.nvars());
  for (int q = 0; q < n; ++q) {
    RealMatrix bq(mt.rows(), r);
    for (int i = 0; i < r; ++i) {
      std::vector<int> e = basis.exponents(basisCols[i]);
      e[q] += 1;
      bq.col(i) = mt.col(basis.indexOf(e));
    }
    mult[q] = b0Qr.solve(bq);
  }

  // Random convex combination; simultaneous diagonalization via real Schur.
  Rng rng(mixSeed(opts.xiSeed, 0x5c0ffeeULL));
  RealVector xi(n);
  for (int q = 0; q < n; ++q) xi[q] = rng.uniform(0.1, 1.0);
  xi /= xi.sum();
  RealMatrix combined = RealMatrix::Zero(r, r);
  for (int q = 0; q < n; ++q) combined += xi[q] * mult[q];

  Eigen::RealSchur<RealMatrix> schur(combined);
  if (schur.info() != Eigen::Success) return std::nullopt;
  const RealMatrix& tmat = schur.matrixT();
  const RealMatrix& qmat = schur.matrixU();
  const double tnorm = std::max(tmat.norm(), 1e-300);
  for (int i = 0; i + 1 < r; ++i)
    if (std::abs(tmat(i + 1, i)) > 1e-7 * tnorm) return std::nullopt;  // complex pair: retry

  AtomicMeasure measure;
  measure.degree = 2 * t;
  for (int i = 0; i < r; ++i) {
    RealVector point(n);
    for (int q = 0; q < n; ++q) point[q] = qmat.col(i).dot(mult[q] * qmat.col(i));
    measure.atoms.push_back({0.0, std::move(point)});
  }

  // K-membership: reject badly violated atoms, project the rest mode-wise.
  for (AtomicMeasure::Atom& atom : measure.atoms) {
    for (int j = 0; j < layout.modeCount(); ++j) {
      const int off = layout.blockOffset(j);
      const int len = layout.blockSize(j);
      const double norm = atom.point.segment(off, len).norm();
      if (std::abs(norm * norm - 1.0) > 3.0 * opts.kViolationTol) return std::nullopt;
      double lead = atom.point[off];
      if (lead < -opts.kViolationTol) return std::nullopt;
      if (lead < 0.0) atom.point[off] = 0.0;
      const double n2 = atom.point.segment(off, len).norm();
      if (n2 == 0.0) return std::nullopt;
      atom.point.segment(off, len) /= n2;
    }
  }

  // Weights by least squares over all degrees <= 2t, then prune.
  auto fitWeights = [&](std::vector<AtomicMeasure::Atom>& atoms) {
    RealMatrix vand(wt.length(), atoms.size());
    for (std::size_t i = 0; i < atoms.size(); ++i)
      vand.col(i) = tmsOfPoint(atoms[i].point, 2 * t, basis).values;
    RealVector lam = vand.colPivHouseholderQr().solve(wt.values);
    for (std::size_t i = 0; i < atoms.size(); ++i) atoms[i].weight = lam[i];
    return (vand * lam - wt.values).norm();
  };

  double res = fitWeights(measure.atoms);
  double maxWeight = 0.0;
  for (const auto& atom : measure.atoms) maxWeight = std::max(maxWeight, atom.weight);
  if (maxWeight <= 0.0) return std::nullopt;
  std::vector<AtomicMeasure::Atom> kept;
  for (auto& atom : measure.atoms)
    if (atom.weight > opts.rankTau * maxWeight) kept.push_back(std::move(atom));
  if (kept.empty()) return std::nullopt;
  const bool dropped = kept.size() != measure.atoms.size();
  measure.atoms = std::move(kept);
  if (dropped) res = fitWeights(measure.atoms);
  for (const auto& atom : measure.atoms)
    if (!(atom.weight > 0.0)) return std::nullopt;

  if (res > opts.extractTolFactor * (1.0 + wt.values.norm())) return std::nullopt;
  return measure;
}

Verdict runAlgorithm(const HermitianTensor& h, const AlgorithmOptions& opts) {
  const Shape& shape = h.shape();
  const int m = shape.order();
  const int kMax = opts.maxOrder > 0 ? opts.maxOrder : m + 1;
  if (kMax < m) throw std::invalid_argument("runAlgorithm: maxOrder must be >= tensor order");

  const VariableLayout layout(shape);
  const RealPolynomial objective = genericObjective(mixSeed(opts.seed, 0xF001ULL), layout);

  Verdict verdict;
  for (int k = m; k <= kMax; ++k) {
    verdict.order = k;
    const SdpProblem prob = assembleSdp(h, k, objective);
    const SolveOutcome sol = solve(prob, opts.solver);
    verdict.lastResiduals = sol.residuals;

    if (sol.status == SolveStatus::PrimalInfeasible) {
      if (sol.certificate && verifyCertificate(prob, *sol.certificate, opts.solver.epsInf)) {
        verdict.kind = Verdict::Kind::NotSeparable;
        verdict.certificate = sol.certificate;
        verdict.message = "relaxation infeasible at order k=" + std::to_string(k);
        return verdict;
      }
      verdict.kind = Verdict::Kind::Inconclusive;
      verdict.message = "infeasibility reported but certificate failed verification";
      return verdict;
    }
    if (sol.status != SolveStatus::Optimal) {
      verdict.kind = Verdict::Kind::Inconclusive;
      verdict.message = std::string("solver status ") + statusName(sol.status) +
                        " at order k=" + std::to_string(k);
      return verdict;
    }

    const MonomialBasis basis(layout.nvars, 2 * k);
    bool escalate = false;
    for (int t = 1; t <= k && !escalate; ++t) {
      if (!flatTruncationCheck(sol.momentVector, t, opts.rankTau, basis)) continue;
      for (int attempt = 0; attempt <= opts.xiRetries; ++attempt) {
        ExtractionOptions exOpts;
        exOpts.rankTau = opts.rankTau;
        exOpts.xiSeed = mixSeed(opts.seed, 0xA70ULL + 977u * k + 31u * t + attempt);
        auto measure = extractAtoms(sol.momentVector, t, exOpts, basis, layout);
        if (!measure) continue;

        HermitianDecomposition decomposition;
        for (const auto& atom : measure->atoms)
          decomposition.terms.push_back({atom.weight, complexLift(atom.point, layout)});
        const HermitianTensor rebuilt = fromDecomposition(decomposition, shape);
        const double diff = (h.flattening() - rebuilt.flattening()).norm();
        if (diff <= opts.acceptTolFactor * (1.0 + h.frobeniusNorm())) {
          verdict.kind = Verdict::Kind::Separable;
          verdict.decomposition = std::move(decomposition);
          verdict.residual = residual(h, rebuilt);
          verdict.message = "flat truncation at t=" + std::to_string(t) +
                            ", order k=" + std::to_string(k);
          return verdict;
        }
      }
      escalate = true;  // flat but extraction failed repeatedly: try a higher order
    }
  }
  verdict.kind = Verdict::Kind::Inconclusive;
  verdict.message = "no flat truncation up to order k=" + std::to_string(kMax);
  return verdict;
}

}  // namespace hermitsep
