#pragma once

#include <optional>
#include <string>

#include "hermitsep/solver.hpp"

namespace hermitsep {

/// Number of singular values above tau * sigma_max (0 for the zero matrix).
int numericRank(const RealMatrix& m, double tau = 1e-6);

/// Flat truncation: rank M_{t-1}(w|_{2t}) == rank M_t(w|_{2t}), both ranks
/// measured against the larger matrix's top singular value.
bool flatTruncationCheck(const Tms& w, int t, double tau, const MonomialBasis& basis);

struct AtomicMeasure {
  struct Atom {
    double weight = 0.0;
    RealVector point;
  };
  std::vector<Atom> atoms;
  int degree = 0;  // 2t
};

struct ExtractionOptions {
  double rankTau = 1e-6;
  double extractTolFactor = 1e-6;  // residual gate: factor * (1 + ||w||)
  double kViolationTol = 1e-4;     // max |h| / negative gauge allowed before projection
  std::uint64_t xiSeed = 0;        // seed of the random multiplication-matrix combination
};

/// Recovers the atoms of a flat tms via multiplication matrices and an
/// ordered Schur decomposition, then projects each atom onto K and fits the
/// weights by least squares over all degrees <= 2t.  Returns nothing when the
/// reproduction residual or the K-membership checks fail.
std::optional<AtomicMeasure> extractAtoms(const Tms& w, int t, const ExtractionOptions& opts,
                                          const MonomialBasis& basis,
                                          const VariableLayout& layout);

struct AlgorithmOptions {
  int maxOrder = 0;  // 0 = order m + 1
  std::uint64_t seed = 1;
  double rankTau = 1e-6;
  double acceptTolFactor = 1e-5;  // accepts when ||H - Hhat||_F <= factor * (1 + ||H||_F)
  int xiRetries = 3;
  SolveOptions solver;
};

struct Verdict {
  enum class Kind { Separable, NotSeparable, Inconclusive };
  Kind kind = Kind::Inconclusive;
  int order = 0;  // relaxation order that decided (or last tried)
  HermitianDecomposition decomposition;  // Separable
  double residual = std::numeric_limits<double>::quiet_NaN();
  std::optional<InfeasibilityCertificate> certificate;  // NotSeparable
  SolveResiduals lastResiduals;
  std::string message;
};

/// The relaxation loop: solve order k = m, m+1, ..., detect infeasibility
/// (not separable), otherwise scan t = 1..k for flat truncation and extract a
/// positive decomposition.  Inexact solves and exhausted orders yield
/// Inconclusive, never a verdict.
Verdict runAlgorithm(const HermitianTensor& h, const AlgorithmOptions& opts);

}  // namespace hermitsep
