#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hermitsep/moment.hpp"

namespace hermitsep {

struct SolveOptions {
  int maxIterations = 50000;
  double epsFeas = 1e-8;
  double epsGap = 1e-8;
  double epsInf = 1e-9;
  std::uint64_t seed = 0;  // reserved for internal randomization; the splitting itself is deterministic
  int verbosity = 0;
  int checkInterval = 25;
  double overRelaxation = 1.6;
  int accelerationMemory = 0;  // Anderson acceleration window; 0 = plain splitting
};

enum class SolveStatus { Optimal, PrimalInfeasible, Unbounded, Inexact };

std::string statusName(SolveStatus s);

/// Farkas-type certificate of primal infeasibility: equality multipliers mu
/// and one psd matrix per cone block, normalized so <b, mu> = -1.
struct InfeasibilityCertificate {
  RealVector mu;
  std::vector<RealMatrix> blockCertificates;
};

struct SolveResiduals {
  double primal = std::numeric_limits<double>::infinity();
  double dual = std::numeric_limits<double>::infinity();
  double gap = std::numeric_limits<double>::infinity();
  double infeasibility = std::numeric_limits<double>::infinity();
  int iterations = 0;
};

struct SolveOutcome {
  SolveStatus status = SolveStatus::Inexact;
  Tms momentVector;               // primal w (unscaled), valid for Optimal/Inexact
  RealVector equalityDuals;       // mu, valid when a dual estimate exists
  std::vector<RealMatrix> blockDuals;
  std::optional<InfeasibilityCertificate> certificate;
  SolveResiduals residuals;
  double objective = std::numeric_limits<double>::quiet_NaN();
};

/// Solves the assembled relaxation with operator splitting on the homogeneous
/// self-dual embedding.  Deterministic for fixed inputs.  PrimalInfeasible is
/// only reported after verifyCertificate passes on the returned certificate.
SolveOutcome solve(const SdpProblem& p, const SolveOptions& opts = {});

/// Checks the Farkas conditions: A^T mu combined with the cone-adjoint of the
/// certificate blocks (as the rows enter the conic form) vanishes within
/// epsInf * (1 + ||mu|| + sum ||Z||), every Z is psd within epsInf, and
/// <b, mu> <= -epsInf.
bool verifyCertificate(const SdpProblem& p, const InfeasibilityCertificate& cert,
                       double epsInf = 1e-9);

/// SDPA sparse format (.dat-s), dual/LMI convention: one diagonal block of
/// paired opposing inequalities encodes the equality system.
std::string exportSdpa(const SdpProblem& p);

struct SdpaStructure {
  long varCount = 0;
  std::vector<long> blockSizes;  // negative entries denote diagonal blocks
};

SdpaStructure parseSdpaStructure(const std::string& text);

}  // namespace hermitsep
