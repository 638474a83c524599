#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <fstream>
#include <sstream>

#include "hermitsep/rng.hpp"
#include "hermitsep/solver.hpp"
#include "hermitsep/tensor_io.hpp"
#include "paper_fixtures.hpp"

using namespace hermitsep;

namespace {

// min w0 s.t. w0 = 1, w0 = 2: contradictory equalities, no psd blocks.
SdpProblem contradictoryToy() {
  SdpProblem p;
  p.shape = Shape({2});
  p.order = 1;
  p.nvars = 1;
  p.tmsLength = 1;
  p.c = RealVector::Zero(1);
  p.c[0] = 1.0;
  p.A.resize(2, 1);
  p.A.insert(0, 0) = 1.0;
  p.A.insert(1, 0) = 1.0;
  p.A.makeCompressed();
  p.b = RealVector::Zero(2);
  p.b[0] = 1.0;
  p.b[1] = 2.0;
  p.hScale = 1.0;
  return p;
}

// min w0 s.t. w0 >= 0 (1x1 psd block), w0 = 1.
SdpProblem feasibleToy() {
  SdpProblem p;
  p.shape = Shape({2});
  p.order = 1;
  p.nvars = 1;
  p.tmsLength = 1;
  p.c = RealVector::Zero(1);
  p.c[0] = 1.0;
  p.A.resize(1, 1);
  p.A.insert(0, 0) = 1.0;
  p.A.makeCompressed();
  p.b = RealVector::Ones(1);
  PsdBlockMap blk;
  blk.name = "w";
  blk.side = 1;
  blk.entries.push_back({0, 0, 0, 1.0});
  p.blocks.push_back(blk);
  p.hScale = 1.0;
  return p;
}

SdpProblem rankOneProblem(std::uint64_t seed, const Shape& shape, int k,
                          HermitianTensor* out = nullptr) {
  HermitianTensor h = randomSeparable(shape, 1, seed);
  if (out) *out = h;
  const VariableLayout layout(shape);
  return assembleSdp(h, k, genericObjective(7, layout));
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), ("missing fixture " + path).c_str());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

TEST_CASE("toy equality contradiction is primal infeasible") {
  const SdpProblem p = contradictoryToy();
  const SolveOutcome out = solve(p);
  REQUIRE(out.status == SolveStatus::PrimalInfeasible);
  REQUIRE(out.certificate.has_value());
  // certificate is proportional to mu = (1, -1), scaled so <b, mu> = -1
  const RealVector& mu = out.certificate->mu;
  CHECK(mu[0] == doctest::Approx(-mu[1]).epsilon(1e-6));
  CHECK(p.b.dot(mu) == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(verifyCertificate(p, *out.certificate));
}

TEST_CASE("feasible toy solves to the constraint value") {
  const SdpProblem p = feasibleToy();
  const SolveOutcome out = solve(p);
  REQUIRE(out.status == SolveStatus::Optimal);
  CHECK(out.momentVector.values[0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("rank-one separable tensor solves with a flat rank-1 moment matrix") {
  HermitianTensor h;
  const SdpProblem p = rankOneProblem(3, Shape({2, 2}), 2, &h);
  const SolveOutcome out = solve(p);
  REQUIRE(out.status == SolveStatus::Optimal);
  const MonomialBasis basis(p.nvars, 2 * p.order);
  const RealMatrix m1 = momentMatrix(out.momentVector.truncated(2), 1, basis);
  Eigen::JacobiSVD<RealMatrix> svd(m1);
  int rank = 0;
  for (long i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > 1e-6 * svd.singularValues()[0]) ++rank;
  CHECK(rank == 1);
  // the spec's residual invariants, re-checked outside the solver
  CHECK((p.A * out.momentVector.values - p.b).norm() <= 1e-8 * (1.0 + p.b.norm()));
  for (const PsdBlockMap& blk : p.blocks) {
    const RealMatrix s = blk.evaluate(out.momentVector.values);
    Eigen::SelfAdjointEigenSolver<RealMatrix> eig(s, Eigen::EigenvaluesOnly);
    CHECK(eig.eigenvalues()[0] >= -1e-8 * (1.0 + s.norm()));
  }
}

TEST_CASE("Hankel relaxation at k=2 is primal infeasible with a verified certificate") {
  const HermitianTensor h = fixtures::hankelC22();
  const VariableLayout layout(h.shape());
  const SdpProblem p = assembleSdp(h, 2, genericObjective(7, layout));
  const SolveOutcome out = solve(p);
  REQUIRE(out.status == SolveStatus::PrimalInfeasible);
  REQUIRE(out.certificate.has_value());
  CHECK(verifyCertificate(p, *out.certificate));
}

TEST_CASE("zero and corrupted certificates are rejected") {
  const HermitianTensor h = fixtures::hankelC22();
  const VariableLayout layout(h.shape());
  const SdpProblem p = assembleSdp(h, 2, genericObjective(7, layout));
  InfeasibilityCertificate zero;
  zero.mu = RealVector::Zero(p.A.rows());
  for (const PsdBlockMap& blk : p.blocks)
    zero.blockCertificates.push_back(RealMatrix::Zero(blk.side, blk.side));
  CHECK_FALSE(verifyCertificate(p, zero));  // <b, mu> = 0 fails strict negativity

  const SolveOutcome out = solve(p);
  REQUIRE(out.certificate.has_value());
  InfeasibilityCertificate bad = *out.certificate;
  bad.blockCertificates[0] -=
      10.0 * RealMatrix::Identity(bad.blockCertificates[0].rows(),
                                  bad.blockCertificates[0].cols());
  CHECK_FALSE(verifyCertificate(p, bad));  // negative eigenvalue

  InfeasibilityCertificate malformed = *out.certificate;
  malformed.mu = RealVector::Zero(3);
  CHECK_THROWS_AS(verifyCertificate(p, malformed), std::invalid_argument);
}

TEST_CASE("solver determinism: identical problem and options give identical output") {
  const SdpProblem p = rankOneProblem(5, Shape({2, 2}), 2);
  const SolveOutcome a = solve(p);
  const SolveOutcome b = solve(p);
  REQUIRE(a.status == b.status);
  CHECK((a.momentVector.values - b.momentVector.values).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.residuals.iterations == b.residuals.iterations);
}

TEST_CASE("status is invariant under positive scaling of the tensor") {
  const HermitianTensor hankel = fixtures::hankelC22();
  const VariableLayout layout(hankel.shape());
  const RealPolynomial f = genericObjective(7, layout);
  const HermitianTensor scaled =
      HermitianTensor::fromFlattening(hankel.shape(), 10.0 * hankel.flattening());
  CHECK(solve(assembleSdp(hankel, 2, f)).status == SolveStatus::PrimalInfeasible);
  CHECK(solve(assembleSdp(scaled, 2, f)).status == SolveStatus::PrimalInfeasible);

  HermitianTensor sep = randomSeparable(Shape({2, 2}), 2, 11);
  const HermitianTensor sepScaled =
      HermitianTensor::fromFlattening(sep.shape(), 25.0 * sep.flattening());
  CHECK(solve(assembleSdp(sep, 2, f)).status == SolveStatus::Optimal);
  CHECK(solve(assembleSdp(sepScaled, 2, f)).status == SolveStatus::Optimal);
}

TEST_CASE("iteration cap produces Inexact, never a verdict") {
  const HermitianTensor h = randomSeparable(Shape({2, 2}), 2, 13);
  const VariableLayout layout(h.shape());
  const SdpProblem p = assembleSdp(h, 2, genericObjective(7, layout));
  SolveOptions opts;
  opts.maxIterations = 10;
  const SolveOutcome out = solve(p, opts);
  CHECK(out.status == SolveStatus::Inexact);
}

TEST_CASE("SDPA export: golden toy file and structure round trip") {
  const SdpProblem toy = feasibleToy();
  const std::string text = exportSdpa(toy);
  CHECK(text == exportSdpa(toy));  // deterministic
  const SdpaStructure st = parseSdpaStructure(text);
  CHECK(st.varCount == 1);
  REQUIRE(st.blockSizes.size() == 2);
  CHECK(st.blockSizes[0] == 1);
  CHECK(st.blockSizes[1] == -2);

  const std::string golden = slurp(std::string(HERMITSEP_FIXTURE_DIR) + "/toy_min.dat-s");
  CHECK(text == golden);
}

TEST_CASE("SDPA export of the Hankel relaxation matches the committed golden file") {
  const HermitianTensor h = fixtures::hankelC22();
  const VariableLayout layout(h.shape());
  const SdpProblem p = assembleSdp(h, 2, genericObjective(mixSeed(12345, 0xF001ULL), layout));
  const std::string text = exportSdpa(p);
  const SdpaStructure st = parseSdpaStructure(text);
  CHECK(st.varCount == p.tmsLength);
  CHECK(st.blockSizes.size() == p.blocks.size() + 1);
  for (std::size_t i = 0; i < p.blocks.size(); ++i)
    CHECK(st.blockSizes[i] == p.blocks[i].side);
  CHECK(st.blockSizes.back() == -2 * p.A.rows());

  const std::string golden =
      slurp(std::string(HERMITSEP_FIXTURE_DIR) + "/hankel_c22_k2.dat-s");
  CHECK(text == golden);
}

TEST_CASE("external solver cross-check fixture records Hankel infeasibility") {
  const std::string text =
      slurp(std::string(HERMITSEP_FIXTURE_DIR) + "/hankel_c22_k2_external.json");
  CHECK(text.find("\"status\": \"infeasible\"") != std::string::npos);
}
