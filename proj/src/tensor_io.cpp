#include "hermitsep/tensor_io.hpp"

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

#include "hermitsep/rng.hpp"

namespace hermitsep {

using Json = nlohmann::ordered_json;

namespace {

Json complexVectorJson(const Vector& v) {
  Json out = Json::array();
  for (long i = 0; i < v.size(); ++i) out.push_back({v[i].real(), v[i].imag()});
  return out;
}

Vector complexVectorFromJson(const Json& j) {
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    v[i] = Complex(j[i][0].get<double>(), j[i][1].get<double>());
  return v;
}

Json complexMatrixJson(const Matrix& m) {
  Json rows = Json::array();
  for (long r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (long c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix complexMatrixFromJson(const Json& j) {
  const long rows = static_cast<long>(j.size());
  const long cols = rows ? static_cast<long>(j[0].size()) : 0;
  Matrix m(rows, cols);
  for (long r = 0; r < rows; ++r)
    for (long c = 0; c < cols; ++c)
      m(r, c) = Complex(j[r][c][0].get<double>(), j[r][c][1].get<double>());
  return m;
}

Json realMatrixJson(const RealMatrix& m) {
  Json rows = Json::array();
  for (long r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (long c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

RealMatrix realMatrixFromJson(const Json& j) {
  const long rows = static_cast<long>(j.size());
  const long cols = rows ? static_cast<long>(j[0].size()) : 0;
  RealMatrix m(rows, cols);
  for (long r = 0; r < rows; ++r)
    for (long c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  return m;
}

int exitCodeFor(const std::string& verdict) {
  if (verdict == "SEPARABLE" || verdict == "CERTIFIED_PSD") return 0;
  if (verdict == "NOT_SEPARABLE") return 10;
  return 20;  // INCONCLUSIVE, NOT_CERTIFIED
}

}  // namespace

std::string tensorFileText(const HermitianTensor& h, const TensorFileMetadata& meta) {
  Json j;
  j["format"] = "hermitsep-tensor";
  j["version"] = 1;
  j["shape"] = h.shape().dims;
  Json entries = Json::array();
  const Matrix& flat = h.flattening();
  for (long r = 0; r < flat.rows(); ++r)
    for (long c = 0; c < flat.cols(); ++c)
      entries.push_back({flat(r, c).real(), flat(r, c).imag()});
  j["entries"] = std::move(entries);
  if (meta.name || meta.seed || meta.provenance) {
    Json md;
    if (meta.name) md["name"] = *meta.name;
    if (meta.seed) md["seed"] = *meta.seed;
    if (meta.provenance) md["provenance"] = *meta.provenance;
    j["metadata"] = std::move(md);
  }
  return j.dump(2) + "\n";
}

void writeTensorFile(const std::string& path, const HermitianTensor& h,
                     const TensorFileMetadata& meta) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("writeTensorFile: cannot open " + path);
  out << tensorFileText(h, meta);
}

HermitianTensor parseTensorText(const std::string& text, TensorFileMetadata* meta) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const std::exception& e) {
    throw TensorParseError(std::string("tensor file: invalid JSON: ") + e.what());
  }
  try {
    if (j.value("format", "") != "hermitsep-tensor")
      throw TensorParseError("tensor file: missing hermitsep-tensor format tag");
    const Shape shape(j.at("shape").get<std::vector<int>>());
    const long m = shape.flatSize();
    const Json& entries = j.at("entries");
    if (static_cast<long>(entries.size()) != m * m)
      throw TensorParseError("tensor file: entry count does not match shape");
    Matrix flat(m, m);
    for (long r = 0; r < m; ++r)
      for (long c = 0; c < m; ++c) {
        const Json& e = entries[r * m + c];
        flat(r, c) = Complex(e[0].get<double>(), e[1].get<double>());
      }
    if (meta && j.contains("metadata")) {
      const Json& md = j["metadata"];
      if (md.contains("name")) meta->name = md["name"].get<std::string>();
      if (md.contains("seed")) meta->seed = md["seed"].get<std::uint64_t>();
      if (md.contains("provenance")) meta->provenance = md["provenance"].get<std::string>();
    }
    return HermitianTensor::fromFlattening(shape, flat);
  } catch (const TensorParseError&) {
    throw;
  } catch (const std::exception& e) {
    throw TensorParseError(std::string("tensor file: ") + e.what());
  }
}

HermitianTensor readTensorFile(const std::string& path, TensorFileMetadata* meta) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TensorParseError("cannot open tensor file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parseTensorText(buffer.str(), meta);
}

HermitianTensor randomSeparable(const Shape& shape, int terms, std::uint64_t seed,
                                HermitianDecomposition* generating) {
  if (terms < 1) throw std::invalid_argument("randomSeparable: terms must be >= 1");
  Rng rng(mixSeed(seed, 0x5e9aULL));
  HermitianDecomposition d;
  for (int i = 0; i < terms; ++i) {
    DecompositionTerm term;
    term.weight = rng.uniform(0.5, 2.0);
    for (int n : shape.dims) {
      Vector u(n);
      for (int t = 0; t < n; ++t) u[t] = rng.gaussianComplex();
      u /= u.norm();
      if (std::abs(u[0]) > 1e-12) u *= std::conj(u[0]) / std::abs(u[0]);
      term.vectors.push_back(std::move(u));
    }
    d.terms.push_back(std::move(term));
  }
  if (generating) *generating = d;
  return fromDecomposition(d, shape);
}

HermitianTensor randomPsdKind(const Shape& shape, int terms, std::uint64_t seed,
                              PsdDecomposition* generating) {
  if (terms < 1) throw std::invalid_argument("randomPsdKind: terms must be >= 1");
  Rng rng(mixSeed(seed, 0x95dULL));
  PsdDecomposition p;
  for (int i = 0; i < terms; ++i) {
    PsdTerm term;
    for (int n : shape.dims) {
      Matrix x(n, n);
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) x(r, c) = rng.gaussianComplex();
      term.factors.push_back(x * x.adjoint());
    }
    p.terms.push_back(std::move(term));
  }
  if (generating) *generating = p;
  return assembleFromPsd(p, shape);
}

HermitianTensor randomHermitian(const Shape& shape, std::uint64_t seed) {
  Rng rng(mixSeed(seed, 0x4e4dULL));
  const long m = shape.flatSize();
  Matrix g(m, m);
  for (long r = 0; r < m; ++r)
    for (long c = 0; c < m; ++c) g(r, c) = rng.gaussianComplex();
  return HermitianTensor::fromFlattening(shape, 0.5 * (g + g.adjoint().eval()));
}

ResultReport reportFromVerdict(const HermitianTensor& h, const Verdict& verdict,
                               const AlgorithmOptions& opts, std::uint64_t seed,
                               double elapsedSeconds) {
  Json j;
  j["format"] = "hermitsep-report";
  j["version"] = 1;
  j["tool_version"] = kToolVersion;
  j["mode"] = "check";
  std::string verdictName;
  switch (verdict.kind) {
    case Verdict::Kind::Separable: verdictName = "SEPARABLE"; break;
    case Verdict::Kind::NotSeparable: verdictName = "NOT_SEPARABLE"; break;
    case Verdict::Kind::Inconclusive: verdictName = "INCONCLUSIVE"; break;
  }
  j["verdict"] = verdictName;
  j["exit_code"] = exitCodeFor(verdictName);
  j["shape"] = h.shape().dims;
  j["order"] = verdict.order;
  j["seed"] = seed;
  j["accept_tol_factor"] = opts.acceptTolFactor;
  j["message"] = verdict.message;
  if (verdict.kind == Verdict::Kind::Separable) {
    j["residual"] = verdict.residual;
    j["atom_count"] = verdict.decomposition.terms.size();
    Json weights = Json::array();
    Json vectors = Json::array();
    for (const DecompositionTerm& term : verdict.decomposition.terms) {
      weights.push_back(term.weight);
      Json modes = Json::array();
      for (const Vector& u : term.vectors) modes.push_back(complexVectorJson(u));
      vectors.push_back(std::move(modes));
    }
    j["weights"] = std::move(weights);
    j["vectors"] = std::move(vectors);
  }
  if (verdict.kind == Verdict::Kind::NotSeparable && verdict.certificate) {
    Json cert;
    Json mu = Json::array();
    for (long i = 0; i < verdict.certificate->mu.size(); ++i)
      mu.push_back(verdict.certificate->mu[i]);
    cert["mu"] = std::move(mu);
    Json blocks = Json::array();
    for (const RealMatrix& z : verdict.certificate->blockCertificates)
      blocks.push_back(realMatrixJson(z));
    cert["blocks"] = std::move(blocks);
    j["certificate"] = std::move(cert);
  }
  Json solver;
  solver["iterations"] = verdict.lastResiduals.iterations;
  solver["primal_residual"] = verdict.lastResiduals.primal;
  solver["dual_residual"] = verdict.lastResiduals.dual;
  solver["gap"] = verdict.lastResiduals.gap;
  j["solver"] = std::move(solver);
  j["elapsed_seconds"] = elapsedSeconds;

  ResultReport report;
  report.verdict = verdictName;
  report.exitCode = exitCodeFor(verdictName);
  report.json = j.dump(2) + "\n";
  return report;
}

ResultReport reportFromPsdResult(const HermitianTensor& h, const PsdResult& result,
                                 std::uint64_t seed, double elapsedSeconds) {
  Json j;
  j["format"] = "hermitsep-report";
  j["version"] = 1;
  j["tool_version"] = kToolVersion;
  j["mode"] = "psd";
  j["shape"] = h.shape().dims;
  j["seed"] = seed;

  std::string verdictName;
  if (const auto* cert = std::get_if<PsdCertification>(&result)) {
    verdictName = cert->certificate.certified() ? "CERTIFIED_PSD" : "NOT_CERTIFIED";
    j["verdict"] = verdictName;
    j["exit_code"] = exitCodeFor(verdictName);
    j["rank"] = cert->rank;
    if (cert->rankIsExact) j["psd_rank"] = cert->rank;
    else if (cert->certificate.certified()) j["psd_rank_upper_bound"] = cert->rank;
    Json c;
    c["kind"] = kindName(cert->certificate.kind);
    if (!cert->certificate.kruskalRanks.empty()) {
      c["kruskal_ranks"] = cert->certificate.kruskalRanks;
      c["kruskal_required"] = cert->certificate.kruskalRequired;
    }
    if (cert->certificate.rankA >= 0) {
      c["rank_a"] = cert->certificate.rankA;
      c["compound_sigma_ratio"] = cert->certificate.compoundSigmaRatio;
    }
    j["certificate"] = std::move(c);
    j["residual"] = cert->residual;
    j["recon_tol_factor"] = 1e-6;
    Json terms = Json::array();
    for (const PsdTerm& term : cert->decomposition.terms) {
      Json modes = Json::array();
      for (const Matrix& b : term.factors) modes.push_back(complexMatrixJson(b));
      terms.push_back(std::move(modes));
    }
    j["psd_terms"] = std::move(terms);
  } else {
    const PsdFailure& failure = std::get<PsdFailure>(result);
    verdictName = "NOT_CERTIFIED";
    j["verdict"] = verdictName;
    j["exit_code"] = exitCodeFor(verdictName);
    Json f;
    f["stage"] = failure.stage;
    if (failure.term >= 0) f["term"] = failure.term;
    if (failure.mode >= 0) f["mode"] = failure.mode;
    f["detail"] = failure.detail;
    j["failure"] = std::move(f);
  }
  j["elapsed_seconds"] = elapsedSeconds;

  ResultReport report;
  report.verdict = verdictName;
  report.exitCode = exitCodeFor(verdictName);
  report.json = j.dump(2) + "\n";
  return report;
}

std::string verifyReport(const HermitianTensor& h, const std::string& reportJson) {
  Json j;
  try {
    j = Json::parse(reportJson);
  } catch (const std::exception& e) {
    return std::string("report: invalid JSON: ") + e.what();
  }
  if (j.value("format", "") != "hermitsep-report") return "report: missing format tag";
  const std::string verdict = j.value("verdict", "");
  const std::vector<int> dims = j.value("shape", std::vector<int>{});
  if (dims != h.shape().dims) return "report: shape does not match tensor";

  if (verdict == "SEPARABLE") {
    if (!j.contains("weights") || !j.contains("vectors")) return "report: decomposition missing";
    HermitianDecomposition d;
    const Json& weights = j["weights"];
    const Json& vectors = j["vectors"];
    if (weights.size() != vectors.size()) return "report: weight/vector count mismatch";
    for (std::size_t i = 0; i < weights.size(); ++i) {
      DecompositionTerm term;
      term.weight = weights[i].get<double>();
      if (!(term.weight > 0)) return "report: nonpositive weight";
      for (const Json& mode : vectors[i]) {
        Vector u = complexVectorFromJson(mode);
        if (std::abs(u.norm() - 1.0) > 1e-6) return "report: vector is not unit norm";
        if (u[0].real() < -1e-8 || std::abs(u[0].imag()) > 1e-8)
          return "report: vector is not gauge-fixed";
        term.vectors.push_back(std::move(u));
      }
      d.terms.push_back(std::move(term));
    }
    const HermitianTensor rebuilt = fromDecomposition(d, h.shape());
    const double tolFactor = j.value("accept_tol_factor", 1e-5);
    const double diff = (h.flattening() - rebuilt.flattening()).norm();
    if (diff > tolFactor * (1.0 + h.frobeniusNorm()))
      return "report: reconstruction residual exceeds recorded tolerance";
    return "";
  }

  if (verdict == "NOT_SEPARABLE") {
    if (!j.contains("certificate")) return "report: certificate missing";
    InfeasibilityCertificate cert;
    const Json& cj = j["certificate"];
    const Json& mu = cj.at("mu");
    cert.mu.resize(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) cert.mu[i] = mu[i].get<double>();
    for (const Json& blk : cj.at("blocks")) cert.blockCertificates.push_back(realMatrixFromJson(blk));
    const int order = j.value("order", 0);
    const std::uint64_t seed = j.value("seed", std::uint64_t{0});
    const VariableLayout layout(h.shape());
    const RealPolynomial objective = genericObjective(mixSeed(seed, 0xF001ULL), layout);
    const SdpProblem prob = assembleSdp(h, order, objective);
    try {
      if (!verifyCertificate(prob, cert)) return "report: certificate fails the Farkas check";
    } catch (const std::exception& e) {
      return std::string("report: malformed certificate: ") + e.what();
    }
    return "";
  }

  if (verdict == "CERTIFIED_PSD" || verdict == "NOT_CERTIFIED") {
    if (!j.contains("psd_terms")) return "";  // failure-only report: nothing to re-check
    PsdDecomposition p;
    for (const Json& termJson : j["psd_terms"]) {
      PsdTerm term;
      for (const Json& modeJson : termJson) {
        Matrix b = complexMatrixFromJson(modeJson);
        if ((b - b.adjoint()).norm() > 1e-8 * std::max(1.0, b.norm()))
          return "report: psd factor is not Hermitian";
        Eigen::SelfAdjointEigenSolver<Matrix> eig(b, Eigen::EigenvaluesOnly);
        if (eig.eigenvalues()[0] < -1e-8 * std::max(1.0, b.norm()))
          return "report: psd factor has a negative eigenvalue";
        term.factors.push_back(std::move(b));
      }
      p.terms.push_back(std::move(term));
    }
    const HermitianTensor rebuilt = assembleFromPsd(p, h.shape());
    const double tolFactor = j.value("recon_tol_factor", 1e-6);
    const double diff = (h.flattening() - rebuilt.flattening()).norm();
    if (diff > tolFactor * (1.0 + h.frobeniusNorm()))
      return "report: reconstruction residual exceeds recorded tolerance";
    return "";
  }

  if (verdict == "INCONCLUSIVE") return "";
  return "report: unknown verdict " + verdict;
}

}  // namespace hermitsep
