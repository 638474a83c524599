// hermitsep: decide Hermitian tensor separability via moment relaxations and
// compute psd decompositions via tensor flattening + CPD.

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "hermitsep/rng.hpp"
#include "hermitsep/tensor_io.hpp"

namespace {

using namespace hermitsep;

constexpr int kExitParseError = 2;
constexpr int kExitInternalError = 3;

std::uint64_t defaultSeed() {
  if (const char* env = std::getenv("HERMITSEP_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0') return v;
  }
  return 12345;
}

void writeFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file " + path);
  out << text;
}

double seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

int runCheck(const std::string& path, int maxOrder, std::uint64_t seed, double tol,
             int maxIters, const std::string& jsonOut) {
  HermitianTensor h;
  try {
    h = readTensorFile(path);
  } catch (const TensorParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParseError;
  }
  const int m = h.shape().order();
  if (maxOrder != 0 && maxOrder < m) {
    std::cerr << "error: --max-order must be at least the tensor order m = " << m << "\n";
    return kExitParseError;
  }

  AlgorithmOptions opts;
  opts.maxOrder = maxOrder;
  opts.seed = seed;
  opts.acceptTolFactor = tol;
  if (maxIters > 0) opts.solver.maxIterations = maxIters;

  const auto start = std::chrono::steady_clock::now();
  const Verdict verdict = runAlgorithm(h, opts);
  const ResultReport report = reportFromVerdict(h, verdict, opts, seed, seconds(start));

  std::cout << report.verdict << "  order=" << verdict.order;
  if (verdict.kind == Verdict::Kind::Separable)
    std::cout << "  atoms=" << verdict.decomposition.terms.size()
              << "  residual=" << verdict.residual;
  std::cout << "\n";
  if (!verdict.message.empty()) std::cout << "  " << verdict.message << "\n";
  if (!jsonOut.empty()) writeFile(jsonOut, report.json);
  return report.exitCode;
}

PsdRoute parseRoute(const std::string& name) {
  if (name == "auto") return PsdRoute::Auto;
  if (name == "T") return PsdRoute::T;
  if (name == "cubic") return PsdRoute::Cubic;
  if (name == "T1") return PsdRoute::T1;
  if (name == "T2") return PsdRoute::T2;
  throw CLI::ValidationError("--route must be one of auto, T, cubic, T1, T2");
}

int runPsdDecompose(const std::string& path, int rank, int rankSweep,
                    const std::string& route, std::uint64_t seed,
                    const std::string& jsonOut) {
  HermitianTensor h;
  try {
    h = readTensorFile(path);
  } catch (const TensorParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParseError;
  }

  PsdDecomposeOptions opts;
  opts.route = parseRoute(route);
  opts.cpd.seed = seed;

  const auto start = std::chrono::steady_clock::now();
  const PsdResult result = rank > 0 ? psdDecompose(h, rank, opts)
                                    : psdDecomposeSweep(h, rankSweep, opts);
  const ResultReport report = reportFromPsdResult(h, result, seed, seconds(start));

  std::cout << report.verdict;
  if (const auto* cert = std::get_if<PsdCertification>(&result)) {
    std::cout << "  rank=" << cert->rank << "  residual=" << cert->residual
              << "  certificate=" << kindName(cert->certificate.kind);
    if (cert->rankIsExact) std::cout << "  psd_rank=" << cert->rank;
  } else {
    const PsdFailure& failure = std::get<PsdFailure>(result);
    std::cout << "  stage=" << failure.stage << "  " << failure.detail;
  }
  std::cout << "\n";
  if (!jsonOut.empty()) writeFile(jsonOut, report.json);
  return report.exitCode;
}

int runVerify(const std::string& tensorPath, const std::string& reportPath) {
  HermitianTensor h;
  std::string reportText;
  try {
    h = readTensorFile(tensorPath);
    std::ifstream in(reportPath, std::ios::binary);
    if (!in) throw TensorParseError("cannot open report file " + reportPath);
    std::stringstream buffer;
    buffer << in.rdbuf();
    reportText = buffer.str();
  } catch (const TensorParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParseError;
  }
  const std::string failure = verifyReport(h, reportText);
  if (failure.empty()) {
    std::cout << "report verified\n";
    return 0;
  }
  std::cout << failure << "\n";
  return 1;
}

int runExportSdp(const std::string& path, int order, std::uint64_t seed,
                 const std::string& outPath) {
  HermitianTensor h;
  try {
    h = readTensorFile(path);
  } catch (const TensorParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParseError;
  }
  if (order < h.shape().order()) {
    std::cerr << "error: -k must be at least the tensor order m = " << h.shape().order()
              << "\n";
    return kExitParseError;
  }
  const VariableLayout layout(h.shape());
  const RealPolynomial objective = genericObjective(mixSeed(seed, 0xF001ULL), layout);
  const SdpProblem prob = assembleSdp(h, order, objective);
  writeFile(outPath, exportSdpa(prob));
  std::cout << "wrote " << outPath << "  (vars=" << prob.tmsLength
            << " eq_rows=" << prob.A.rows() << " blocks=" << prob.blocks.size() << ")\n";
  return 0;
}

int runRandom(const std::string& shapeSpec, int terms, const std::string& kind,
              std::uint64_t seed, const std::string& outPath) {
  std::vector<int> dims;
  std::stringstream ss(shapeSpec);
  std::string item;
  while (std::getline(ss, item, ',')) dims.push_back(std::stoi(item));
  const Shape shape(dims);

  HermitianTensor h;
  TensorFileMetadata meta;
  meta.seed = seed;
  meta.provenance = "hermitsep random --kind " + kind;
  if (kind == "separable") {
    h = randomSeparable(shape, terms, seed);
  } else if (kind == "psd") {
    h = randomPsdKind(shape, terms, seed);
  } else if (kind == "entangled-candidate") {
    h = randomHermitian(shape, seed);
  } else {
    throw CLI::ValidationError("--kind must be separable, psd, or entangled-candidate");
  }
  writeTensorFile(outPath, h, meta);
  std::cout << "wrote " << outPath << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hermitian tensor separability and psd decompositions"};
  app.require_subcommand(1);
  app.set_version_flag("--version", hermitsep::kToolVersion);

  std::string path, jsonOut, route = "auto", shapeSpec, kind = "separable", outPath,
              reportPath;
  int maxOrder = 0, rank = 0, rankSweep = 0, terms = 1, order = 0, maxIters = 0;
  std::uint64_t seed = defaultSeed();
  double tol = 1e-5;

  CLI::App* check = app.add_subcommand("check", "decide separability (moment relaxations)");
  check->add_option("path", path, "tensor file")->required();
  check->add_option("--max-order", maxOrder, "largest relaxation order (default m+1)");
  check->add_option("--seed", seed, "random seed (default HERMITSEP_SEED or 12345)");
  check->add_option("--tol", tol, "acceptance tolerance factor (default 1e-5)");
  check->add_option("--max-iters", maxIters, "solver iteration cap");
  check->add_option("--json", jsonOut, "write the machine-readable report here");

  CLI::App* psd = app.add_subcommand("psd-decompose", "psd decomposition via flattened CPD");
  psd->add_option("path", path, "tensor file")->required();
  CLI::Option* rankOpt = psd->add_option("--rank", rank, "CPD rank s");
  psd->add_option("--rank-sweep", rankSweep, "sweep s = 1..MAX")->excludes(rankOpt);
  psd->add_option("--route", route, "auto | T | cubic | T1 | T2");
  psd->add_option("--seed", seed, "random seed");
  psd->add_option("--json", jsonOut, "write the machine-readable report here");

  CLI::App* verify = app.add_subcommand("verify", "re-check a report against its tensor");
  verify->add_option("tensor", path, "tensor file")->required();
  verify->add_option("report", reportPath, "report file")->required();

  CLI::App* exportSdp = app.add_subcommand("export-sdp", "write the order-k relaxation in SDPA format");
  exportSdp->add_option("path", path, "tensor file")->required();
  exportSdp->add_option("-k", order, "relaxation order")->required();
  exportSdp->add_option("-o", outPath, "output .dat-s path")->required();
  exportSdp->add_option("--seed", seed, "objective seed");

  CLI::App* random = app.add_subcommand("random", "generate a test instance");
  random->add_option("--shape", shapeSpec, "mode dimensions, e.g. 2,2")->required();
  random->add_option("--terms", terms, "number of terms (default 1)");
  random->add_option("--kind", kind, "separable | psd | entangled-candidate");
  random->add_option("--seed", seed, "random seed");
  random->add_option("-o", outPath, "output tensor file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitParseError;
  }

  try {
    if (check->parsed()) return runCheck(path, maxOrder, seed, tol, maxIters, jsonOut);
    if (psd->parsed()) {
      if (rank == 0 && rankSweep == 0) {
        std::cerr << "error: one of --rank or --rank-sweep is required\n";
        return kExitParseError;
      }
      return runPsdDecompose(path, rank, rankSweep, route, seed, jsonOut);
    }
    if (verify->parsed()) return runVerify(path, reportPath);
    if (exportSdp->parsed()) return runExportSdp(path, order, seed, outPath);
    if (random->parsed()) return runRandom(shapeSpec, terms, kind, seed, outPath);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitParseError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternalError;
  }
  return kExitInternalError;
}
