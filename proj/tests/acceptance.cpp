// Acceptance suite: one entry per criterion, each printing a PASS/FAIL line.
// Run a single criterion with `acceptance --criterion N`, or everything with
// `acceptance --all`.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <vector>

#include "hermitsep/extraction.hpp"
#include "hermitsep/psd_decomp.hpp"
#include "hermitsep/rng.hpp"
#include "hermitsep/tensor_io.hpp"
#include "paper_fixtures.hpp"

using namespace hermitsep;

namespace {

struct Criterion {
  int number;
  const char* name;
  std::function<bool(std::string&)> run;
};

double seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

RealVector randomPointOnK(Rng& rng, const VariableLayout& layout) {
  RealVector x(layout.nvars);
  for (int j = 0; j < layout.modeCount(); ++j) {
    const int off = layout.blockOffset(j);
    const int len = layout.blockSize(j);
    RealVector block(len);
    for (int q = 0; q < len; ++q) block[q] = rng.gaussian();
    block /= block.norm();
    if (block[0] < 0) block[0] = -block[0];
    x.segment(off, len) = block;
  }
  return x;
}

Matrix randomHermitianMatrix(Rng& rng, int n) {
  Matrix x(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) x(r, c) = rng.gaussianComplex();
  return 0.5 * (x + x.adjoint().eval());
}

Vector vecRowMajor(const Matrix& m) {
  Vector v(m.rows() * m.cols());
  for (long i = 0; i < m.rows(); ++i)
    for (long j = 0; j < m.cols(); ++j) v[i * m.cols() + j] = m(i, j);
  return v;
}

// ---- 1. Hankel non-separability at k = 2 with a verified certificate ----
bool hankelNotSeparable(std::string& detail) {
  AlgorithmOptions opts;
  opts.maxOrder = 2;
  opts.seed = 1;
  const HermitianTensor h = fixtures::hankelC22();
  const Verdict v = runAlgorithm(h, opts);
  if (v.kind != Verdict::Kind::NotSeparable || v.order != 2 || !v.certificate) {
    detail = "verdict " + v.message;
    return false;
  }
  const VariableLayout layout(h.shape());
  const SdpProblem prob =
      assembleSdp(h, 2, genericObjective(mixSeed(opts.seed, 0xF001ULL), layout));
  if (!verifyCertificate(prob, *v.certificate)) {
    detail = "certificate failed re-verification";
    return false;
  }
  detail = "NOT_SEPARABLE at k=2, Farkas certificate verified";
  return true;
}

// ---- 2. lambda = 42 decomposition on C^{[3,3]} ----
bool lambda42Decomposition(std::string& detail) {
  AlgorithmOptions opts;
  opts.maxOrder = 2;
  opts.seed = 1;
  const HermitianTensor h = fixtures::lambda42C33();
  const Verdict v = runAlgorithm(h, opts);
  if (v.kind != Verdict::Kind::Separable) {
    detail = "not separable: " + v.message;
    return false;
  }
  if (v.decomposition.terms.size() != 2) {
    detail = "atom count " + std::to_string(v.decomposition.terms.size());
    return false;
  }
  if (!(v.residual <= 1e-6)) {
    detail = "residual " + std::to_string(v.residual);
    return false;
  }
  const Vector a = fixtures::lambda42VectorA();
  const Vector b = fixtures::lambda42VectorB();
  auto matchesTerm = [&](const DecompositionTerm& term, const Vector& u1, const Vector& u2) {
    return std::abs(term.weight - 42.0) <= 0.05 &&
           (term.vectors[0] - u1).cwiseAbs().maxCoeff() <= 1e-3 &&
           (term.vectors[1] - u2).cwiseAbs().maxCoeff() <= 1e-3;
  };
  const auto& t0 = v.decomposition.terms[0];
  const auto& t1 = v.decomposition.terms[1];
  const bool matched = (matchesTerm(t0, a, b) && matchesTerm(t1, b, a)) ||
                       (matchesTerm(t0, b, a) && matchesTerm(t1, a, b));
  if (!matched) {
    detail = "atoms do not match the reference vectors";
    return false;
  }
  char buf[128];
  std::snprintf(buf, sizeof(buf), "r=2, weights %.4f / %.4f, residual %.2e",
                t0.weight, t1.weight, v.residual);
  detail = buf;
  return true;
}

// ---- 3. psi1/psi2 entangled state ----
bool psiStateNotSeparable(std::string& detail) {
  AlgorithmOptions opts;
  opts.maxOrder = 2;
  opts.seed = 1;
  const HermitianTensor h = fixtures::psiStateC22();
  const Verdict v = runAlgorithm(h, opts);
  if (v.kind != Verdict::Kind::NotSeparable || !v.certificate) {
    detail = "verdict " + v.message;
    return false;
  }
  const VariableLayout layout(h.shape());
  const SdpProblem prob =
      assembleSdp(h, v.order, genericObjective(mixSeed(opts.seed, 0xF001ULL), layout));
  if (!verifyCertificate(prob, *v.certificate)) {
    detail = "certificate failed re-verification";
    return false;
  }
  detail = "NOT_SEPARABLE at k=2, certificate verified";
  return true;
}

// ---- 4. Comparison example 1 (C^{[2,2]}, separable by k <= 3) ----
bool comparison1Separable(std::string& detail) {
  AlgorithmOptions opts;
  opts.maxOrder = 3;
  opts.seed = 1;
  opts.acceptTolFactor = 1e-3;
  const Verdict v = runAlgorithm(fixtures::comparison1C22(), opts);
  if (v.kind != Verdict::Kind::Separable) {
    detail = "not separable: " + v.message;
    return false;
  }
  if (v.decomposition.terms.size() > 10 || !(v.residual <= 1e-3)) {
    detail = "atoms " + std::to_string(v.decomposition.terms.size()) + ", residual " +
             std::to_string(v.residual);
    return false;
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "SEPARABLE at k=%d with r=%zu, residual %.2e", v.order,
                v.decomposition.terms.size(), v.residual);
  detail = buf;
  return true;
}

// ---- 5. Comparison example 2 (C^{[3,3]}, separable at k = 2) ----
bool comparison2Separable(std::string& detail) {
  AlgorithmOptions opts;
  opts.maxOrder = 2;
  opts.seed = 1;
  opts.acceptTolFactor = 1e-3;
  opts.solver.maxIterations = 1500000;
  const Verdict v = runAlgorithm(fixtures::comparison2C33(), opts);
  if (v.kind != Verdict::Kind::Separable) {
    detail = "not separable: " + v.message;
    return false;
  }
  if (!(v.residual <= 1e-3)) {
    detail = "residual " + std::to_string(v.residual);
    return false;
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "SEPARABLE at k=2 with r=%zu, residual %.2e",
                v.decomposition.terms.size(), v.residual);
  detail = buf;
  return true;
}

// ---- 6. C^{[8,8,8]} psd route at s = 3 ----
bool cube888PsdRoute(std::string& detail) {
  PsdDecomposeOptions opts;
  opts.route = PsdRoute::T;
  opts.cpd.seed = 1;
  const HermitianTensor h = fixtures::cube888();
  const PsdResult result = psdDecompose(h, 3, opts);
  if (const auto* failure = std::get_if<PsdFailure>(&result)) {
    detail = "stage " + failure->stage + ": " + failure->detail;
    return false;
  }
  const PsdCertification& cert = std::get<PsdCertification>(result);
  if (!cert.certificate.certified() || !cert.rankIsExact || cert.rank != 3) {
    detail = std::string("certificate ") + kindName(cert.certificate.kind);
    return false;
  }
  if (!(cert.residual <= 1e-6)) {
    detail = "residual " + std::to_string(cert.residual);
    return false;
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "CERTIFIED_PSD (%s), psd rank 3, residual %.2e",
                kindName(cert.certificate.kind), cert.residual);
  detail = buf;
  return true;
}

// ---- 7. C^{[4,3]} T1 route at s = 2 ----
bool m2RouteRecoversTerms(std::string& detail) {
  PsdDecomposeOptions opts;
  opts.route = PsdRoute::T1;
  opts.cpd.seed = 1;
  const HermitianTensor h = fixtures::m2ExampleC43();
  const PsdResult result = psdDecompose(h, 2, opts);
  if (const auto* failure = std::get_if<PsdFailure>(&result)) {
    detail = "stage " + failure->stage + ": " + failure->detail;
    return false;
  }
  const PsdCertification& cert = std::get<PsdCertification>(result);
  if (!cert.certificate.certified() || !(cert.residual <= 1e-6)) {
    detail = "uncertified or residual " + std::to_string(cert.residual);
    return false;
  }
  // match the two displayed terms as Kronecker products, up to permutation
  const Vector a1 = fixtures::m2ExampleVectorA1();
  const Vector a2 = fixtures::m2ExampleVectorA2();
  std::vector<Matrix> reference = {
      kronecker(a1 * a1.adjoint(), fixtures::m2ExampleMatrixB1()),
      kronecker(a2 * a2.adjoint(), fixtures::m2ExampleMatrixB2())};
  std::vector<Matrix> got;
  for (const PsdTerm& term : cert.decomposition.terms)
    got.push_back(kronecker(term.factors[0], term.factors[1]));
  auto termDistance = [](const Matrix& x, const Matrix& y) {
    return (x - y).norm() / std::max(1.0, y.norm());
  };
  const bool matched =
      (termDistance(got[0], reference[0]) <= 1e-6 && termDistance(got[1], reference[1]) <= 1e-6) ||
      (termDistance(got[0], reference[1]) <= 1e-6 && termDistance(got[1], reference[0]) <= 1e-6);
  if (!matched) {
    detail = "terms do not match the reference decomposition";
    return false;
  }
  detail = "separability certified; both displayed terms recovered";
  return true;
}

// ---- 8. Property suite: moment machinery ----
bool momentMachineryProperties(std::string& detail) {
  Rng rng(808);
  const std::vector<Shape> shapes = {Shape({2, 2}), Shape({3, 2}), Shape({3, 3})};
  for (int rep = 0; rep < 200; ++rep) {
    const Shape& shape = shapes[rep % shapes.size()];
    const VariableLayout layout(shape);
    const int t = 2;
    const MonomialBasis basis(layout.nvars, 2 * t);
    const int r = 1 + static_cast<int>(rng.nextU64() % 4);
    std::vector<std::pair<double, RealVector>> truth;
    Tms w;
    w.nvars = layout.nvars;
    w.degreeBound = 2 * t;
    w.values = RealVector::Zero(basis.size());
    for (int i = 0; i < r; ++i) {
      truth.push_back({rng.uniform(0.3, 1.5), randomPointOnK(rng, layout)});
      w.values += truth.back().first * tmsOfPoint(truth.back().second, 2 * t, basis).values;
    }

    // pairing oracle: <p f1 f2, y> against the localizing matrix, for the
    // constraint polynomials and the constant
    const KConstraints cons = constraintsK(layout);
    std::vector<RealPolynomial> ps = {RealPolynomial::constant(layout.nvars, 1.0)};
    ps.insert(ps.end(), cons.sphere.begin(), cons.sphere.end());
    ps.insert(ps.end(), cons.gauge.begin(), cons.gauge.end());
    for (const RealPolynomial& p : ps) {
      const int fd = t - (p.degree() + 1) / 2;
      const RealMatrix loc = localizingMatrix(p, w, t, basis);
      const long side = basis.sizeUpToDegree(fd);
      RealPolynomial f1(layout.nvars), f2(layout.nvars);
      for (long i = 0; i < side; ++i) {
        f1.addTerm(basis.exponents(i), rng.gaussian());
        f2.addTerm(basis.exponents(i), rng.gaussian());
      }
      const RealPolynomial prod = p * f1 * f2;
      double lhs = 0.0;
      for (const auto& [e, c] : prod.terms()) lhs += c * w.values[basis.indexOf(e)];
      RealVector v1 = RealVector::Zero(side), v2 = RealVector::Zero(side);
      for (const auto& [e, c] : f1.terms()) v1[basis.indexOf(e)] = c;
      for (const auto& [e, c] : f2.terms()) v2[basis.indexOf(e)] = c;
      const double rhs = v1.dot(loc * v2);
      if (std::abs(lhs - rhs) > 1e-10 * std::max(1.0, std::abs(lhs))) {
        detail = "pairing mismatch at rep " + std::to_string(rep);
        return false;
      }
    }

    // flat extraction recovers the atoms under optimal matching
    ExtractionOptions exOpts;
    exOpts.xiSeed = 4000 + rep;
    const auto measure = extractAtoms(w, t, exOpts, basis, layout);
    if (!measure || measure->atoms.size() != truth.size()) {
      detail = "extraction failed at rep " + std::to_string(rep);
      return false;
    }
    std::vector<int> perm(truth.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
    double best = std::numeric_limits<double>::infinity();
    do {
      double worst = 0.0;
      for (std::size_t i = 0; i < perm.size(); ++i) {
        worst = std::max(worst,
                         (truth[i].second - measure->atoms[perm[i]].point).cwiseAbs().maxCoeff());
        worst = std::max(worst, std::abs(truth[i].first - measure->atoms[perm[i]].weight));
      }
      best = std::min(best, worst);
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (best > 1e-6) {
      detail = "atom recovery error " + std::to_string(best) + " at rep " + std::to_string(rep);
      return false;
    }
  }
  detail = "200 atomic measures: pairing oracle and extraction round trip";
  return true;
}

// ---- 9. Property suite: separable round trip, zero false negatives ----
bool separableRoundTrip(std::string& detail) {
  int count = 0;
  int falseNegatives = 0;
  auto runShape = [&](const Shape& shape, int instances, std::uint64_t seedBase,
                      std::string& why) {
    for (int i = 0; i < instances; ++i) {
      Rng pick(mixSeed(seedBase, i));
      const int r = 1 + static_cast<int>(pick.nextU64() % 3);
      const HermitianTensor h = randomSeparable(shape, r, seedBase + i);
      AlgorithmOptions opts;
      opts.maxOrder = shape.order() == 2 ? 3 : 3;
      opts.seed = 9;
      const Verdict v = runAlgorithm(h, opts);
      ++count;
      if (v.kind == Verdict::Kind::NotSeparable) {
        ++falseNegatives;
        why = "false NOT_SEPARABLE";
        return false;
      }
      if (v.kind != Verdict::Kind::Separable || !(v.residual <= 1e-5)) {
        why = "instance " + std::to_string(i) + " on shape order " +
              std::to_string(shape.order()) + ": " + v.message;
        return false;
      }
    }
    return true;
  };
  std::string why;
  if (!runShape(Shape({2, 2}), 45, 11000, why) || !runShape(Shape({2, 3}), 45, 12000, why) ||
      !runShape(Shape({2, 2, 2}), 10, 13000, why)) {
    detail = why + " (after " + std::to_string(count) + " instances)";
    return false;
  }
  detail = "100 separable instances recovered, zero false NOT_SEPARABLE";
  return falseNegatives == 0;
}

// ---- 10. Property suite: psd-route genericity ----
bool psdGenericity(std::string& detail) {
  struct Config {
    Shape shape;
    int maxRank;
  };
  const std::vector<Config> configs = {{Shape({2, 2, 2}), 4}, {Shape({3, 3, 2}), 9}};
  for (const Config& config : configs) {
    for (int s = 1; s <= config.maxRank; ++s) {
      int success = 0;
      const int draws = 50;
      for (int d = 0; d < draws; ++d) {
        const HermitianTensor h =
            randomPsdKind(config.shape, s, 50000 + 1000 * config.shape.dims[0] + 50 * s + d);
        PsdDecomposeOptions opts;
        opts.route = PsdRoute::T;
        opts.cpd.seed = 60000 + d;
        const PsdResult result = psdDecompose(h, s, opts);
        if (const auto* cert = std::get_if<PsdCertification>(&result)) {
          if (cert->certificate.kind == UniquenessCertificate::Kind::Kruskal &&
              cert->residual <= 1e-6)
            ++success;
        }
      }
      if (success * 100 < draws * 95) {
        detail = "shape (" + std::to_string(config.shape.dims[0]) + ",...), s=" +
                 std::to_string(s) + ": " + std::to_string(success) + "/50 certified";
        return false;
      }
    }
  }
  detail = "all (shape, s) configurations certified with Kruskal in >= 95% of draws";
  return true;
}

// ---- 11. Kruskal / compound kernels ----
bool kernelChecks(std::string& detail) {
  Rng rng(1111);
  // kruskal rank of vectorized generic Hermitian matrices = min(s, n^2)
  for (int n = 2; n <= 3; ++n)
    for (int s = 1; s <= n * n; ++s)
      for (int draw = 0; draw < 50; ++draw) {
        std::vector<Vector> vecs;
        for (int i = 0; i < s; ++i) vecs.push_back(vecRowMajor(randomHermitianMatrix(rng, n)));
        if (kruskalRank(vecs) != std::min(s, n * n)) {
          detail = "kruskal rank mismatch at n=" + std::to_string(n) + " s=" + std::to_string(s);
          return false;
        }
      }

  // compound matrix entries match the direct 2x2-minor oracle exactly
  for (int rep = 0; rep < 20; ++rep) {
    const int p = 3 + static_cast<int>(rng.nextU64() % 3);
    const int q = 2 + static_cast<int>(rng.nextU64() % 3);
    Matrix x(p, q);
    for (int r = 0; r < p; ++r)
      for (int c = 0; c < q; ++c) x(r, c) = rng.gaussianComplex();
    const Matrix cm = compoundMatrix(x);
    int row = 0;
    for (int i = 0; i < p; ++i)
      for (int j = i + 1; j < p; ++j) {
        int col = 0;
        for (int k = 0; k < q; ++k)
          for (int l = k + 1; l < q; ++l) {
            if (cm(row, col) != x(i, k) * x(j, l) - x(i, l) * x(j, k)) {
              detail = "compound minor mismatch";
              return false;
            }
            ++col;
          }
        ++row;
      }
  }

  // Khatri-Rao Gram identity to 1e-12
  for (int rep = 0; rep < 10; ++rep) {
    Matrix u(4, 3), v(5, 3);
    for (int c = 0; c < 3; ++c)
      for (int r = 0; r < 4; ++r) u(r, c) = rng.gaussianComplex();
    for (int c = 0; c < 3; ++c)
      for (int r = 0; r < 5; ++r) v(r, c) = rng.gaussianComplex();
    const Matrix kr = khatriRao(u, v);
    const Matrix lhs = kr.transpose() * kr;
    const Matrix rhs = (u.transpose() * u).cwiseProduct(v.transpose() * v);
    if ((lhs - rhs).norm() > 1e-12 * std::max(1.0, rhs.norm())) {
      detail = "Khatri-Rao Gram identity violated";
      return false;
    }
  }
  detail = "kruskal ranks, compound minors, and the Gram identity all check out";
  return true;
}

const std::vector<Criterion> kCriteria = {
    {1, "Hankel C^{[2,2]} non-separability at k=2", hankelNotSeparable},
    {2, "lambda=42 decomposition on C^{[3,3]}", lambda42Decomposition},
    {3, "psi1/psi2 entangled state non-separability", psiStateNotSeparable},
    {4, "Comparison example 1 separable by k<=3", comparison1Separable},
    {5, "Comparison example 2 separable at k=2", comparison2Separable},
    {6, "C^{[8,8,8]} psd route at s=3", cube888PsdRoute},
    {7, "C^{[4,3]} T1 route at s=2", m2RouteRecoversTerms},
    {8, "property: moment machinery vs pairing oracle", momentMachineryProperties},
    {9, "property: separable round trip", separableRoundTrip},
    {10, "property: psd-route genericity", psdGenericity},
    {11, "kernels: kruskal / compound / Khatri-Rao", kernelChecks},
};

int runCriterion(const Criterion& crit) {
  const auto start = std::chrono::steady_clock::now();
  std::string detail;
  bool ok = false;
  try {
    ok = crit.run(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  std::printf("[%s] criterion %2d: %s (%.1fs)%s%s\n", ok ? "PASS" : "FAIL", crit.number,
              crit.name, seconds(start), detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  int which = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) which = std::atoi(argv[++i]);
    if (std::strcmp(argv[i], "--all") == 0) which = 0;
  }
  int failures = 0;
  for (const Criterion& crit : kCriteria)
    if (which == 0 || crit.number == which) failures += runCriterion(crit);
  return failures == 0 ? 0 : 1;
}
