#include "hermitsep/moment.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <unordered_map>

namespace hermitsep {

Tms Tms::truncated(int newBound) const {
  if (newBound > degreeBound) throw std::out_of_range("Tms: truncation beyond degree bound");
  Tms out;
  out.nvars = nvars;
  out.degreeBound = newBound;
  out.values = values.head(binomial(nvars + newBound, newBound));
  return out;
}

Tms tmsOfPoint(const RealVector& x, int degreeBound) {
  const MonomialBasis basis(static_cast<int>(x.size()), degreeBound);
  return tmsOfPoint(x, degreeBound, basis);
}

Tms tmsOfPoint(const RealVector& x, int degreeBound, const MonomialBasis& basis) {
  if (basis.nvars() != x.size() || basis.maxDegree() < degreeBound)
    throw std::invalid_argument("tmsOfPoint: basis mismatch");
  Tms y;
  y.nvars = basis.nvars();
  y.degreeBound = degreeBound;
  const long len = basis.sizeUpToDegree(degreeBound);
  y.values.resize(len);
  for (long i = 0; i < len; ++i) {
    const std::vector<int>& e = basis.exponents(i);
    double v = 1.0;
    for (int q = 0; q < y.nvars; ++q)
      for (int rep = 0; rep < e[q]; ++rep) v *= x[q];
    y.values[i] = v;
  }
  return y;
}

RealMatrix momentMatrix(const Tms& y, int d, const MonomialBasis& basis) {
  if (2 * d > y.degreeBound) throw std::out_of_range("momentMatrix: degree overflow");
  const long side = basis.sizeUpToDegree(d);
  RealMatrix m(side, side);
  for (long a = 0; a < side; ++a)
    for (long b = a; b < side; ++b) {
      const double v = y.values[basis.indexOfSum(a, b)];
      m(a, b) = v;
      m(b, a) = v;
    }
  return m;
}

RealMatrix localizingMatrix(const RealPolynomial& p, const Tms& y, int d,
                            const MonomialBasis& basis) {
  const int dp = (p.degree() + 1) / 2;
  if (p.degree() > 2 * d || 2 * d > y.degreeBound)
    throw std::out_of_range("localizingMatrix: degree overflow");
  const long side = basis.sizeUpToDegree(d - dp);
  RealMatrix m = RealMatrix::Zero(side, side);
  std::vector<int> sum(basis.nvars());
  for (long a = 0; a < side; ++a) {
    const std::vector<int>& ea = basis.exponents(a);
    for (long b = a; b < side; ++b) {
      const std::vector<int>& eb = basis.exponents(b);
      double v = 0.0;
      for (const auto& [et, ct] : p.terms()) {
        for (int i = 0; i < basis.nvars(); ++i) sum[i] = ea[i] + eb[i] + et[i];
        v += ct * y.values[basis.indexOf(sum)];
      }
      m(a, b) = v;
      m(b, a) = v;
    }
  }
  return m;
}

RealMatrix PsdBlockMap::evaluate(const RealVector& w) const {
  RealMatrix m = RealMatrix::Zero(side, side);
  for (const Entry& e : entries) {
    m(e.row, e.col) += e.coeff * w[e.monomial];
    if (e.row != e.col) m(e.col, e.row) += e.coeff * w[e.monomial];
  }
  return m;
}

namespace {

struct SparseRow {
  std::vector<std::pair<long, double>> entries;  // sorted by index
  double rhs = 0.0;
};

SparseRow rowFromPolynomial(const RealPolynomial& p, const MonomialBasis& basis, double rhs) {
  SparseRow row;
  row.rhs = rhs;
  row.entries.reserve(p.terms().size());
  for (const auto& [e, c] : p.terms()) row.entries.emplace_back(basis.indexOf(e), c);
  std::sort(row.entries.begin(), row.entries.end());
  return row;
}

struct RowKeyHash {
  std::size_t operator()(const std::vector<std::pair<long, double>>& v) const {
    std::size_t h = 1469598103934665603ULL;
    for (const auto& [i, c] : v) {
      h ^= static_cast<std::size_t>(i) * 0x9e3779b97f4a7c15ULL;
      h *= 1099511628211ULL;
      std::uint64_t bits;
      static_assert(sizeof(bits) == sizeof(c));
      std::memcpy(&bits, &c, sizeof(bits));
      h ^= bits;
      h *= 1099511628211ULL;
    }
    return h;
  }
};

// Greedy pivoted Cholesky of the row Gram matrix; keeps rows whose residual
// pivot exceeds the threshold.  Rows in [0, forcedCount) are selected first
// unconditionally (the tensor-matching rows, which are independent).
std::vector<long> selectIndependentRows(const std::vector<SparseRow>& rows, long forcedCount,
                                        double threshold) {
  const long r = static_cast<long>(rows.size());
  RealMatrix gram(r, r);
  for (long i = 0; i < r; ++i)
    for (long j = i; j < r; ++j) {
      double dot = 0.0;
      auto ai = rows[i].entries.begin();
      auto bj = rows[j].entries.begin();
      while (ai != rows[i].entries.end() && bj != rows[j].entries.end()) {
        if (ai->first < bj->first)
          ++ai;
        else if (bj->first < ai->first)
          ++bj;
        else {
          dot += ai->second * bj->second;
          ++ai;
          ++bj;
        }
      }
      gram(i, j) = dot;
      gram(j, i) = dot;
    }

  RealVector diag = gram.diagonal();
  RealMatrix factors(r, 0);
  std::vector<long> selected;
  std::vector<bool> used(r, false);
  const double thresholdSq = threshold * threshold;

  auto pivotStep = [&](long i) {
    used[i] = true;
    selected.push_back(i);
    RealVector col = gram.col(i);
    if (factors.cols() > 0) col -= factors * factors.row(i).transpose();
    const double piv = col[i];
    if (piv < 1e-30) return;  // numerically dependent forced row; keep without a factor column
    const double scale = std::sqrt(piv);
    factors.conservativeResize(Eigen::NoChange, factors.cols() + 1);
    factors.col(factors.cols() - 1) = col / scale;
    for (long t = 0; t < r; ++t) diag[t] -= (col[t] / scale) * (col[t] / scale);
  };

  for (long i = 0; i < forcedCount; ++i) pivotStep(i);
  while (true) {
    long best = -1;
    double bestVal = thresholdSq;
    for (long i = forcedCount; i < r; ++i)
      if (!used[i] && diag[i] > bestVal) {
        bestVal = diag[i];
        best = i;
      }
    if (best < 0) break;
    pivotStep(best);
  }
  std::sort(selected.begin(), selected.end());
  return selected;
}

constexpr long kRankFilterRowLimit = 1500;

}  // namespace

SdpProblem assembleSdp(const HermitianTensor& h, int k, const RealPolynomial& objective) {
  const Shape& shape = h.shape();
  const int m = shape.order();
  if (k < m) throw std::invalid_argument("assembleSdp: relaxation order k must be >= m");
  const VariableLayout layout(shape);
  if (objective.nvars() != layout.nvars)
    throw std::invalid_argument("assembleSdp: objective arity mismatch");
  if (objective.degree() > 2 * k)
    throw std::invalid_argument("assembleSdp: objective degree exceeds 2k");

  const MonomialBasis basis(layout.nvars, 2 * k);
  const long tmsLength = basis.size();
  const long flatSide = shape.flatSize();

  SdpProblem prob;
  prob.shape = shape;
  prob.order = k;
  prob.nvars = layout.nvars;
  prob.tmsLength = tmsLength;
  prob.hScale = std::max(1.0, h.frobeniusNorm());

  prob.c = RealVector::Zero(tmsLength);
  for (const auto& [e, coeff] : objective.terms()) prob.c[basis.indexOf(e)] = coeff;

  // Tensor-matching rows: <R_IJ, w> = Re H_IJ for I <= J, <T_IJ, w> = Im H_IJ
  // for I < J, enumerated in linear-index order.
  std::vector<SparseRow> rows;
  std::vector<SparseRow> imagRows;
  for (long li = 0; li < flatSide; ++li) {
    const std::vector<int> I = shape.multiIndex(li);
    for (long lj = li; lj < flatSide; ++lj) {
      const std::vector<int> J = shape.multiIndex(lj);
      auto [re, im] = buildPij(I, J, layout);
      rows.push_back(rowFromPolynomial(re, basis, h.flattening()(li, lj).real()));
      if (lj > li)
        imagRows.push_back(rowFromPolynomial(im, basis, h.flattening()(li, lj).imag()));
    }
  }
  rows.insert(rows.end(), imagRows.begin(), imagRows.end());
  const long tensorRows = static_cast<long>(rows.size());

  // Localizing equalities of h, entry-wise over the upper triangle of
  // L_{h_j}^{(k)}(w); duplicate rows (cells sharing a monomial sum) collapse.
  const long hSide = basis.sizeUpToDegree(k - 1);
  std::unordered_map<std::vector<std::pair<long, double>>, long, RowKeyHash> seen;
  std::vector<int> gamma(layout.nvars);
  for (int j = 0; j < m; ++j) {
    for (long a = 0; a < hSide; ++a) {
      const std::vector<int>& ea = basis.exponents(a);
      for (long b = a; b < hSide; ++b) {
        const std::vector<int>& eb = basis.exponents(b);
        for (int i = 0; i < layout.nvars; ++i) gamma[i] = ea[i] + eb[i];
        SparseRow row;
        row.rhs = 0.0;
        for (int q = 0; q < layout.blockSize(j); ++q) {
          std::vector<int> e = gamma;
          e[layout.blockOffset(j) + q] += 2;
          row.entries.emplace_back(basis.indexOf(e), 1.0);
        }
        row.entries.emplace_back(basis.indexOf(gamma), -1.0);
        std::sort(row.entries.begin(), row.entries.end());
        if (seen.emplace(row.entries, static_cast<long>(rows.size())).second)
          rows.push_back(std::move(row));
      }
    }
  }

  // Remove linearly dependent localizing rows when the system is small enough
  // for a pivoted Gram factorization; larger systems keep the (consistent)
  // redundancy, which the first-order solver tolerates.
  std::vector<long> keep;
  if (static_cast<long>(rows.size()) <= kRankFilterRowLimit) {
    double normA = 0.0;
    for (const SparseRow& row : rows)
      for (const auto& [idx, c] : row.entries) normA += c * c;
    normA = std::sqrt(normA);
    keep = selectIndependentRows(rows, tensorRows, 1e-10 * normA);
  } else {
    keep.resize(rows.size());
    for (long i = 0; i < static_cast<long>(rows.size()); ++i) keep[i] = i;
  }

  prob.tensorRowCount = tensorRows;
  prob.b.resize(static_cast<long>(keep.size()));
  std::vector<Eigen::Triplet<double>> triplets;
  for (long outRow = 0; outRow < static_cast<long>(keep.size()); ++outRow) {
    const SparseRow& row = rows[keep[outRow]];
    prob.b[outRow] = row.rhs;
    for (const auto& [idx, coeff] : row.entries)
      triplets.emplace_back(static_cast<int>(outRow), static_cast<int>(idx), coeff);
  }
  prob.A.resize(static_cast<long>(keep.size()), tmsLength);
  prob.A.setFromTriplets(triplets.begin(), triplets.end());

  // Psd blocks: M_k(w) and one L_{g_j}^{(k)}(w) per mode.
  PsdBlockMap moment;
  moment.name = "M_k";
  moment.side = static_cast<int>(basis.sizeUpToDegree(k));
  for (int a = 0; a < moment.side; ++a)
    for (int b = a; b < moment.side; ++b)
      moment.entries.push_back({a, b, basis.indexOfSum(a, b), 1.0});
  prob.blocks.push_back(std::move(moment));

  for (int j = 0; j < m; ++j) {
    PsdBlockMap loc;
    loc.name = "L_g" + std::to_string(j + 1);
    loc.side = static_cast<int>(basis.sizeUpToDegree(k - 1));
    std::vector<int> e(layout.nvars);
    for (int a = 0; a < loc.side; ++a) {
      const std::vector<int>& ea = basis.exponents(a);
      for (int b = a; b < loc.side; ++b) {
        const std::vector<int>& eb = basis.exponents(b);
        for (int i = 0; i < layout.nvars; ++i) e[i] = ea[i] + eb[i];
        e[layout.blockOffset(j)] += 1;
        loc.entries.push_back({a, b, basis.indexOf(e), 1.0});
      }
    }
    prob.blocks.push_back(std::move(loc));
  }

  return prob;
}

}  // namespace hermitsep
