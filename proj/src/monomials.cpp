#include "hermitsep/monomials.hpp"

#include <stdexcept>

namespace hermitsep {

long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  long long r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
  }
  return r;
}

namespace {

void emitDegree(int remaining, int pos, std::vector<int>& cur,
                std::vector<std::vector<int>>& out) {
  const int nvars = static_cast<int>(cur.size());
  if (pos == nvars - 1) {
    cur[pos] = remaining;
    out.push_back(cur);
    return;
  }
  for (int a = remaining; a >= 0; --a) {
    cur[pos] = a;
    emitDegree(remaining - a, pos + 1, cur, out);
  }
  cur[pos] = 0;
}

}  // namespace

MonomialBasis::MonomialBasis(int nvars, int maxDegree)
    : nvars_(nvars), maxDegree_(maxDegree) {
  if (nvars < 1) throw std::invalid_argument("MonomialBasis: nvars must be >= 1");
  if (maxDegree < 0) throw std::invalid_argument("MonomialBasis: maxDegree must be >= 0");
  exponents_.reserve(static_cast<std::size_t>(binomial(nvars + maxDegree, maxDegree)));
  std::vector<int> cur(nvars, 0);
  for (int d = 0; d <= maxDegree; ++d) emitDegree(d, 0, cur, exponents_);
  degrees_.resize(exponents_.size());
  index_.reserve(exponents_.size() * 2);
  for (long i = 0; i < size(); ++i) {
    int deg = 0;
    for (int e : exponents_[i]) deg += e;
    degrees_[i] = deg;
    index_.emplace(exponents_[i], i);
  }
}

long MonomialBasis::sizeUpToDegree(int d) const {
  if (d < 0) return 0;
  if (d > maxDegree_) throw std::out_of_range("MonomialBasis: degree beyond bound");
  return static_cast<long>(binomial(nvars_ + d, d));
}

long MonomialBasis::indexOf(const std::vector<int>& exponents) const {
  auto it = index_.find(exponents);
  if (it == index_.end())
    throw std::out_of_range("MonomialBasis: monomial outside the degree bound");
  return it->second;
}

long MonomialBasis::indexOfSum(long a, long b) const {
  const std::vector<int>& ea = exponents_[a];
  const std::vector<int>& eb = exponents_[b];
  std::vector<int> sum(nvars_);
  for (int i = 0; i < nvars_; ++i) sum[i] = ea[i] + eb[i];
  return indexOf(sum);
}

}  // namespace hermitsep
