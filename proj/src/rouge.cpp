#include "authorsum/rouge.hpp"

#include <algorithm>
#include <stdexcept>

#include "authorsum/rng.hpp"

namespace authorsum::metrics {

RougeScore RougeScore::from_pr(double p, double r) {
  RougeScore s;
  s.precision = p;
  s.recall = r;
  s.f1 = (p + r > 0.0) ? 2.0 * p * r / (p + r) : 0.0;
  return s;
}

std::size_t NGramHash::operator()(const std::vector<int>& g) const {
  return static_cast<std::size_t>(
      fnv1a64(g.data(), g.size() * sizeof(int)));
}

NGramCounts ngram_counts(const std::vector<int>& tokens, int n) {
  if (n < 1) throw std::invalid_argument("ngram_counts: n must be >= 1");
  NGramCounts counts;
  if (tokens.size() < static_cast<std::size_t>(n)) return counts;
  const std::size_t total = tokens.size() - static_cast<std::size_t>(n) + 1;
  counts.reserve(total);
  for (std::size_t i = 0; i < total; ++i) {
    std::vector<int> g(tokens.begin() + static_cast<long>(i),
                       tokens.begin() + static_cast<long>(i) + n);
    ++counts[std::move(g)];
  }
  return counts;
}

RougeScore rouge_n(int n, const std::vector<int>& hyp,
                   const std::vector<int>& ref) {
  const NGramCounts hyp_counts = ngram_counts(hyp, n);
  const NGramCounts ref_counts = ngram_counts(ref, n);
  long hyp_total = 0;
  long ref_total = 0;
  for (const auto& [g, c] : hyp_counts) hyp_total += c;
  for (const auto& [g, c] : ref_counts) ref_total += c;

  long overlap = 0;
  for (const auto& [g, c] : ref_counts) {
    auto it = hyp_counts.find(g);
    if (it != hyp_counts.end()) overlap += std::min(c, it->second);
  }
  const double p = hyp_total > 0 ? static_cast<double>(overlap) / hyp_total : 0.0;
  const double r = ref_total > 0 ? static_cast<double>(overlap) / ref_total : 0.0;
  return RougeScore::from_pr(p, r);
}

std::size_t lcs_length(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.empty() || b.empty()) return 0;
  // one-row DP
  std::vector<std::size_t> row(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = 0;  // row[j-1] from the previous i
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t tmp = row[j];
      if (a[i - 1] == b[j - 1]) {
        row[j] = diag + 1;
      } else {
        row[j] = std::max(row[j], row[j - 1]);
      }
      diag = tmp;
    }
  }
  return row[b.size()];
}

RougeScore rouge_l(const std::vector<int>& hyp, const std::vector<int>& ref) {
  const double l = static_cast<double>(lcs_length(hyp, ref));
  const double p = hyp.empty() ? 0.0 : l / static_cast<double>(hyp.size());
  const double r = ref.empty() ? 0.0 : l / static_cast<double>(ref.size());
  return RougeScore::from_pr(p, r);
}

RougeScore macro_average(const std::vector<RougeScore>& scores) {
  if (scores.empty()) throw std::invalid_argument("no documents");
  RougeScore out;
  for (const auto& s : scores) {
    out.precision += s.precision;
    out.recall += s.recall;
    out.f1 += s.f1;
  }
  const double n = static_cast<double>(scores.size());
  out.precision /= n;
  out.recall /= n;
  out.f1 /= n;
  return out;
}

}  // namespace authorsum::metrics
