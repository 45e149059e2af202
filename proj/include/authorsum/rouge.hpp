#pragma once

#include <unordered_map>
#include <vector>

namespace authorsum::metrics {

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  static RougeScore from_pr(double p, double r);
};

struct NGramHash {
  std::size_t operator()(const std::vector<int>& g) const;
};

using NGramCounts = std::unordered_map<std::vector<int>, int, NGramHash>;

// Sliding-window multiset of n-grams; empty when len(tokens) < n.
NGramCounts ngram_counts(const std::vector<int>& tokens, int n);

// Clipped n-gram overlap: recall = overlap/ref_total, precision =
// overlap/hyp_total; degenerate totals yield zero components.
RougeScore rouge_n(int n, const std::vector<int>& hyp,
                   const std::vector<int>& ref);

// Summary-level LCS over the whole token sequences.
RougeScore rouge_l(const std::vector<int>& hyp, const std::vector<int>& ref);

std::size_t lcs_length(const std::vector<int>& a, const std::vector<int>& b);

// Arithmetic mean of each component independently.
RougeScore macro_average(const std::vector<RougeScore>& scores);

}  // namespace authorsum::metrics
