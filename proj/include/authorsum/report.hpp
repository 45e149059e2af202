#pragma once

#include <string>
#include <vector>

#include "authorsum/corpus.hpp"
#include "authorsum/rouge.hpp"
#include "authorsum/text.hpp"

namespace authorsum::harness {

/// One table row: macro ROUGE over the split plus the distribution of
/// per-author ROUGE-2 F1. All metric fields are fractions in [0,1] and are
/// rendered x100 with two decimals, matching the usual table convention.
struct ReportRow {
  corpus::Section section = corpus::Section::HPI;
  text::PrefixMode mode = text::PrefixMode::BASE;
  std::string split;
  metrics::RougeScore r1, r2, rl;
  double r2_min = 0, r2_max = 0, r2_mean = 0, r2_median = 0, r2_std = 0;
};

struct AuthorStats {
  double min = 0, max = 0, mean = 0, median = 0, std_dev = 0;
};

AuthorStats author_stats(std::vector<double> values);  // errors when empty

std::string render_pct(double fraction);  // 0.3664 -> "36.64"

// stable report order: section (HPI, PE, AP), then mode with BASE first
void sort_rows(std::vector<ReportRow>& rows);

// header: section,mode,split,r1,r2,rl,min,max,mean,median,std
std::string report_csv(std::vector<ReportRow> rows, std::uint64_t config_hash,
                       std::uint64_t seed);

// human-readable side-by-side table
std::string report_table(std::vector<ReportRow> rows);

}  // namespace authorsum::harness
