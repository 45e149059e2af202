#include "authorsum/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace authorsum::harness {

AuthorStats author_stats(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("no per-author values");
  std::sort(values.begin(), values.end());
  AuthorStats s;
  s.min = values.front();
  s.max = values.back();
  const std::size_t n = values.size();
  s.median = (n % 2 == 1) ? values[n / 2]
                          : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(n);
  for (double v : values) s.std_dev += (v - s.mean) * (v - s.mean);
  s.std_dev = std::sqrt(s.std_dev / static_cast<double>(n));
  return s;
}

std::string render_pct(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", fraction * 100.0);
  return buf;
}

void sort_rows(std::vector<ReportRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ReportRow& a, const ReportRow& b) {
                     if (a.section != b.section) return a.section < b.section;
                     return a.mode < b.mode;  // BASE enumerates first
                   });
}

std::string report_csv(std::vector<ReportRow> rows, std::uint64_t config_hash,
                       std::uint64_t seed) {
  if (rows.empty()) throw std::invalid_argument("no report rows");
  sort_rows(rows);
  std::string out = "section,mode,split,r1,r2,rl,min,max,mean,median,std\n";
  for (const auto& r : rows) {
    out += std::string(corpus::to_string(r.section)) + "," +
           text::to_string(r.mode) + "," + r.split + "," + render_pct(r.r1.f1) +
           "," + render_pct(r.r2.f1) + "," + render_pct(r.rl.f1) + "," +
           render_pct(r.r2_min) + "," + render_pct(r.r2_max) + "," +
           render_pct(r.r2_mean) + "," + render_pct(r.r2_median) + "," +
           render_pct(r.r2_std) + "\n";
  }
  char meta[64];
  std::snprintf(meta, sizeof(meta), "# config=0x%016llx seed=%llu\n",
                static_cast<unsigned long long>(config_hash),
                static_cast<unsigned long long>(seed));
  return out + meta;
}

std::string report_table(std::vector<ReportRow> rows) {
  if (rows.empty()) throw std::invalid_argument("no report rows");
  sort_rows(rows);
  char line[160];
  std::string out;
  std::snprintf(line, sizeof(line), "%-4s %-8s %-12s %7s %7s %7s | %6s %6s %6s %6s %6s\n",
                "sec", "mode", "split", "R-1", "R-2", "R-L", "min", "max",
                "mean", "med", "std");
  out += line;
  out += std::string(92, '-') + "\n";
  corpus::Section last = rows.front().section;
  for (const auto& r : rows) {
    if (r.section != last) {
      out += std::string(92, '-') + "\n";
      last = r.section;
    }
    std::snprintf(line, sizeof(line),
                  "%-4s %-8s %-12s %7s %7s %7s | %6s %6s %6s %6s %6s\n",
                  corpus::to_string(r.section), text::to_string(r.mode),
                  r.split.c_str(), render_pct(r.r1.f1).c_str(),
                  render_pct(r.r2.f1).c_str(), render_pct(r.rl.f1).c_str(),
                  render_pct(r.r2_min).c_str(), render_pct(r.r2_max).c_str(),
                  render_pct(r.r2_mean).c_str(),
                  render_pct(r.r2_median).c_str(),
                  render_pct(r.r2_std).c_str());
    out += line;
  }
  return out;
}

}  // namespace authorsum::harness
