// Acceptance gate: runs every criterion at its stated tolerance and prints
// one pass/fail line per criterion. Exit code 0 only when all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "authorsum/adaptation.hpp"
#include "authorsum/checkpoint.hpp"
#include "authorsum/experiment.hpp"
#include "authorsum/projection.hpp"
#include "authorsum/report.hpp"
#include "authorsum/rouge.hpp"
#include "authorsum/util.hpp"
#include "grad_suite.hpp"
#include "json.hpp"
#include "ld_reference.hpp"

namespace fs = std::filesystem;
using namespace authorsum;
using corpus::Section;
using text::PrefixMode;

namespace {

int g_failures = 0;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

void report(int criterion, bool pass, const std::string& detail,
            double seconds) {
  std::printf("[%s] criterion %2d: %s (%.1fs)\n", pass ? "PASS" : "FAIL",
              criterion, detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

CsvTable parse_csv(const std::string& content) {
  CsvTable t;
  std::istringstream in(content);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (first) {
      t.header = std::move(cells);
      first = false;
    } else {
      t.rows.push_back(std::move(cells));
    }
  }
  return t;
}

std::size_t column(const CsvTable& t, const std::string& name) {
  for (std::size_t i = 0; i < t.header.size(); ++i) {
    if (t.header[i] == name) return i;
  }
  throw std::runtime_error("missing csv column " + name);
}

// ---------------------------------------------------------------------------

// 1. ROUGE-1/2/L hand-derived fixtures at 1e-9
void criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  const double tol = 1e-9;
  int checked = 0;
  bool ok = true;
  auto expect = [&](double got, double want) {
    ok = ok && std::abs(got - want) < tol;
    ++checked;
  };
  using metrics::rouge_l;
  using metrics::rouge_n;
  const std::vector<int> the_cat_sat = {10, 11, 12};
  const std::vector<int> the_cat_ran_far = {10, 11, 13, 14};
  const std::vector<int> the_sat_cat = {10, 12, 11};

  auto s1 = rouge_n(2, the_cat_sat, the_cat_ran_far);
  expect(s1.precision, 0.5);
  expect(s1.recall, 1.0 / 3.0);
  expect(s1.f1, 0.4);
  auto s2 = rouge_l(the_cat_sat, the_sat_cat);
  expect(s2.precision, 2.0 / 3.0);
  expect(s2.recall, 2.0 / 3.0);
  expect(s2.f1, 2.0 / 3.0);
  expect(rouge_n(1, {1, 2, 3}, {1, 2, 3}).f1, 1.0);
  expect(rouge_n(2, {1, 2, 3}, {1, 2, 3}).f1, 1.0);
  expect(rouge_l({1, 2, 3}, {1, 2, 3}).f1, 1.0);
  expect(rouge_n(1, {1, 2}, {3, 4}).f1, 0.0);
  auto s5 = rouge_n(1, {1, 2, 1}, {1, 1, 2, 2});
  expect(s5.precision, 1.0);
  expect(s5.recall, 0.75);
  expect(s5.f1, 6.0 / 7.0);
  auto s6 = rouge_n(2, {1, 2, 1}, {1, 1, 2, 2});
  expect(s6.precision, 0.5);
  expect(s6.recall, 1.0 / 3.0);
  expect(s6.f1, 0.4);
  auto s7 = rouge_l({1, 2, 3, 4}, {2, 4});
  expect(s7.precision, 0.5);
  expect(s7.recall, 1.0);
  expect(s7.f1, 2.0 / 3.0);
  expect(rouge_l({1, 3, 2, 4}, {1, 2, 3, 4}).f1, 0.75);
  auto s9 = rouge_n(1, {30}, {30, 31});
  expect(s9.precision, 1.0);
  expect(s9.recall, 0.5);
  expect(s9.f1, 2.0 / 3.0);
  expect(rouge_l({}, {1, 2}).f1, 0.0);
  expect(rouge_n(3, {1, 2}, {1, 2}).f1, 0.0);
  auto avg = metrics::macro_average(
      {metrics::RougeScore::from_pr(1.0, 1.0), metrics::RougeScore{}});
  expect(avg.f1, 0.5);

  const double secs = seconds_since(t0);
  report(1, ok && secs < 1.0,
         "ROUGE fixtures (" + std::to_string(checked) + " values at 1e-9)",
         secs);
}

// 2. grad_check: primitives < 1e-6 over 20 seeds; full 1-layer model < 1e-5
void criterion_2() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst_primitive = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    worst_primitive =
        std::max(worst_primitive, grad_suite::primitive_grad_errors(seed));
  }

  text::Vocab vocab = text::build_vocab(
      {"alpha beta gamma delta epsilon zeta eta theta iota kappa"}, 1);
  model::ModelConfig cfg;
  cfg.d_model = 8;
  cfg.n_heads = 2;
  cfg.enc_layers = 1;
  cfg.dec_layers = 1;
  cfg.d_ff = 12;
  cfg.max_src_len = 32;
  cfg.max_tgt_len = 16;
  cfg.vocab_size = vocab.size();
  cfg.dropout = 0.0;
  cfg.seed = 17;
  const std::vector<int> src = {5, 6, 7, 8};
  const std::vector<int> tgt = {text::Vocab::kBos, 8, 9, 10, text::Vocab::kEos};
  double worst_model = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    model::Seq2SeqModel m(cfg, vocab);
    Rng redraw(900 + seed);
    for (const auto& np : m.parameters()) {
      nn::Tensor t = np.tensor;
      const bool is_gain = np.name.find("gain") != std::string::npos;
      for (auto& v : t.values()) {
        v = is_gain ? 1.0 + redraw.normal(0.0, 0.175)
                    : redraw.normal(0.0, 0.35);
      }
    }
    worst_model =
        std::max(worst_model, ld_oracle::model_grad_check(m, src, tgt));
  }

  const double secs = seconds_since(t0);
  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "autodiff: primitives max %.2e (<1e-6), full model max %.2e "
                "(<1e-5), 20 seeds each",
                worst_primitive, worst_model);
  report(2, worst_primitive < 1e-6 && worst_model < 1e-5 && secs < 60.0,
         detail, secs);
}

// 3. adapt_author equals an independent brute-force recomputation
void criterion_3() {
  const auto t0 = std::chrono::steady_clock::now();

  class FixedGen : public adapt::NoteGenerator {
   public:
    std::map<std::pair<int, int>, std::vector<int>> outputs;
    std::vector<int> generate(int tok, const text::TokenSeq& src) const override {
      auto it = outputs.find({tok, src.ids[0]});
      return it == outputs.end() ? std::vector<int>{} : it->second;
    }
  };

  Rng rng(20250811);
  bool ok = true;
  for (int inst = 0; inst < 50 && ok; ++inst) {
    const int n_cand = 2 + static_cast<int>(rng.uniform_int(6));
    const int n_docs = 1 + static_cast<int>(rng.uniform_int(4));
    text::Vocab vocab = text::build_vocab({"w0 w1 w2 w3"}, 1);
    text::AuthorRegistry registry;
    std::vector<int> tokens;
    for (int c = 0; c < n_cand; ++c) {
      tokens.push_back(
          text::register_author(vocab, registry, "cand_" + std::to_string(c)));
    }
    std::vector<adapt::AdaptDoc> docs;
    for (int d = 0; d < n_docs; ++d) {
      adapt::AdaptDoc doc;
      doc.src.ids = {1000 + d};
      for (int i = 0; i < 11; ++i) doc.ref_ids.push_back(2000 + d * 100 + i);
      docs.push_back(doc);
    }
    FixedGen gen;
    std::vector<std::vector<int>> tenths(static_cast<std::size_t>(n_cand));
    for (int c = 0; c < n_cand; ++c) {
      const bool dup = c > 0 && rng.bernoulli(0.5);  // engineered ties
      for (int d = 0; d < n_docs; ++d) {
        const int t = dup ? tenths[0][static_cast<std::size_t>(d)]
                          : static_cast<int>(rng.uniform_int(11));
        tenths[static_cast<std::size_t>(c)].push_back(t);
        std::vector<int> out(docs[static_cast<std::size_t>(d)].ref_ids.begin(),
                             docs[static_cast<std::size_t>(d)].ref_ids.begin() +
                                 1 + t);
        int junk = 900000 + d * 37;
        while (out.size() < 11) out.push_back(junk++);
        gen.outputs[{tokens[static_cast<std::size_t>(c)], 1000 + d}] =
            std::move(out);
      }
    }
    const auto sel = adapt::adapt_author(gen, registry, docs, "newdoc",
                                         Section::HPI, PrefixMode::ENC);
    // independent brute force: reverse order, >= keeps the earlier maximum
    std::string brute;
    double best = -1.0;
    for (auto it = sel.per_candidate_scores.rbegin();
         it != sel.per_candidate_scores.rend(); ++it) {
      if (it->second >= best) {
        best = it->second;
        brute = it->first;
      }
    }
    ok = ok && sel.chosen_author == brute && sel.chosen_score == best;
  }
  const double secs = seconds_since(t0);
  report(3, ok && secs < 10.0,
         "Algorithm-1 selection equals brute force on 50 mock instances "
         "(ties included)",
         secs);
}

// shared desk-scale end-to-end pipeline (criteria 4-8, 10)
harness::ExperimentConfig desk_config(const fs::path& outdir) {
  harness::ExperimentConfig cfg;
  cfg.seed = 42;
  cfg.outdir = outdir.string();
  cfg.corpus.n_train_authors = 12;
  cfg.corpus.n_hospitals = 4;
  cfg.corpus.n_new_authors = 4;
  cfg.corpus.new_author_shared_fraction = 0.75;
  cfg.corpus.style_divergence = 0.7;
  cfg.corpus.counts.adapt_per_author = 20;  // stability ladder vs full 20
  cfg.train.epochs = 24;
  return cfg;
}

void criterion_6(const harness::ExperimentConfig& cfg, double pipeline_secs) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto table =
      parse_csv(read_file(cfg.dir("reports") / "improvement.csv"));
  const std::size_t sec_col = column(table, "section");
  const std::size_t mode_col = column(table, "mode");
  const std::size_t rel_col = column(table, "relative_improvement");
  bool ok = true;
  std::string detail = "relative R-2 over BASE:";
  int rows_seen = 0;
  for (const auto& row : table.rows) {
    const double rel = std::stod(row[rel_col]);
    const double need = row[sec_col] == "HPI" ? 0.10 : 0.25;
    ok = ok && rel >= need;
    ++rows_seen;
    detail += " " + row[sec_col] + "/" + row[mode_col] + " " +
              std::to_string(static_cast<int>(std::lround(rel * 100))) + "%";
  }
  ok = ok && rows_seen == 9;  // 3 sections x {ENC, DEC, ENC_DEC}
  ok = ok && pipeline_secs < 1800.0;
  report(6, ok, detail, seconds_since(t0) + pipeline_secs);
}

void criterion_4(const harness::ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  auto data = harness::load_data(cfg);
  text::Vocab vocab = data.vocab;
  text::AuthorRegistry registry = data.registry;
  model::Seq2SeqModel m = harness::load_checkpoint(
      cfg.checkpoint_stem(Section::AP, PrefixMode::ENC_DEC), vocab, registry);

  adapt::AuthorSelection sel;
  sel.chosen_author = data.splits.train_authors[3];
  const int donor_tok = registry.token_of(sel.chosen_author);
  const int new_tok =
      adapt::enroll_author(m, vocab, registry, "acceptance_probe", sel);

  bool ok = true;
  int compared = 0;
  for (std::size_t i = 0; i < 20 && i < data.splits.test_adapt.size(); ++i) {
    const auto src =
        text::encode_text(vocab, data.splits.test_adapt[i].transcript);
    const auto a = m.generate_greedy(src, donor_tok, registry);
    const auto b = m.generate_greedy(src, new_tok, registry);
    ok = ok && a.ids == b.ids;
    ++compared;
  }
  ok = ok && compared == 20;
  report(4, ok,
         "enrollment identity: donor and copied embeddings generate "
         "identically on 20 held-out sources",
         seconds_since(t0));
}

void criterion_5(const harness::ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto table = parse_csv(read_file(cfg.dir("reports") / "oracle.csv"));
  const std::size_t mode_col = column(table, "mode");
  const std::size_t adapted_col = column(table, "adapted_r2");
  const std::size_t oracle_col = column(table, "oracle_r2");
  bool ok = true;
  int non_base = 0;
  double max_gap = 0.0;
  for (const auto& row : table.rows) {
    const double adapted = std::stod(row[adapted_col]);
    const double oracle = std::stod(row[oracle_col]);
    ok = ok && oracle >= adapted;
    if (row[mode_col] != "BASE") {
      ++non_base;
      max_gap = std::max(max_gap, oracle - adapted);
    }
  }
  ok = ok && non_base == 9;
  char detail[128];
  std::snprintf(detail, sizeof(detail),
                "oracle R-2 >= adapted R-2 for all 9 (section, mode); max "
                "reported gap %.2f",
                max_gap);
  report(5, ok, detail, seconds_since(t0));
}

void criterion_7(const harness::ExperimentConfig& cfg, const fs::path& scratch) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto stability_json =
      nlohmann::json::parse(read_file(cfg.dir("reports") / "stability.json"));
  bool ok = stability_json.at("full_count").get<int>() == 20;
  ok = ok && stability_json.at("doc_counts") ==
                 nlohmann::json::array({1, 5, 10, 15});
  const int n_new = stability_json.at("n_new_authors").get<int>();
  int rows = 0;
  for (const auto& row : stability_json.at("rows")) {
    ++rows;
    for (const auto& cell : row.at("changed")) {
      const int v = cell.get<int>();
      ok = ok && v >= 0 && v <= n_new;
    }
  }
  ok = ok && rows == 9;

  // full-count self-comparison is zero by definition: rerun one selection
  // with count == full_count via the library path
  // (structural: selection_from_scores at the full count equals itself)

  // byte-identical rerun of the adapt phase against the same artifacts
  harness::ExperimentConfig rerun = cfg;
  rerun.outdir = (scratch / "adapt_rerun").string();
  fs::create_directories(rerun.dir("data"));
  fs::create_directories(rerun.dir("ckpt"));
  fs::copy(cfg.dir("data"), rerun.dir("data"),
           fs::copy_options::overwrite_existing | fs::copy_options::recursive);
  fs::copy(cfg.dir("ckpt"), rerun.dir("ckpt"),
           fs::copy_options::overwrite_existing | fs::copy_options::recursive);
  harness::run_adapt(rerun);
  ok = ok && read_file(rerun.dir("reports") / "stability.csv") ==
                 read_file(cfg.dir("reports") / "stability.csv");
  ok = ok && read_file(rerun.selection_path(Section::PE, PrefixMode::DEC,
                                            "newdoc_00")) ==
                 read_file(cfg.selection_path(Section::PE, PrefixMode::DEC,
                                              "newdoc_00"));
  report(7, ok,
         "stability table: ladder {1,5,10,15} vs full 20, cells in [0," +
             std::to_string(n_new) + "], byte-identical rerun",
         seconds_since(t0));
}

void criterion_8(const harness::ExperimentConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  int rows_checked = 0;
  for (const char* name : {"eval.csv", "test.csv"}) {
    const auto table = parse_csv(read_file(cfg.dir("reports") / name));
    const std::size_t min_col = column(table, "min");
    const std::size_t max_col = column(table, "max");
    const std::size_t med_col = column(table, "median");
    const std::size_t std_col = column(table, "std");
    for (const auto& row : table.rows) {
      const double mn = std::stod(row[min_col]);
      const double mx = std::stod(row[max_col]);
      const double med = std::stod(row[med_col]);
      const double sd = std::stod(row[std_col]);
      ok = ok && mn <= med && med <= mx && sd >= 0.0;
      ++rows_checked;
    }
  }
  ok = ok && rows_checked == 24;  // 12 eval + 12 test rows
  report(8, ok,
         "per-author statistics: min <= median <= max and std >= 0 on " +
             std::to_string(rows_checked) + " rows",
         seconds_since(t0));
}

void criterion_10(const harness::ExperimentConfig& cfg, const fs::path& scratch) {
  const auto t0 = std::chrono::steady_clock::now();
  auto data = harness::load_data(cfg);
  const auto stem = cfg.checkpoint_stem(Section::HPI, PrefixMode::DEC);
  model::Seq2SeqModel m =
      harness::load_checkpoint(stem, data.vocab, data.registry);

  const fs::path copy = scratch / "persist" / "copy";
  harness::save_checkpoint(m, data.vocab, data.registry, copy);
  bool ok = read_file(copy.string() + ".bin") ==
            read_file(stem.string() + ".bin");
  model::Seq2SeqModel again =
      harness::load_checkpoint(copy, data.vocab, data.registry);
  for (std::size_t i = 0; i < m.parameters().size(); ++i) {
    ok = ok && again.parameters()[i].tensor.values() ==
                   m.parameters()[i].tensor.values();
  }

  // corrupted manifest fails loudly
  write_file_atomic(copy.string() + ".json", "{broken");
  bool threw = false;
  try {
    harness::load_checkpoint(copy, data.vocab, data.registry);
  } catch (const std::exception&) {
    threw = true;
  }
  ok = ok && threw;

  // truncated blob fails with byte counts
  harness::save_checkpoint(m, data.vocab, data.registry, copy);
  const std::string blob = read_file(copy.string() + ".bin");
  write_file_atomic(copy.string() + ".bin", blob.substr(0, 100));
  threw = false;
  try {
    harness::load_checkpoint(copy, data.vocab, data.registry);
  } catch (const std::exception& e) {
    threw = std::string(e.what()).find("expected") != std::string::npos;
  }
  ok = ok && threw;

  // vocabulary drift fails loudly
  harness::save_checkpoint(m, data.vocab, data.registry, copy);
  text::Vocab drifted = data.vocab;
  text::AuthorRegistry reg2 = data.registry;
  text::register_author(drifted, reg2, "drift_probe");
  threw = false;
  try {
    harness::load_checkpoint(copy, drifted, reg2);
  } catch (const std::exception& e) {
    threw = std::string(e.what()).find("vocabulary drift") != std::string::npos;
  }
  ok = ok && threw;

  report(10, ok,
         "persistence: bit-identical roundtrip; corrupted/truncated/drifted "
         "checkpoints fail loudly",
         seconds_since(t0));
}

void criterion_9(const harness::ExperimentConfig& cfg, const fs::path& scratch) {
  const auto t0 = std::chrono::steady_clock::now();

  // KL decrease on the main run's trained DEC author embeddings
  auto data = harness::load_data(cfg);
  model::Seq2SeqModel dec = harness::load_checkpoint(
      cfg.checkpoint_stem(Section::PE, PrefixMode::DEC), data.vocab,
      data.registry);
  std::vector<std::vector<double>> rows;
  std::vector<std::string> names, hospitals;
  for (const auto& author : data.registry.enrollment_order()) {
    rows.push_back(dec.embedding_row(data.registry.token_of(author)));
    names.push_back(author);
    hospitals.push_back(data.hospital_of.at(author));
  }
  viz::ProjectionConfig pc;
  pc.perplexity = 5.0;
  pc.iterations = 1000;
  pc.learning_rate = 100.0;
  pc.seed = 42;
  const auto t_proj = std::chrono::steady_clock::now();
  auto main_proj = viz::tsne_2d(rows, names, hospitals, pc);
  const double proj_secs = seconds_since(t_proj);
  bool ok = main_proj.final_kl < main_proj.initial_kl && proj_secs < 30.0;

  // low-divergence corpus: hospitals must cluster (silhouette > 0)
  harness::ExperimentConfig low = desk_config(scratch / "low_divergence");
  low.corpus.style_divergence = 0.3;
  low.sections = {Section::PE};
  low.modes = {PrefixMode::DEC};
  harness::run_synth(low);
  harness::run_train(low);
  auto low_data = harness::load_data(low);
  model::Seq2SeqModel low_dec = harness::load_checkpoint(
      low.checkpoint_stem(Section::PE, PrefixMode::DEC), low_data.vocab,
      low_data.registry);
  rows.clear();
  names.clear();
  hospitals.clear();
  for (const auto& author : low_data.registry.enrollment_order()) {
    rows.push_back(low_dec.embedding_row(low_data.registry.token_of(author)));
    names.push_back(author);
    hospitals.push_back(low_data.hospital_of.at(author));
  }
  auto low_proj = viz::tsne_2d(rows, names, hospitals, pc);
  const double silhouette = viz::hospital_silhouette(low_proj.points);
  ok = ok && low_proj.final_kl < low_proj.initial_kl && silhouette > 0.0;

  char detail[160];
  std::snprintf(detail, sizeof(detail),
                "projection: KL %.3f->%.3f; divergence-0.3 hospital "
                "silhouette %.3f (>0)",
                main_proj.initial_kl, main_proj.final_kl, silhouette);
  report(9, ok, detail, seconds_since(t0));
}

}  // namespace

int main() {
  const fs::path scratch = fs::current_path() / "acceptance_out";
  fs::remove_all(scratch);
  fs::create_directories(scratch);

  criterion_1();
  criterion_2();
  criterion_3();

  // desk-scale end-to-end pipeline shared by criteria 4-8 and 10
  const auto cfg = desk_config(scratch / "desk");
  const auto t0 = std::chrono::steady_clock::now();
  std::printf("-- running the desk-scale pipeline (12 train authors / 4 "
              "hospitals, 4 new authors, divergence 0.7, seed 42) --\n");
  std::fflush(stdout);
  harness::run_synth(cfg);
  harness::run_train(cfg);
  harness::run_adapt(cfg);
  harness::run_test(cfg);
  harness::run_project(cfg);
  const double pipeline_secs = seconds_since(t0);
  std::printf("-- pipeline finished in %.0fs --\n", pipeline_secs);
  std::fflush(stdout);

  criterion_4(cfg);
  criterion_5(cfg);
  criterion_6(cfg, pipeline_secs);
  criterion_7(cfg, scratch);
  criterion_8(cfg);
  criterion_9(cfg, scratch);
  criterion_10(cfg, scratch);

  if (g_failures == 0) {
    std::printf("acceptance: all criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criterion(s) failed\n", g_failures);
  return 1;
}
