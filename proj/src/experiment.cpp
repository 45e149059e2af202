#include "authorsum/experiment.hpp"

#include <algorithm>
#include <iostream>
#include <map>
#include <set>

#include "authorsum/adaptation.hpp"
#include "authorsum/checkpoint.hpp"
#include "authorsum/optim.hpp"
#include "authorsum/report.hpp"
#include "authorsum/rouge.hpp"
#include "authorsum/util.hpp"
#include "json.hpp"

namespace authorsum::harness {

using corpus::Section;
using text::PrefixMode;

namespace {

std::string pair_name(Section s, PrefixMode m) {
  std::string out = corpus::to_string(s);
  std::transform(out.begin(), out.end(), out.begin(), ::tolower);
  std::string mode = text::to_string(m);
  std::transform(mode.begin(), mode.end(), mode.begin(), ::tolower);
  return out + "_" + mode;
}

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof(buf), "0x%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::string ExperimentConfig::to_json() const {
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["outdir"] = outdir;
  j["corpus"] = {{"n_train_authors", corpus.n_train_authors},
                 {"n_hospitals", corpus.n_hospitals},
                 {"n_new_authors", corpus.n_new_authors},
                 {"new_author_shared_fraction", corpus.new_author_shared_fraction},
                 {"style_divergence", corpus.style_divergence},
                 {"noise_rate", corpus.noise_rate},
                 {"train_per_author", corpus.counts.train_per_author},
                 {"val_per_author", corpus.counts.val_per_author},
                 {"eval_per_author", corpus.counts.eval_per_author},
                 {"adapt_per_author", corpus.counts.adapt_per_author},
                 {"test_adapt_per_author", corpus.counts.test_adapt_per_author}};
  j["model"] = {{"d_model", d_model},       {"n_heads", n_heads},
                {"enc_layers", enc_layers}, {"dec_layers", dec_layers},
                {"d_ff", d_ff},             {"max_src_len", max_src_len},
                {"max_tgt_len", max_tgt_len}, {"dropout", dropout}};
  j["train"] = {{"epochs", train.epochs},
                {"batch_size", train.batch_size},
                {"lr", train.lr},
                {"warmup_steps", train.warmup_steps}};
  j["min_count"] = min_count;
  auto sections_j = nlohmann::ordered_json::array();
  for (Section s : sections) sections_j.push_back(corpus::to_string(s));
  j["sections"] = std::move(sections_j);
  auto modes_j = nlohmann::ordered_json::array();
  for (PrefixMode m : modes) modes_j.push_back(text::to_string(m));
  j["modes"] = std::move(modes_j);
  j["stability_doc_counts"] = stability_doc_counts;
  j["projection"] = {{"perplexity", tsne_perplexity},
                     {"iterations", tsne_iterations},
                     {"learning_rate", tsne_learning_rate}};
  return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json(const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  ExperimentConfig c;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("seed", c.seed);
  get("outdir", c.outdir);
  if (j.contains("corpus")) {
    const auto& cj = j.at("corpus");
    auto getc = [&](const char* key, auto& field) {
      if (cj.contains(key))
        field = cj.at(key).get<std::decay_t<decltype(field)>>();
    };
    getc("n_train_authors", c.corpus.n_train_authors);
    getc("n_hospitals", c.corpus.n_hospitals);
    getc("n_new_authors", c.corpus.n_new_authors);
    getc("new_author_shared_fraction", c.corpus.new_author_shared_fraction);
    getc("style_divergence", c.corpus.style_divergence);
    getc("noise_rate", c.corpus.noise_rate);
    getc("train_per_author", c.corpus.counts.train_per_author);
    getc("val_per_author", c.corpus.counts.val_per_author);
    getc("eval_per_author", c.corpus.counts.eval_per_author);
    getc("adapt_per_author", c.corpus.counts.adapt_per_author);
    getc("test_adapt_per_author", c.corpus.counts.test_adapt_per_author);
  }
  if (j.contains("model")) {
    const auto& mj = j.at("model");
    auto getm = [&](const char* key, auto& field) {
      if (mj.contains(key))
        field = mj.at(key).get<std::decay_t<decltype(field)>>();
    };
    getm("d_model", c.d_model);
    getm("n_heads", c.n_heads);
    getm("enc_layers", c.enc_layers);
    getm("dec_layers", c.dec_layers);
    getm("d_ff", c.d_ff);
    getm("max_src_len", c.max_src_len);
    getm("max_tgt_len", c.max_tgt_len);
    getm("dropout", c.dropout);
  }
  if (j.contains("train")) {
    const auto& tj = j.at("train");
    auto gett = [&](const char* key, auto& field) {
      if (tj.contains(key))
        field = tj.at(key).get<std::decay_t<decltype(field)>>();
    };
    gett("epochs", c.train.epochs);
    gett("batch_size", c.train.batch_size);
    gett("lr", c.train.lr);
    gett("warmup_steps", c.train.warmup_steps);
  }
  get("min_count", c.min_count);
  if (j.contains("sections")) {
    c.sections.clear();
    for (const auto& s : j.at("sections"))
      c.sections.push_back(corpus::section_from_string(s.get<std::string>()));
  }
  if (j.contains("modes")) {
    c.modes.clear();
    for (const auto& m : j.at("modes"))
      c.modes.push_back(text::prefix_mode_from_string(m.get<std::string>()));
  }
  get("stability_doc_counts", c.stability_doc_counts);
  if (j.contains("projection")) {
    const auto& pj = j.at("projection");
    if (pj.contains("perplexity")) c.tsne_perplexity = pj.at("perplexity");
    if (pj.contains("iterations")) c.tsne_iterations = pj.at("iterations");
    if (pj.contains("learning_rate"))
      c.tsne_learning_rate = pj.at("learning_rate");
  }
  c.corpus.seed = c.seed;
  return c;
}

std::uint64_t ExperimentConfig::config_hash() const {
  // the artifact location is not an experiment parameter
  auto j = nlohmann::ordered_json::parse(to_json());
  j.erase("outdir");
  return fnv1a64(j.dump());
}

std::filesystem::path ExperimentConfig::dir(const std::string& sub) const {
  return std::filesystem::path(outdir) / sub;
}

std::filesystem::path ExperimentConfig::checkpoint_stem(Section s,
                                                        PrefixMode m) const {
  return dir("ckpt") / pair_name(s, m);
}

std::filesystem::path ExperimentConfig::selection_path(
    Section s, PrefixMode m, const std::string& author) const {
  return dir("selections") / pair_name(s, m) / (author + ".json");
}

model::ModelConfig ExperimentConfig::model_config(Section s, PrefixMode m,
                                                  int vocab_size) const {
  model::ModelConfig mc;
  mc.d_model = d_model;
  mc.n_heads = n_heads;
  mc.enc_layers = enc_layers;
  mc.dec_layers = dec_layers;
  mc.d_ff = d_ff;
  mc.max_src_len = max_src_len;
  mc.max_tgt_len = max_tgt_len;
  mc.vocab_size = vocab_size;
  mc.prefix_mode = m;
  mc.dropout = dropout;
  mc.seed = Rng(seed).child("model/" + pair_name(s, m)).seed();
  return mc;
}

void run_synth(const ExperimentConfig& cfg) {
  corpus::CorpusConfig cc = cfg.corpus;
  cc.seed = cfg.seed;
  const corpus::Corpus c = corpus::build_corpus(cc);
  const std::uint64_t hash = cfg.config_hash();

  write_file_atomic(cfg.dir("data") / "records.jsonl",
                    corpus::records_to_jsonl(c.splits, hash, cfg.seed));
  write_file_atomic(cfg.dir("data") / "splits.json",
                    corpus::splits_manifest_json(c.splits, hash, cfg.seed));

  // vocabulary over the whole synthetic corpus (closed world), then author
  // tokens for the training population in enrollment order
  text::Vocab vocab =
      text::build_vocab(corpus::all_texts(c.splits), cfg.min_count);
  text::AuthorRegistry registry;
  for (const auto& author : c.splits.train_authors) {
    text::register_author(vocab, registry, author);
  }
  write_file_atomic(cfg.dir("data") / "vocab.json",
                    text::vocab_to_json(vocab, registry));

  nlohmann::ordered_json authors;
  authors["_meta"] = {{"config_hash", hex64(hash)}, {"seed", cfg.seed}};
  for (const auto& p : c.profiles) authors[p.author] = p.hospital;
  write_file_atomic(cfg.dir("data") / "authors.json", authors.dump(2));
  write_file_atomic(cfg.dir("data") / "config.json", cfg.to_json() + "\n");
  std::cout << "synth: " << c.splits.train.size() << " train / "
            << c.splits.adapt.size() << " adapt / "
            << c.splits.test_adapt.size() << " test-adapt records, vocab "
            << vocab.size() << "\n";
}

LoadedData load_data(const ExperimentConfig& cfg) {
  LoadedData d;
  auto [vocab, registry] =
      text::vocab_from_json(read_file(cfg.dir("data") / "vocab.json"));
  d.vocab = std::move(vocab);
  d.registry = std::move(registry);
  d.splits =
      corpus::dataset_from_files(read_file(cfg.dir("data") / "records.jsonl"),
                                 read_file(cfg.dir("data") / "splits.json"));
  const auto authors =
      nlohmann::json::parse(read_file(cfg.dir("data") / "authors.json"));
  for (const auto& [name, hospital] : authors.items()) {
    if (name == "_meta") continue;
    d.hospital_of[name] = hospital.get<std::string>();
  }
  return d;
}

namespace {

std::vector<model::TrainRecord> to_train_records(
    const text::Vocab& vocab, const std::vector<corpus::EncounterRecord>& recs,
    Section section) {
  std::vector<model::TrainRecord> out;
  out.reserve(recs.size());
  for (const auto& r : recs) {
    model::TrainRecord t;
    t.src = text::encode_text(vocab, r.transcript);
    t.tgt = text::encode_target(vocab, r.notes.at(section));
    t.author = r.author;
    out.push_back(std::move(t));
  }
  return out;
}

// macro ROUGE over the split plus the per-author ROUGE-2 distribution
ReportRow score_split(const model::Seq2SeqModel& m,
                      const text::AuthorRegistry& registry,
                      const text::Vocab& vocab,
                      const std::vector<corpus::EncounterRecord>& recs,
                      Section section, PrefixMode mode,
                      const std::string& split_name) {
  std::vector<metrics::RougeScore> r1(recs.size()), r2(recs.size()),
      rl(recs.size());
  std::map<std::string, std::vector<double>> by_author;
  parallel_for(recs.size(), [&](std::size_t i) {
    const auto& rec = recs[i];
    const text::TokenSeq src = text::encode_text(vocab, rec.transcript);
    std::optional<int> tok;
    if (mode != PrefixMode::BASE) tok = registry.token_of(rec.author);
    const auto hyp = m.generate_greedy(src, tok, registry).ids;
    const auto ref = text::encode_text(vocab, rec.notes.at(section)).ids;
    r1[i] = metrics::rouge_n(1, hyp, ref);
    r2[i] = metrics::rouge_n(2, hyp, ref);
    rl[i] = metrics::rouge_l(hyp, ref);
  });
  for (std::size_t i = 0; i < recs.size(); ++i) {
    by_author[recs[i].author].push_back(r2[i].f1);
  }
  ReportRow row;
  row.section = section;
  row.mode = mode;
  row.split = split_name;
  row.r1 = metrics::macro_average(r1);
  row.r2 = metrics::macro_average(r2);
  row.rl = metrics::macro_average(rl);
  std::vector<double> author_means;
  for (const auto& [author, scores] : by_author) {
    double total = 0.0;
    for (double s : scores) total += s;
    author_means.push_back(total / static_cast<double>(scores.size()));
  }
  const AuthorStats st = author_stats(author_means);
  row.r2_min = st.min;
  row.r2_max = st.max;
  row.r2_mean = st.mean;
  row.r2_median = st.median;
  row.r2_std = st.std_dev;
  return row;
}

}  // namespace

void run_train(const ExperimentConfig& cfg) {
  const LoadedData data = load_data(cfg);
  const std::uint64_t hash = cfg.config_hash();

  struct Task {
    Section section;
    PrefixMode mode;
  };
  std::vector<Task> tasks;
  for (Section s : cfg.sections)
    for (PrefixMode m : cfg.modes) tasks.push_back({s, m});

  std::vector<ReportRow> rows(tasks.size());
  // one model per (section, mode); tasks are independent and each one is
  // single-threaded, so parallelism cannot change any result
  parallel_for(tasks.size(), [&](std::size_t ti) {
    const auto [section, mode] = tasks[ti];
    model::ModelConfig mc = cfg.model_config(section, mode, data.vocab.size());
    model::Seq2SeqModel m(mc, data.vocab);
    auto records = to_train_records(data.vocab, data.splits.train, section);
    nn::Adam opt(m.parameter_tensors(),
                 {.lr = cfg.train.lr, .warmup_steps = cfg.train.warmup_steps});
    const Rng train_rng =
        Rng(cfg.seed).child("train/" + pair_name(section, mode));
    const auto log = model::train_model(m, records, data.registry,
                                        cfg.train.epochs, cfg.train.batch_size,
                                        opt, train_rng);
    save_checkpoint(m, data.vocab, data.registry,
                    cfg.checkpoint_stem(section, mode), hash, cfg.seed);
    rows[ti] = score_split(m, data.registry, data.vocab,
                           data.splits.evaluation, section, mode,
                           "evaluation");
    std::cout << "train " << pair_name(section, mode) << ": final loss "
              << (log.epoch_mean_loss.empty() ? 0.0
                                              : log.epoch_mean_loss.back())
              << ", eval R-2 " << render_pct(rows[ti].r2.f1) << "\n";
  });

  write_file_atomic(cfg.dir("reports") / "eval.csv",
                    report_csv(rows, hash, cfg.seed));
  write_file_atomic(cfg.dir("reports") / "eval.txt", report_table(rows));
}

namespace {

// adapt docs per new author in a fixed seeded order shared by selection
// and the stability ladder
std::map<std::string, std::vector<adapt::AdaptDoc>> adapt_docs_by_author(
    const ExperimentConfig& cfg, const LoadedData& data, Section section) {
  std::map<std::string, std::vector<corpus::EncounterRecord>> recs;
  for (const auto& r : data.splits.adapt) recs[r.author].push_back(r);
  std::map<std::string, std::vector<adapt::AdaptDoc>> out;
  for (auto& [author, list] : recs) {
    Rng order_rng = Rng(cfg.seed).child("adapt.docorder." + author);
    order_rng.shuffle(list);
    for (const auto& r : list) {
      out[author].push_back(adapt::make_adapt_doc(data.vocab, r, section));
    }
  }
  return out;
}

}  // namespace

void run_adapt(const ExperimentConfig& cfg) {
  const LoadedData data = load_data(cfg);
  const std::uint64_t hash = cfg.config_hash();
  bool any_non_base = false;
  for (PrefixMode m : cfg.modes) any_non_base |= m != PrefixMode::BASE;
  if (!any_non_base) {
    throw std::invalid_argument(
        "adaptation is not applicable to a BASE model");
  }

  adapt::StabilityTable table;
  table.full_count = cfg.corpus.counts.adapt_per_author;
  for (int c : cfg.stability_doc_counts) {
    if (c < table.full_count) table.doc_counts.push_back(c);
  }
  table.n_new_authors = static_cast<int>(data.splits.new_authors.size());

  for (Section section : cfg.sections) {
    const auto docs_by_author = adapt_docs_by_author(cfg, data, section);
    for (PrefixMode mode : cfg.modes) {
      if (mode == PrefixMode::BASE) continue;
      const model::Seq2SeqModel m = load_checkpoint(
          cfg.checkpoint_stem(section, mode), data.vocab, data.registry);
      const adapt::ModelGenerator gen(m, data.registry);

      adapt::StabilityRow row;
      row.section = section;
      row.mode = mode;
      row.changed.assign(table.doc_counts.size(), 0);

      for (const auto& author : data.splits.new_authors) {
        const auto& docs = docs_by_author.at(author);
        const auto scores =
            adapt::candidate_score_matrix(gen, data.registry, docs);
        const auto selection = adapt::selection_from_scores(
            data.registry, scores, table.full_count, author, section, mode);
        write_file_atomic(cfg.selection_path(section, mode, author),
                          selection.to_json() + "\n");
        for (std::size_t i = 0; i < table.doc_counts.size(); ++i) {
          const auto reduced = adapt::selection_from_scores(
              data.registry, scores, table.doc_counts[i], author, section,
              mode);
          if (reduced.chosen_author != selection.chosen_author) {
            ++row.changed[i];
          }
        }
        std::cout << "adapt " << pair_name(section, mode) << " " << author
                  << " -> " << selection.chosen_author << " (R-2 "
                  << render_pct(selection.chosen_score) << ")\n";
      }
      table.rows.push_back(std::move(row));
    }
  }
  write_file_atomic(cfg.dir("reports") / "stability.csv",
                    table.to_csv(hash, cfg.seed));
  write_file_atomic(cfg.dir("reports") / "stability.json", table.to_json());
}

void run_test(const ExperimentConfig& cfg) {
  const LoadedData data = load_data(cfg);
  const std::uint64_t hash = cfg.config_hash();

  std::vector<ReportRow> test_rows;
  struct OracleRow {
    Section section;
    PrefixMode mode;
    double adapted_r2 = 0.0;  // per-author macro of enrolled-model scores
    double oracle_r2 = 0.0;
  };
  std::vector<OracleRow> oracle_rows;
  std::map<std::pair<Section, PrefixMode>, double> test_r2;  // doc macro

  std::map<std::string, std::vector<corpus::EncounterRecord>> test_by_author;
  for (const auto& r : data.splits.test_adapt) {
    test_by_author[r.author].push_back(r);
  }

  for (Section section : cfg.sections) {
    for (PrefixMode mode : cfg.modes) {
      if (mode == PrefixMode::BASE) {
        model::Seq2SeqModel m = load_checkpoint(
            cfg.checkpoint_stem(section, mode), data.vocab, data.registry);
        ReportRow row =
            score_split(m, data.registry, data.vocab, data.splits.test_adapt,
                        section, mode, "test_adapt");
        test_r2[{section, mode}] = row.r2.f1;
        // Table-6 BASE rows carry the unadapted score on both sides
        std::vector<double> base_author_means;
        for (const auto& [author, recs] : test_by_author) {
          ReportRow one = score_split(m, data.registry, data.vocab, recs,
                                      section, mode, "test_adapt");
          base_author_means.push_back(one.r2.f1);
        }
        double base_macro = 0.0;
        for (double v : base_author_means) base_macro += v;
        base_macro /= static_cast<double>(base_author_means.size());
        oracle_rows.push_back({section, mode, base_macro, base_macro});
        test_rows.push_back(std::move(row));
        continue;
      }

      // oracle scan runs against the pre-enrollment candidate set
      text::Vocab vocab = data.vocab;
      text::AuthorRegistry registry = data.registry;
      model::Seq2SeqModel m = load_checkpoint(
          cfg.checkpoint_stem(section, mode), vocab, registry);
      const adapt::ModelGenerator gen(m, registry);

      double oracle_macro = 0.0;
      for (const auto& author : data.splits.new_authors) {
        std::vector<adapt::AdaptDoc> docs;
        for (const auto& r : test_by_author.at(author)) {
          docs.push_back(adapt::make_adapt_doc(vocab, r, section));
        }
        const auto oracle = adapt::oracle_select(gen, registry, docs, author,
                                                 section, mode);
        oracle_macro += oracle.chosen_score;
      }
      oracle_macro /= static_cast<double>(data.splits.new_authors.size());

      // enrollment from the persisted adapt-phase selections
      for (const auto& author : data.splits.new_authors) {
        const auto selection = adapt::AuthorSelection::from_json(
            read_file(cfg.selection_path(section, mode, author)));
        adapt::enroll_author(m, vocab, registry, author, selection);
      }
      ReportRow row = score_split(m, registry, vocab, data.splits.test_adapt,
                                  section, mode, "test_adapt");
      test_r2[{section, mode}] = row.r2.f1;

      double adapted_macro = 0.0;
      for (const auto& author : data.splits.new_authors) {
        ReportRow one = score_split(m, registry, vocab,
                                    test_by_author.at(author), section, mode,
                                    "test_adapt");
        adapted_macro += one.r2.f1;
      }
      adapted_macro /= static_cast<double>(data.splits.new_authors.size());
      oracle_rows.push_back({section, mode, adapted_macro, oracle_macro});
      test_rows.push_back(std::move(row));
      std::cout << "test " << pair_name(section, mode) << ": R-2 "
                << render_pct(test_r2[{section, mode}]) << ", oracle R-2 "
                << render_pct(oracle_macro) << "\n";
    }
  }

  write_file_atomic(cfg.dir("reports") / "test.csv",
                    report_csv(test_rows, hash, cfg.seed));
  write_file_atomic(cfg.dir("reports") / "test.txt", report_table(test_rows));

  std::string oracle_csv = "section,mode,adapted_r2,oracle_r2,gap\n";
  for (const auto& r : oracle_rows) {
    oracle_csv += std::string(corpus::to_string(r.section)) + "," +
                  text::to_string(r.mode) + "," + render_pct(r.adapted_r2) +
                  "," + render_pct(r.oracle_r2) + "," +
                  render_pct(r.oracle_r2 - r.adapted_r2) + "\n";
  }
  oracle_csv += "# config=" + hex64(hash) + " seed=" +
                std::to_string(cfg.seed) + "\n";
  write_file_atomic(cfg.dir("reports") / "oracle.csv", oracle_csv);

  // relative improvement over BASE on the doc-macro R-2 (abstract analog)
  std::string imp_csv = "section,mode,base_r2,adapted_r2,relative_improvement\n";
  for (Section section : cfg.sections) {
    const auto base_it = test_r2.find({section, PrefixMode::BASE});
    if (base_it == test_r2.end()) continue;
    for (PrefixMode mode : cfg.modes) {
      if (mode == PrefixMode::BASE) continue;
      const auto it = test_r2.find({section, mode});
      if (it == test_r2.end()) continue;
      const double rel = base_it->second > 0.0
                             ? (it->second - base_it->second) / base_it->second
                             : 0.0;
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.4f", rel);
      imp_csv += std::string(corpus::to_string(section)) + "," +
                 text::to_string(mode) + "," + render_pct(base_it->second) +
                 "," + render_pct(it->second) + "," + buf + "\n";
    }
  }
  imp_csv += "# config=" + hex64(hash) + " seed=" + std::to_string(cfg.seed) +
             "\n";
  write_file_atomic(cfg.dir("reports") / "improvement.csv", imp_csv);
}

void run_project(const ExperimentConfig& cfg) {
  const LoadedData data = load_data(cfg);
  const std::uint64_t hash = cfg.config_hash();
  for (Section section : cfg.sections) {
    const auto stem = cfg.checkpoint_stem(section, PrefixMode::DEC);
    if (!std::filesystem::exists(stem.string() + ".json")) continue;
    model::Seq2SeqModel m =
        load_checkpoint(stem, data.vocab, data.registry);

    std::vector<std::vector<double>> rows;
    std::vector<std::string> names, hospitals;
    for (const auto& author : data.registry.enrollment_order()) {
      rows.push_back(m.embedding_row(data.registry.token_of(author)));
      names.push_back(author);
      hospitals.push_back(data.hospital_of.at(author));
    }

    viz::ProjectionConfig pc;
    pc.method = viz::Method::tsne;
    pc.perplexity = cfg.tsne_perplexity;
    pc.iterations = cfg.tsne_iterations;
    pc.learning_rate = cfg.tsne_learning_rate;
    pc.seed = Rng(cfg.seed).child("tsne/" + pair_name(section, PrefixMode::DEC))
                  .seed();
    const auto tsne = viz::tsne_2d(rows, names, hospitals, pc);
    const auto pca = viz::pca_2d(rows, names, hospitals);

    const std::string label = pair_name(section, PrefixMode::DEC);
    write_file_atomic(cfg.dir("plots") / ("tsne_" + label + ".csv"),
                      viz::projection_csv(tsne, hash, cfg.seed));
    write_file_atomic(
        cfg.dir("plots") / ("tsne_" + label + ".svg"),
        viz::projection_svg(tsne, "t-SNE of DEC author embeddings (" +
                                      std::string(corpus::to_string(section)) +
                                      ")",
                            hash, cfg.seed));
    write_file_atomic(cfg.dir("plots") / ("pca_" + label + ".csv"),
                      viz::projection_csv(pca, hash, cfg.seed));
    write_file_atomic(
        cfg.dir("plots") / ("pca_" + label + ".svg"),
        viz::projection_svg(pca, "PCA of DEC author embeddings (" +
                                     std::string(corpus::to_string(section)) +
                                     ")",
                            hash, cfg.seed));
    std::cout << "project " << label << ": silhouette "
              << viz::hospital_silhouette(tsne.points) << ", KL "
              << tsne.initial_kl << " -> " << tsne.final_kl << "\n";
  }
}

std::string run_report(const ExperimentConfig& cfg) {
  std::string out;
  for (const char* name : {"eval.csv", "test.csv", "oracle.csv",
                           "improvement.csv", "stability.csv"}) {
    const auto path = cfg.dir("reports") / name;
    if (!std::filesystem::exists(path)) continue;
    out += "== " + std::string(name) + " ==\n";
    out += read_file(path);
    out += "\n";
  }
  if (out.empty()) throw std::runtime_error("no reports found under " +
                                            cfg.dir("reports").string());
  write_file_atomic(cfg.dir("reports") / "summary.txt", out);
  return out;
}

}  // namespace authorsum::harness
