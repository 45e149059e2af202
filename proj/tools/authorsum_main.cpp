// Command-line front end: synth-data, train, adapt, test, project, report.
// Flags mirror the experiment config; --config <json> overrides all flags.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "authorsum/experiment.hpp"
#include "authorsum/util.hpp"

using authorsum::harness::ExperimentConfig;

namespace {

struct Flags {
  std::string config_path;
  bool paper_shaped = false;
  std::vector<std::string> modes;
  std::vector<std::string> sections;
  ExperimentConfig cfg;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config_path,
                  "experiment config JSON; overrides all flags");
  cmd->add_option("--outdir", f.cfg.outdir, "artifact directory");
  cmd->add_option("--seed", f.cfg.seed, "master seed");
  cmd->add_flag("--paper-shaped", f.paper_shaped,
                "Table-1-like split topology (62/27 authors, 10 new)");
  cmd->add_option("--epochs", f.cfg.train.epochs);
  cmd->add_option("--batch-size", f.cfg.train.batch_size);
  cmd->add_option("--lr", f.cfg.train.lr);
  cmd->add_option("--warmup-steps", f.cfg.train.warmup_steps);
  cmd->add_option("--d-model", f.cfg.d_model);
  cmd->add_option("--n-heads", f.cfg.n_heads);
  cmd->add_option("--d-ff", f.cfg.d_ff);
  cmd->add_option("--dropout", f.cfg.dropout);
  cmd->add_option("--style-divergence", f.cfg.corpus.style_divergence);
  cmd->add_option("--noise-rate", f.cfg.corpus.noise_rate);
  cmd->add_option("--train-per-author", f.cfg.corpus.counts.train_per_author);
  cmd->add_option("--adapt-per-author", f.cfg.corpus.counts.adapt_per_author);
  cmd->add_option("--test-adapt-per-author",
                  f.cfg.corpus.counts.test_adapt_per_author);
  cmd->add_option("--tsne-perplexity", f.cfg.tsne_perplexity);
  cmd->add_option("--tsne-iterations", f.cfg.tsne_iterations);
  cmd->add_option("--modes", f.modes,
                  "prefix modes to run (BASE ENC DEC ENC_DEC)");
  cmd->add_option("--sections", f.sections, "note sections to run (HPI PE AP)");
}

ExperimentConfig resolve(const Flags& f) {
  ExperimentConfig cfg = f.cfg;
  if (f.paper_shaped) {
    cfg.corpus = authorsum::corpus::CorpusConfig::paper_shaped();
  }
  if (!f.modes.empty()) {
    cfg.modes.clear();
    for (const auto& v : f.modes)
      cfg.modes.push_back(authorsum::text::prefix_mode_from_string(v));
  }
  if (!f.sections.empty()) {
    cfg.sections.clear();
    for (const auto& v : f.sections)
      cfg.sections.push_back(authorsum::corpus::section_from_string(v));
  }
  if (!f.config_path.empty()) {
    ExperimentConfig from_file =
        ExperimentConfig::from_json(authorsum::read_file(f.config_path));
    cfg = from_file;
  }
  cfg.corpus.seed = cfg.seed;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"author-conditioned abstractive summarization workbench"};
  app.require_subcommand(1);

  Flags flags;
  auto* synth = app.add_subcommand("synth-data",
                                   "generate the styled synthetic corpus");
  auto* train = app.add_subcommand("train",
                                   "train section x mode models, score the "
                                   "evaluation split");
  auto* adaptc = app.add_subcommand("adapt",
                                    "select donor embeddings for new authors");
  auto* test = app.add_subcommand("test",
                                  "enroll new authors and score test-adapt");
  auto* project = app.add_subcommand("project",
                                     "t-SNE/PCA of trained author embeddings");
  auto* report = app.add_subcommand("report", "re-render report tables");
  for (auto* cmd : {synth, train, adaptc, test, project, report}) {
    add_common(cmd, flags);
  }

  try {
    app.parse(argc, argv);
    const ExperimentConfig cfg = resolve(flags);
    if (synth->parsed()) authorsum::harness::run_synth(cfg);
    if (train->parsed()) authorsum::harness::run_train(cfg);
    if (adaptc->parsed()) authorsum::harness::run_adapt(cfg);
    if (test->parsed()) authorsum::harness::run_test(cfg);
    if (project->parsed()) authorsum::harness::run_project(cfg);
    if (report->parsed()) std::cout << authorsum::harness::run_report(cfg);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
