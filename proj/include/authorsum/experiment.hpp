#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "authorsum/corpus.hpp"
#include "authorsum/model.hpp"
#include "authorsum/projection.hpp"
#include "authorsum/text.hpp"

namespace authorsum::harness {

struct TrainParams {
  int epochs = 16;
  int batch_size = 8;
  double lr = 1e-3;
  int warmup_steps = 100;
};

/// One experiment = the paper-style three phases (train, adapt, test) plus
/// synthesis and projection, all derived from a single seed. Every
/// artifact lands under outdir and embeds the config hash.
struct ExperimentConfig {
  std::uint64_t seed = 42;
  std::string outdir = "out";
  corpus::CorpusConfig corpus;
  int d_model = 64;
  int n_heads = 4;
  int enc_layers = 2;
  int dec_layers = 2;
  int d_ff = 128;
  int max_src_len = 120;
  int max_tgt_len = 56;
  double dropout = 0.0;
  int min_count = 1;
  TrainParams train;
  std::vector<corpus::Section> sections = {corpus::Section::HPI,
                                           corpus::Section::PE,
                                           corpus::Section::AP};
  std::vector<text::PrefixMode> modes = {
      text::PrefixMode::BASE, text::PrefixMode::ENC, text::PrefixMode::DEC,
      text::PrefixMode::ENC_DEC};
  std::vector<int> stability_doc_counts = {1, 5, 10, 15};
  double tsne_perplexity = 5.0;
  int tsne_iterations = 1000;
  double tsne_learning_rate = 100.0;

  std::string to_json() const;
  static ExperimentConfig from_json(const std::string& json_text);
  std::uint64_t config_hash() const;

  std::filesystem::path dir(const std::string& sub) const;
  std::filesystem::path checkpoint_stem(corpus::Section s,
                                        text::PrefixMode m) const;
  std::filesystem::path selection_path(corpus::Section s, text::PrefixMode m,
                                       const std::string& author) const;

  model::ModelConfig model_config(corpus::Section s, text::PrefixMode m,
                                  int vocab_size) const;
};

// training + evaluation-split report (Table-2 analog)
void run_train(const ExperimentConfig& cfg);
// Algorithm-1 selections + stability table (Table-3 analog)
void run_adapt(const ExperimentConfig& cfg);
// enrollment, test-adapt report, per-author stats, oracle and relative
// improvement reports (Tables 4/5/6 analogs)
void run_test(const ExperimentConfig& cfg);
// corpus synthesis + vocabulary
void run_synth(const ExperimentConfig& cfg);
// t-SNE / PCA of the trained DEC author embeddings (Figure-1 analog)
void run_project(const ExperimentConfig& cfg);
// regenerates the human-readable summary from existing CSV artifacts
std::string run_report(const ExperimentConfig& cfg);

// shared loaders
struct LoadedData {
  text::Vocab vocab;
  text::AuthorRegistry registry;
  corpus::DatasetSplits splits;
  std::map<std::string, std::string> hospital_of;
};
LoadedData load_data(const ExperimentConfig& cfg);

}  // namespace authorsum::harness
