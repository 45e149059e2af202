#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "authorsum/rng.hpp"

namespace authorsum::corpus {

enum class Section { HPI, PE, AP };
constexpr std::array<Section, 3> kAllSections = {Section::HPI, Section::PE,
                                                 Section::AP};
const char* to_string(Section s);
Section section_from_string(const std::string& s);

enum class PronounMode { gendered, neutral };

struct TriggerRule {
  std::string phrase;       // dictation fragment appearing in the transcript
  Section section;          // note section receiving the boilerplate
  std::string boilerplate;  // standard sentence forced into that section

  bool operator==(const TriggerRule&) const = default;
};

struct ImplicitPhrase {
  Section section;
  std::string text;  // note sentence with no transcript evidence

  bool operator==(const ImplicitPhrase&) const = default;
};

/// Author style parameters. Profiles within one hospital share the
/// hospital base style; per-author slots are personalized in proportion to
/// style_divergence, capped so any two colleagues still share at least
/// half of their inventory.
struct StyleProfile {
  std::string author;
  std::string hospital;
  std::vector<TriggerRule> trigger_lexicon;
  PronounMode pronoun_mode = PronounMode::neutral;
  std::map<Section, std::vector<std::string>> section_templates;
  double smalltalk_rate = 0.3;
  std::vector<ImplicitPhrase> implicit_phrases;
  double noise_rate = 0.1;  // ASR-like word drop/substitution
};

struct EncounterRecord {
  std::string id;
  std::string author;
  std::string transcript;  // un-diarized, no speaker tags
  std::map<Section, std::string> notes;
  std::uint64_t seed = 0;
};

struct SplitCounts {
  int train_per_author = 15;
  int val_per_author = 2;
  int eval_per_author = 3;
  int adapt_per_author = 10;
  int test_adapt_per_author = 40;
};

struct CorpusConfig {
  int n_train_authors = 12;
  int n_hospitals = 4;
  int n_new_authors = 4;
  double new_author_shared_fraction = 0.75;
  double style_divergence = 0.7;
  double noise_rate = 0.1;
  SplitCounts counts;
  std::uint64_t seed = 42;

  // Table-1-like split topology (author/hospital counts, 20 adapt docs)
  static CorpusConfig paper_shaped();
};

struct DatasetSplits {
  std::vector<EncounterRecord> train;
  std::vector<EncounterRecord> validation;
  std::vector<EncounterRecord> evaluation;
  std::vector<EncounterRecord> adapt;
  std::vector<EncounterRecord> test_adapt;
  std::vector<std::string> train_authors;
  std::vector<std::string> new_authors;
};

// Training population: hospitals assigned round-robin, hospital base style
// perturbed per author in proportion to style_divergence.
std::vector<StyleProfile> make_profiles(int n_authors, int n_hospitals,
                                        double style_divergence,
                                        std::uint64_t seed);

// Unseen-author profiles: a configurable fraction shares a hospital (and
// its base style) with the training population, the rest come from fresh
// hospitals.
std::vector<StyleProfile> make_new_author_profiles(
    const std::vector<StyleProfile>& train_profiles, int n_new,
    double shared_fraction, double style_divergence, std::uint64_t seed);

// Pure function of (profile, seed).
EncounterRecord synth_encounter(const StyleProfile& profile,
                                std::uint64_t seed);

// `profiles` holds train authors first, then the n_new_authors unseen ones.
DatasetSplits make_splits(const std::vector<StyleProfile>& profiles,
                          int n_new_authors, const SplitCounts& counts,
                          std::uint64_t seed);

struct Corpus {
  std::vector<StyleProfile> profiles;
  DatasetSplits splits;
};

Corpus build_corpus(const CorpusConfig& config);

// all transcript and note text of every split, for vocabulary construction
std::vector<std::string> all_texts(const DatasetSplits& splits);

// JSON-lines persistence; one record per line plus a leading _meta object
std::string records_to_jsonl(const DatasetSplits& splits,
                             std::uint64_t config_hash, std::uint64_t seed);
std::string splits_manifest_json(const DatasetSplits& splits,
                                 std::uint64_t config_hash,
                                 std::uint64_t seed);
DatasetSplits dataset_from_files(const std::string& jsonl_text,
                                 const std::string& manifest_text);

}  // namespace authorsum::corpus
