#pragma once

#include <map>
#include <string>
#include <vector>

#include "authorsum/corpus.hpp"
#include "authorsum/model.hpp"
#include "authorsum/text.hpp"

namespace authorsum::adapt {

struct AdaptDoc {
  text::TokenSeq src;        // transcript ids, no prefix applied
  std::vector<int> ref_ids;  // reference note ids, specials stripped
};

AdaptDoc make_adapt_doc(const text::Vocab& vocab,
                        const corpus::EncounterRecord& record,
                        corpus::Section section);

/// Output of the embedding-selection algorithm for one new author and one
/// (section, mode) model. chosen_author is the earliest enrollment-order
/// candidate attaining the maximum mean ROUGE-2 F1.
struct AuthorSelection {
  std::string new_author;
  corpus::Section section = corpus::Section::HPI;
  text::PrefixMode mode = text::PrefixMode::ENC;
  std::string chosen_author;
  double chosen_score = 0.0;
  std::vector<std::pair<std::string, double>> per_candidate_scores;
  int num_docs_used = 0;

  std::string to_json() const;
  static AuthorSelection from_json(const std::string& json_text);
};

class NoteGenerator {
 public:
  virtual ~NoteGenerator() = default;
  virtual std::vector<int> generate(int author_tok,
                                    const text::TokenSeq& src) const = 0;
};

/// Greedy generation through a trained conditioned model.
class ModelGenerator : public NoteGenerator {
 public:
  ModelGenerator(const model::Seq2SeqModel& m,
                 const text::AuthorRegistry& registry);
  std::vector<int> generate(int author_tok,
                            const text::TokenSeq& src) const override;

 private:
  const model::Seq2SeqModel& model_;
  const text::AuthorRegistry& registry_;
};

// ROUGE-2 F1 of the candidate's generation against each doc's reference.
// Doc evaluations fan out across threads; results keep doc order.
std::vector<double> per_doc_scores(const NoteGenerator& gen, int candidate_tok,
                                   const std::vector<AdaptDoc>& docs);

// arithmetic mean of per_doc_scores; errors on empty docs
double score_candidate(const NoteGenerator& gen, int candidate_tok,
                       const std::vector<AdaptDoc>& docs);

// Selection core: candidates arrive as (name, mean score) in enrollment
// order; strictly greater scores win, so ties keep the earlier candidate.
std::pair<std::size_t, double> select_best(
    const std::vector<std::pair<std::string, double>>& candidate_scores);

// score matrix indexed [candidate (enrollment order)][doc]
using ScoreMatrix = std::vector<std::vector<double>>;

ScoreMatrix candidate_score_matrix(const NoteGenerator& gen,
                                   const text::AuthorRegistry& registry,
                                   const std::vector<AdaptDoc>& docs);

// selection over the mean of the first `count` docs of each candidate row
AuthorSelection selection_from_scores(const text::AuthorRegistry& registry,
                                      const ScoreMatrix& scores, int count,
                                      const std::string& new_author,
                                      corpus::Section section,
                                      text::PrefixMode mode);

AuthorSelection adapt_author(const NoteGenerator& gen,
                             const text::AuthorRegistry& registry,
                             const std::vector<AdaptDoc>& docs,
                             const std::string& new_author,
                             corpus::Section section, text::PrefixMode mode);

// Identical procedure scored on the test split (upper-bound selection).
AuthorSelection oracle_select(const NoteGenerator& gen,
                              const text::AuthorRegistry& registry,
                              const std::vector<AdaptDoc>& test_docs,
                              const std::string& new_author,
                              corpus::Section section, text::PrefixMode mode);

struct StabilityRow {
  corpus::Section section = corpus::Section::HPI;
  text::PrefixMode mode = text::PrefixMode::ENC;
  std::vector<int> changed;  // parallel to StabilityTable::doc_counts
};

/// Table-3 analog: cell = number of new authors whose selection at the
/// reduced doc count differs from the full-count selection.
struct StabilityTable {
  std::vector<int> doc_counts;
  int full_count = 0;
  int n_new_authors = 0;
  std::vector<StabilityRow> rows;

  std::string to_json() const;
  std::string to_csv(std::uint64_t config_hash, std::uint64_t seed) const;
};

// One (section, mode) row. Docs per author must hold at least full_count
// entries in a fixed, seeded order; subsets are prefixes of that order.
StabilityRow stability_row(
    const NoteGenerator& gen, const text::AuthorRegistry& registry,
    const std::map<std::string, std::vector<AdaptDoc>>& docs_by_author,
    const std::vector<int>& doc_counts, int full_count,
    corpus::Section section, text::PrefixMode mode);

// Registers the new author token with an embedding row copied from the
// selected donor. Returns the new token id.
int enroll_author(model::Seq2SeqModel& m, text::Vocab& vocab,
                  text::AuthorRegistry& registry, const std::string& new_name,
                  const AuthorSelection& selection);

}  // namespace authorsum::adapt
