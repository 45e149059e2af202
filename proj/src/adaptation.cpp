#include "authorsum/adaptation.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include "authorsum/rouge.hpp"
#include "authorsum/util.hpp"
#include "json.hpp"

namespace authorsum::adapt {

using text::PrefixMode;

AdaptDoc make_adapt_doc(const text::Vocab& vocab,
                        const corpus::EncounterRecord& record,
                        corpus::Section section) {
  AdaptDoc doc;
  doc.src = text::encode_text(vocab, record.transcript);
  doc.ref_ids = text::encode_text(vocab, record.notes.at(section)).ids;
  return doc;
}

std::string AuthorSelection::to_json() const {
  nlohmann::ordered_json j;
  j["new_author"] = new_author;
  j["section"] = corpus::to_string(section);
  j["mode"] = text::to_string(mode);
  j["chosen_author"] = chosen_author;
  j["chosen_score"] = chosen_score;
  j["num_docs_used"] = num_docs_used;
  auto scores = nlohmann::ordered_json::object();
  for (const auto& [name, score] : per_candidate_scores) scores[name] = score;
  j["per_candidate_scores"] = std::move(scores);
  return j.dump(2);
}

AuthorSelection AuthorSelection::from_json(const std::string& json_text) {
  const auto j = nlohmann::ordered_json::parse(json_text);
  AuthorSelection s;
  s.new_author = j.at("new_author").get<std::string>();
  s.section = corpus::section_from_string(j.at("section"));
  s.mode = text::prefix_mode_from_string(j.at("mode"));
  s.chosen_author = j.at("chosen_author").get<std::string>();
  s.chosen_score = j.at("chosen_score").get<double>();
  s.num_docs_used = j.at("num_docs_used").get<int>();
  for (const auto& [name, score] : j.at("per_candidate_scores").items()) {
    s.per_candidate_scores.emplace_back(name, score.get<double>());
  }
  return s;
}

ModelGenerator::ModelGenerator(const model::Seq2SeqModel& m,
                               const text::AuthorRegistry& registry)
    : model_(m), registry_(registry) {
  if (m.config().prefix_mode == PrefixMode::BASE) {
    throw std::invalid_argument(
        "adaptation is not applicable to a BASE model");
  }
}

std::vector<int> ModelGenerator::generate(int author_tok,
                                          const text::TokenSeq& src) const {
  return model_.generate_greedy(src, author_tok, registry_).ids;
}

std::vector<double> per_doc_scores(const NoteGenerator& gen, int candidate_tok,
                                   const std::vector<AdaptDoc>& docs) {
  if (docs.empty()) throw std::invalid_argument("no documents");
  std::vector<double> scores(docs.size(), 0.0);
  parallel_for(docs.size(), [&](std::size_t i) {
    const std::vector<int> hyp = gen.generate(candidate_tok, docs[i].src);
    scores[i] = metrics::rouge_n(2, hyp, docs[i].ref_ids).f1;
  });
  return scores;
}

double score_candidate(const NoteGenerator& gen, int candidate_tok,
                       const std::vector<AdaptDoc>& docs) {
  const auto scores = per_doc_scores(gen, candidate_tok, docs);
  double total = 0.0;
  for (double s : scores) total += s;
  return total / static_cast<double>(scores.size());
}

std::pair<std::size_t, double> select_best(
    const std::vector<std::pair<std::string, double>>& candidate_scores) {
  if (candidate_scores.empty()) {
    throw std::invalid_argument("no candidates");
  }
  std::size_t best_idx = 0;
  double best_score = candidate_scores[0].second;
  for (std::size_t i = 1; i < candidate_scores.size(); ++i) {
    if (candidate_scores[i].second > best_score) {  // strict: ties keep the
      best_score = candidate_scores[i].second;      // earlier candidate
      best_idx = i;
    }
  }
  return {best_idx, best_score};
}

ScoreMatrix candidate_score_matrix(const NoteGenerator& gen,
                                   const text::AuthorRegistry& registry,
                                   const std::vector<AdaptDoc>& docs) {
  if (registry.size() == 0) throw std::invalid_argument("empty registry");
  if (docs.empty()) throw std::invalid_argument("no documents");
  ScoreMatrix scores;
  scores.reserve(registry.size());
  for (const auto& name : registry.enrollment_order()) {
    scores.push_back(per_doc_scores(gen, registry.token_of(name), docs));
  }
  return scores;
}

AuthorSelection selection_from_scores(const text::AuthorRegistry& registry,
                                      const ScoreMatrix& scores, int count,
                                      const std::string& new_author,
                                      corpus::Section section,
                                      PrefixMode mode) {
  if (mode == PrefixMode::BASE) {
    throw std::invalid_argument(
        "adaptation is not applicable to a BASE model");
  }
  if (scores.size() != registry.size() || scores.empty()) {
    throw std::invalid_argument("score matrix does not match the registry");
  }
  if (count < 1 || count > static_cast<int>(scores[0].size())) {
    throw std::invalid_argument("doc count outside the scored range");
  }
  AuthorSelection out;
  out.new_author = new_author;
  out.section = section;
  out.mode = mode;
  out.num_docs_used = count;
  for (std::size_t c = 0; c < scores.size(); ++c) {
    double total = 0.0;
    for (int d = 0; d < count; ++d)
      total += scores[c][static_cast<std::size_t>(d)];
    out.per_candidate_scores.emplace_back(registry.enrollment_order()[c],
                                          total / static_cast<double>(count));
  }
  const auto [idx, score] = select_best(out.per_candidate_scores);
  out.chosen_author = out.per_candidate_scores[idx].first;
  out.chosen_score = score;
  return out;
}

namespace {

AuthorSelection run_selection(const NoteGenerator& gen,
                              const text::AuthorRegistry& registry,
                              const std::vector<AdaptDoc>& docs,
                              const std::string& new_author,
                              corpus::Section section, PrefixMode mode) {
  if (mode == PrefixMode::BASE) {
    throw std::invalid_argument(
        "adaptation is not applicable to a BASE model");
  }
  const ScoreMatrix scores = candidate_score_matrix(gen, registry, docs);
  return selection_from_scores(registry, scores,
                               static_cast<int>(docs.size()), new_author,
                               section, mode);
}

}  // namespace

AuthorSelection adapt_author(const NoteGenerator& gen,
                             const text::AuthorRegistry& registry,
                             const std::vector<AdaptDoc>& docs,
                             const std::string& new_author,
                             corpus::Section section, PrefixMode mode) {
  return run_selection(gen, registry, docs, new_author, section, mode);
}

AuthorSelection oracle_select(const NoteGenerator& gen,
                              const text::AuthorRegistry& registry,
                              const std::vector<AdaptDoc>& test_docs,
                              const std::string& new_author,
                              corpus::Section section, PrefixMode mode) {
  return run_selection(gen, registry, test_docs, new_author, section, mode);
}

std::string StabilityTable::to_json() const {
  nlohmann::ordered_json j;
  j["doc_counts"] = doc_counts;
  j["full_count"] = full_count;
  j["n_new_authors"] = n_new_authors;
  auto rows_j = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    rows_j.push_back({{"section", corpus::to_string(r.section)},
                      {"mode", text::to_string(r.mode)},
                      {"changed", r.changed}});
  }
  j["rows"] = std::move(rows_j);
  return j.dump(2);
}

std::string StabilityTable::to_csv(std::uint64_t config_hash,
                                   std::uint64_t seed) const {
  std::string out = "section,mode,doc_count,changed,new_authors\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < doc_counts.size(); ++i) {
      out += std::string(corpus::to_string(r.section)) + "," +
             text::to_string(r.mode) + "," + std::to_string(doc_counts[i]) +
             "," + std::to_string(r.changed[i]) + "," +
             std::to_string(n_new_authors) + "\n";
    }
  }
  char meta[64];
  std::snprintf(meta, sizeof(meta), "# config=0x%016llx seed=%llu\n",
                static_cast<unsigned long long>(config_hash),
                static_cast<unsigned long long>(seed));
  return out + meta;
}

StabilityRow stability_row(
    const NoteGenerator& gen, const text::AuthorRegistry& registry,
    const std::map<std::string, std::vector<AdaptDoc>>& docs_by_author,
    const std::vector<int>& doc_counts, int full_count,
    corpus::Section section, PrefixMode mode) {
  if (full_count < 1) throw std::invalid_argument("full_count must be >= 1");
  for (int c : doc_counts) {
    if (c < 1 || c > full_count) {
      throw std::invalid_argument("doc count " + std::to_string(c) +
                                  " outside [1, full_count]");
    }
  }
  StabilityRow row;
  row.section = section;
  row.mode = mode;
  row.changed.assign(doc_counts.size(), 0);

  for (const auto& [author, docs] : docs_by_author) {
    if (static_cast<int>(docs.size()) < full_count) {
      throw std::invalid_argument("insufficient docs for author " + author +
                                  ": have " + std::to_string(docs.size()) +
                                  ", need " + std::to_string(full_count));
    }
    // per-candidate per-doc scores on the full fixed order; subset
    // selections reuse prefix means
    const ScoreMatrix scores = candidate_score_matrix(gen, registry, docs);
    auto selection_at = [&](int count) {
      return selection_from_scores(registry, scores, count, author, section,
                                   mode)
          .chosen_author;
    };
    const std::string full_sel = selection_at(full_count);
    for (std::size_t i = 0; i < doc_counts.size(); ++i) {
      if (selection_at(doc_counts[i]) != full_sel) ++row.changed[i];
    }
  }
  return row;
}

int enroll_author(model::Seq2SeqModel& m, text::Vocab& vocab,
                  text::AuthorRegistry& registry, const std::string& new_name,
                  const AuthorSelection& selection) {
  if (m.config().prefix_mode == PrefixMode::BASE) {
    throw std::invalid_argument("enrollment is not applicable to a BASE model");
  }
  if (registry.contains(new_name)) {
    throw std::invalid_argument("author exists: " + new_name);
  }
  const int donor_tok = registry.token_of(selection.chosen_author);
  const std::vector<double> row = m.embedding_row(donor_tok);
  const int id = text::register_author(vocab, registry, new_name);
  m.append_embedding_row(row);
  if (m.config().vocab_size != vocab.size() ||
      id != m.config().vocab_size - 1) {
    throw std::logic_error("enrollment left vocab and model out of sync");
  }
  return id;
}

}  // namespace authorsum::adapt
