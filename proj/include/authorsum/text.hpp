#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace authorsum::text {

enum class SeqKind { source, target };

struct TokenSeq {
  std::vector<int> ids;
  SeqKind kind = SeqKind::source;

  std::size_t size() const { return ids.size(); }
};

// Where the author token is injected: encoder input, decoder target, both,
// or nowhere.
enum class PrefixMode { BASE, ENC, DEC, ENC_DEC };

const char* to_string(PrefixMode mode);
PrefixMode prefix_mode_from_string(const std::string& s);

/// Token <-> id bijection. Ids are contiguous; the four special ids are
/// fixed and never returned by word lookup. Extension is append-only.
class Vocab {
 public:
  static constexpr int kPad = 0;
  static constexpr int kBos = 1;
  static constexpr int kEos = 2;
  static constexpr int kUnk = 3;

  Vocab();

  int size() const { return static_cast<int>(id_to_token_.size()); }
  // word -> id, UNK when absent
  int lookup(const std::string& word) const;
  bool contains(const std::string& word) const;
  const std::string& token(int id) const;  // throws "unknown id"
  bool is_special(int id) const { return id >= 0 && id <= kUnk; }

  // Appends a token with the next id. Used for author tokens; word tokens
  // go through build_vocab.
  int add_token(const std::string& token);

 private:
  std::unordered_map<std::string, int> token_to_id_;
  std::vector<std::string> id_to_token_;
};

/// Per-author special tokens and embedding-row bookkeeping. The embedding
/// row index equals the token id (shared table).
class AuthorRegistry {
 public:
  bool contains(const std::string& name) const;
  int token_of(const std::string& name) const;  // throws when missing
  int row_of(const std::string& name) const { return token_of(name); }
  bool is_author_token(int id) const { return author_ids_.count(id) > 0; }
  std::size_t size() const { return enrollment_order_.size(); }
  const std::vector<std::string>& enrollment_order() const {
    return enrollment_order_;
  }
  const std::string& name_of(int token_id) const;  // throws when missing

  friend int register_author(Vocab& vocab, AuthorRegistry& registry,
                             const std::string& name);

 private:
  std::unordered_map<std::string, int> author_to_token_;
  std::unordered_map<int, std::string> token_to_author_;
  std::unordered_set<int> author_ids_;
  std::vector<std::string> enrollment_order_;
};

// Lowercases and splits on whitespace and punctuation (anything
// non-alphanumeric separates tokens).
std::vector<std::string> tokenize(const std::string& raw);

// Specials + every word occurring >= min_count times; ids assigned in
// descending frequency, ties broken lexicographically.
Vocab build_vocab(const std::vector<std::string>& corpus_texts, int min_count);

TokenSeq encode_text(const Vocab& vocab, const std::string& raw);    // source
TokenSeq encode_target(const Vocab& vocab, const std::string& raw);  // BOS..EOS

// Space-joined tokens; PAD/BOS/EOS and author tokens are dropped.
std::string decode_tokens(const Vocab& vocab, const TokenSeq& seq,
                          const AuthorRegistry* registry = nullptr);

// Registers a new author token; vocab grows by one and the new id is
// vocab.size()-1 before return.
int register_author(Vocab& vocab, AuthorRegistry& registry,
                    const std::string& name);

// ENC -> src' = [author]+src; DEC -> tgt' = [BOS, author]+rest;
// ENC_DEC -> both; BASE -> unchanged. Applying twice is an error.
std::pair<TokenSeq, TokenSeq> apply_prefix(PrefixMode mode,
                                           std::optional<int> author_tok,
                                           const TokenSeq& src,
                                           const TokenSeq& tgt,
                                           const AuthorRegistry& registry);

std::string author_token_name(const std::string& author);

// JSON persistence: {"specials":{...},"tokens":[...],"authors":{name:id}}
std::string vocab_to_json(const Vocab& vocab, const AuthorRegistry& registry);
std::pair<Vocab, AuthorRegistry> vocab_from_json(const std::string& json_text);
std::uint64_t vocab_hash(const Vocab& vocab, const AuthorRegistry& registry);

}  // namespace authorsum::text
