#include "authorsum/text.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <stdexcept>

#include "authorsum/rng.hpp"
#include "json.hpp"

namespace authorsum::text {

const char* to_string(PrefixMode mode) {
  switch (mode) {
    case PrefixMode::BASE: return "BASE";
    case PrefixMode::ENC: return "ENC";
    case PrefixMode::DEC: return "DEC";
    case PrefixMode::ENC_DEC: return "ENC_DEC";
  }
  return "?";
}

PrefixMode prefix_mode_from_string(const std::string& s) {
  if (s == "BASE") return PrefixMode::BASE;
  if (s == "ENC") return PrefixMode::ENC;
  if (s == "DEC") return PrefixMode::DEC;
  if (s == "ENC_DEC" || s == "ENC+DEC") return PrefixMode::ENC_DEC;
  throw std::invalid_argument("unknown prefix mode: " + s);
}

Vocab::Vocab() {
  id_to_token_ = {"<pad>", "<bos>", "<eos>", "<unk>"};
  for (int i = 0; i < 4; ++i) token_to_id_[id_to_token_[i]] = i;
}

int Vocab::lookup(const std::string& word) const {
  auto it = token_to_id_.find(word);
  if (it == token_to_id_.end() || is_special(it->second)) return kUnk;
  return it->second;
}

bool Vocab::contains(const std::string& word) const {
  auto it = token_to_id_.find(word);
  return it != token_to_id_.end() && !is_special(it->second);
}

const std::string& Vocab::token(int id) const {
  if (id < 0 || id >= size()) {
    throw std::out_of_range("unknown id: " + std::to_string(id));
  }
  return id_to_token_[static_cast<std::size_t>(id)];
}

int Vocab::add_token(const std::string& token) {
  if (token_to_id_.count(token)) {
    throw std::invalid_argument("token exists: " + token);
  }
  const int id = size();
  token_to_id_[token] = id;
  id_to_token_.push_back(token);
  return id;
}

bool AuthorRegistry::contains(const std::string& name) const {
  return author_to_token_.count(name) > 0;
}

int AuthorRegistry::token_of(const std::string& name) const {
  auto it = author_to_token_.find(name);
  if (it == author_to_token_.end()) {
    throw std::out_of_range("unregistered author: " + name);
  }
  return it->second;
}

const std::string& AuthorRegistry::name_of(int token_id) const {
  auto it = token_to_author_.find(token_id);
  if (it == token_to_author_.end()) {
    throw std::out_of_range("no author for token id " + std::to_string(token_id));
  }
  return it->second;
}

std::vector<std::string> tokenize(const std::string& raw) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : raw) {
    if (std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

Vocab build_vocab(const std::vector<std::string>& corpus_texts, int min_count) {
  if (min_count < 1) throw std::invalid_argument("min_count must be >= 1");
  std::map<std::string, long> counts;
  for (const auto& t : corpus_texts) {
    for (auto& w : tokenize(t)) ++counts[w];
  }
  if (counts.empty()) throw std::runtime_error("empty corpus");

  std::vector<std::pair<std::string, long>> words(counts.begin(), counts.end());
  std::stable_sort(words.begin(), words.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  Vocab vocab;
  for (const auto& [word, count] : words) {
    if (count >= min_count) vocab.add_token(word);
  }
  return vocab;
}

TokenSeq encode_text(const Vocab& vocab, const std::string& raw) {
  TokenSeq seq;
  seq.kind = SeqKind::source;
  for (const auto& w : tokenize(raw)) seq.ids.push_back(vocab.lookup(w));
  return seq;
}

TokenSeq encode_target(const Vocab& vocab, const std::string& raw) {
  TokenSeq seq;
  seq.kind = SeqKind::target;
  seq.ids.push_back(Vocab::kBos);
  for (const auto& w : tokenize(raw)) seq.ids.push_back(vocab.lookup(w));
  seq.ids.push_back(Vocab::kEos);
  return seq;
}

std::string decode_tokens(const Vocab& vocab, const TokenSeq& seq,
                          const AuthorRegistry* registry) {
  std::string out;
  for (int id : seq.ids) {
    if (id < 0 || id >= vocab.size()) {
      throw std::out_of_range("unknown id: " + std::to_string(id));
    }
    if (id == Vocab::kPad || id == Vocab::kBos || id == Vocab::kEos) continue;
    if (registry && registry->is_author_token(id)) continue;
    if (!out.empty()) out.push_back(' ');
    out += vocab.token(id);
  }
  return out;
}

std::string author_token_name(const std::string& author) {
  return "<author:" + author + ">";
}

int register_author(Vocab& vocab, AuthorRegistry& registry,
                    const std::string& name) {
  if (registry.contains(name)) {
    throw std::invalid_argument("author exists: " + name);
  }
  const int id = vocab.add_token(author_token_name(name));
  registry.author_to_token_[name] = id;
  registry.token_to_author_[id] = name;
  registry.author_ids_.insert(id);
  registry.enrollment_order_.push_back(name);
  return id;
}

std::pair<TokenSeq, TokenSeq> apply_prefix(PrefixMode mode,
                                           std::optional<int> author_tok,
                                           const TokenSeq& src,
                                           const TokenSeq& tgt,
                                           const AuthorRegistry& registry) {
  if (mode == PrefixMode::BASE) {
    if (author_tok.has_value()) {
      throw std::invalid_argument("BASE mode forbids an author token");
    }
    return {src, tgt};
  }
  if (!author_tok.has_value()) {
    throw std::invalid_argument("missing author token");
  }
  if (!src.ids.empty() && registry.is_author_token(src.ids.front())) {
    throw std::logic_error("apply_prefix: source already prefixed");
  }
  if (tgt.ids.size() > 1 && registry.is_author_token(tgt.ids[1])) {
    throw std::logic_error("apply_prefix: target already prefixed");
  }

  TokenSeq src_out = src;
  TokenSeq tgt_out = tgt;
  if (mode == PrefixMode::ENC || mode == PrefixMode::ENC_DEC) {
    src_out.ids.insert(src_out.ids.begin(), *author_tok);
  }
  if (mode == PrefixMode::DEC || mode == PrefixMode::ENC_DEC) {
    if (tgt.ids.empty() || tgt.ids.front() != Vocab::kBos) {
      throw std::invalid_argument("target must begin with BOS");
    }
    tgt_out.ids.insert(tgt_out.ids.begin() + 1, *author_tok);
  }
  return {src_out, tgt_out};
}

std::string vocab_to_json(const Vocab& vocab, const AuthorRegistry& registry) {
  nlohmann::ordered_json j;
  j["specials"] = {{"pad", Vocab::kPad},
                   {"bos", Vocab::kBos},
                   {"eos", Vocab::kEos},
                   {"unk", Vocab::kUnk}};
  auto tokens = nlohmann::ordered_json::array();
  for (int i = 0; i < vocab.size(); ++i) tokens.push_back(vocab.token(i));
  j["tokens"] = std::move(tokens);
  auto authors = nlohmann::ordered_json::object();
  for (const auto& name : registry.enrollment_order()) {
    authors[name] = registry.token_of(name);
  }
  j["authors"] = std::move(authors);
  return j.dump(2);
}

std::pair<Vocab, AuthorRegistry> vocab_from_json(const std::string& json_text) {
  const auto j = nlohmann::ordered_json::parse(json_text);
  Vocab vocab;
  AuthorRegistry registry;
  const auto& tokens = j.at("tokens");
  std::vector<std::pair<std::string, int>> authors_by_id;
  for (const auto& [name, id] : j.at("authors").items()) {
    authors_by_id.emplace_back(name, id.get<int>());
  }
  // authors are appended in id order to reproduce enrollment order
  std::sort(authors_by_id.begin(), authors_by_id.end(),
            [](const auto& a, const auto& b) { return a.second < b.second; });
  std::size_t next_author = 0;
  for (std::size_t i = 4; i < tokens.size(); ++i) {
    const std::string tok = tokens[i].get<std::string>();
    if (next_author < authors_by_id.size() &&
        static_cast<int>(i) == authors_by_id[next_author].second) {
      const int id = register_author(vocab, registry,
                                     authors_by_id[next_author].first);
      if (id != static_cast<int>(i) || tok != vocab.token(id)) {
        throw std::runtime_error("vocab json: inconsistent author entry");
      }
      ++next_author;
    } else {
      vocab.add_token(tok);
    }
  }
  if (next_author != authors_by_id.size()) {
    throw std::runtime_error("vocab json: author ids out of range");
  }
  return {std::move(vocab), std::move(registry)};
}

std::uint64_t vocab_hash(const Vocab& vocab, const AuthorRegistry& registry) {
  return fnv1a64(vocab_to_json(vocab, registry));
}

}  // namespace authorsum::text
