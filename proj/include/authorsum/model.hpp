#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "authorsum/optim.hpp"
#include "authorsum/rng.hpp"
#include "authorsum/tensor.hpp"
#include "authorsum/text.hpp"

namespace authorsum::model {

struct ModelConfig {
  int d_model = 64;
  int n_heads = 4;
  int enc_layers = 2;
  int dec_layers = 2;
  int d_ff = 128;
  int max_src_len = 256;
  int max_tgt_len = 64;
  int vocab_size = 0;
  text::PrefixMode prefix_mode = text::PrefixMode::BASE;
  double dropout = 0.1;
  std::uint64_t seed = 0;

  void validate() const;  // throws on invalid combinations
  bool operator==(const ModelConfig&) const = default;
};

std::string model_config_to_json(const ModelConfig& cfg);
ModelConfig model_config_from_json(const std::string& json_text);

struct NamedParam {
  std::string name;
  nn::Tensor tensor;
};

class Seq2SeqModel;

/// Incremental greedy-decoding state for one source sequence: the encoder
/// runs once, decoder keys/values are cached per step, and cross-attention
/// keys/values are computed once. Produces logits identical to the
/// training-tape forward pass.
class InferenceSession {
 public:
  InferenceSession(const Seq2SeqModel& model, std::vector<int> prefixed_src);
  ~InferenceSession();
  InferenceSession(InferenceSession&&) noexcept;

  // feeds one decoder token, returns logits for the next position
  const std::vector<double>& step(int token_id);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Desk-scale encoder-decoder transformer with a shared token-embedding
/// table (author rows included), sinusoidal positions, pre-norm layers and
/// output projection tied to the embedding table.
class Seq2SeqModel {
 public:
  Seq2SeqModel(const ModelConfig& config, const text::Vocab& vocab);

  const ModelConfig& config() const { return config_; }
  const std::vector<NamedParam>& parameters() const { return params_; }
  std::vector<nn::Tensor> parameter_tensors() const;
  nn::Tensor embedding_table() const;
  std::vector<double> embedding_row(int token_id) const;
  void append_embedding_row(const std::vector<double>& row);

  // Teacher-forced logits over decoder input positions. Inputs must
  // already carry any author prefix; sequences beyond the length limits
  // are tail-truncated.
  nn::Tensor forward_logits(nn::Graph& g, const std::vector<int>& src_ids,
                            const std::vector<int>& tgt_in_ids,
                            bool training = false,
                            Rng* dropout_rng = nullptr) const;

  nn::Tensor forward_loss(nn::Graph& g, const text::TokenSeq& src,
                          const text::TokenSeq& tgt, bool training = false,
                          Rng* dropout_rng = nullptr) const;

  // Greedy decoding; applies the ENC prefix itself and seeds the decoder
  // per prefix mode. The result excludes BOS/EOS/PAD and author tokens.
  text::TokenSeq generate_greedy(const text::TokenSeq& src,
                                 std::optional<int> author_tok,
                                 const text::AuthorRegistry& registry) const;

 private:
  friend class InferenceSession;
  struct Layers;

  std::vector<int> truncate_src(std::vector<int> ids) const;

  ModelConfig config_;
  std::vector<NamedParam> params_;
  std::shared_ptr<Layers> layers_;  // structured views over params_
};

struct TrainRecord {
  text::TokenSeq src;
  text::TokenSeq tgt;
  std::string author;
};

struct TrainLog {
  std::vector<double> epoch_mean_loss;
};

// Shuffles per epoch with a seeded stream, applies prefixes per the model
// mode and updates parameters in place.
TrainLog train_model(Seq2SeqModel& model,
                     const std::vector<TrainRecord>& dataset,
                     const text::AuthorRegistry& registry, int epochs,
                     int batch_size, nn::Adam& optimizer, const Rng& rng);

}  // namespace authorsum::model
