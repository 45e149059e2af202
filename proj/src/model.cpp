#include "authorsum/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "json.hpp"

namespace authorsum::model {

using nn::Graph;
using nn::Tensor;
using text::PrefixMode;
using text::TokenSeq;
using text::Vocab;

namespace {

constexpr double kMaskValue = -1e9;

double positional_value(std::size_t pos, std::size_t i, std::size_t d) {
  const double exponent =
      static_cast<double>(2 * (i / 2)) / static_cast<double>(d);
  const double angle =
      static_cast<double>(pos) * std::pow(10000.0, -exponent);
  return (i % 2 == 0) ? std::sin(angle) : std::cos(angle);
}

double gelu_value(double x) {
  return 0.5 * x * (1.0 + std::erf(x * 0.70710678118654752440));
}

}  // namespace

void ModelConfig::validate() const {
  if (d_model <= 0 || n_heads <= 0 || d_model % n_heads != 0) {
    throw std::invalid_argument(
        "config error: d_model " + std::to_string(d_model) +
        " must be a positive multiple of n_heads " + std::to_string(n_heads));
  }
  if (enc_layers < 1 || dec_layers < 1 || d_ff < 1) {
    throw std::invalid_argument("config error: layer sizes must be >= 1");
  }
  if (max_src_len < 2 || max_tgt_len < 2) {
    throw std::invalid_argument("config error: length limits must be >= 2");
  }
  if (vocab_size <= 4) {
    throw std::invalid_argument("config error: vocab_size must exceed 4");
  }
  if (dropout < 0.0 || dropout >= 1.0) {
    throw std::invalid_argument("config error: dropout must be in [0,1)");
  }
}

std::string model_config_to_json(const ModelConfig& cfg) {
  nlohmann::ordered_json j;
  j["d_model"] = cfg.d_model;
  j["n_heads"] = cfg.n_heads;
  j["enc_layers"] = cfg.enc_layers;
  j["dec_layers"] = cfg.dec_layers;
  j["d_ff"] = cfg.d_ff;
  j["max_src_len"] = cfg.max_src_len;
  j["max_tgt_len"] = cfg.max_tgt_len;
  j["vocab_size"] = cfg.vocab_size;
  j["prefix_mode"] = text::to_string(cfg.prefix_mode);
  j["dropout"] = cfg.dropout;
  j["seed"] = cfg.seed;
  return j.dump();
}

ModelConfig model_config_from_json(const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  ModelConfig cfg;
  cfg.d_model = j.at("d_model").get<int>();
  cfg.n_heads = j.at("n_heads").get<int>();
  cfg.enc_layers = j.at("enc_layers").get<int>();
  cfg.dec_layers = j.at("dec_layers").get<int>();
  cfg.d_ff = j.at("d_ff").get<int>();
  cfg.max_src_len = j.at("max_src_len").get<int>();
  cfg.max_tgt_len = j.at("max_tgt_len").get<int>();
  cfg.vocab_size = j.at("vocab_size").get<int>();
  cfg.prefix_mode = text::prefix_mode_from_string(j.at("prefix_mode"));
  cfg.dropout = j.at("dropout").get<double>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  return cfg;
}

struct Linear {
  Tensor w;
  Tensor b;
};

struct Norm {
  Tensor gain;
  Tensor bias;
};

struct Attn {
  Linear q, k, v, o;
};

struct EncLayer {
  Norm ln1;
  Attn attn;
  Norm ln2;
  Linear ff1, ff2;
};

struct DecLayer {
  Norm ln1;
  Attn self;
  Norm ln2;
  Attn cross;
  Norm ln3;
  Linear ff1, ff2;
};

struct Seq2SeqModel::Layers {
  Tensor table;
  std::vector<EncLayer> enc;
  Norm enc_final;
  std::vector<DecLayer> dec;
  Norm dec_final;
};

namespace {

class ParamBuilder {
 public:
  ParamBuilder(std::vector<NamedParam>& out, const Rng& base)
      : out_(out), base_(base) {}

  Tensor weight(const std::string& name, std::size_t r, std::size_t c) {
    Rng stream = base_.child("param." + name);
    Tensor t = Tensor::randn({r, c}, stream, 0.02, true);
    out_.push_back({name, t});
    return t;
  }
  Tensor bias(const std::string& name, std::size_t n) {
    Tensor t = Tensor::zeros({n}, true);
    out_.push_back({name, t});
    return t;
  }
  Norm norm(const std::string& name, std::size_t n) {
    Tensor gain = Tensor::zeros({n}, true);
    std::fill(gain.values().begin(), gain.values().end(), 1.0);
    out_.push_back({name + ".gain", gain});
    Tensor bias = Tensor::zeros({n}, true);
    out_.push_back({name + ".bias", bias});
    return {gain, bias};
  }
  Linear linear(const std::string& name, std::size_t in, std::size_t out_dim) {
    Tensor w = weight(name + ".w", in, out_dim);
    Tensor b = bias(name + ".b", out_dim);
    return {w, b};
  }
  Attn attn(const std::string& name, std::size_t d) {
    // no key bias: softmax is invariant to per-row score shifts, so a key
    // bias would be a dead parameter
    Attn a;
    a.q = linear(name + ".q", d, d);
    a.k = {weight(name + ".k.w", d, d), Tensor()};
    a.v = linear(name + ".v", d, d);
    a.o = linear(name + ".o", d, d);
    return a;
  }

 private:
  std::vector<NamedParam>& out_;
  const Rng& base_;
};

Tensor positional_constant(std::size_t rows, std::size_t d) {
  Tensor pe = Tensor::zeros({rows, d});
  for (std::size_t p = 0; p < rows; ++p)
    for (std::size_t i = 0; i < d; ++i)
      pe.values()[p * d + i] = positional_value(p, i, d);
  return pe;
}

// additive key mask: -1e9 where the key is PAD (and beyond the diagonal
// when causal)
Tensor attention_mask(std::size_t q_rows, const std::vector<int>& key_ids,
                      bool causal) {
  Tensor m = Tensor::zeros({q_rows, key_ids.size()});
  for (std::size_t i = 0; i < q_rows; ++i) {
    for (std::size_t j = 0; j < key_ids.size(); ++j) {
      const bool pad = key_ids[j] == Vocab::kPad;
      const bool future = causal && j > i;
      if (pad || future) m.values()[i * key_ids.size() + j] = kMaskValue;
    }
  }
  return m;
}

Tensor mha(Graph& g, const Tensor& q_in, const Tensor& kv_in, const Attn& p,
           int n_heads, const Tensor& mask) {
  Tensor q = g.add_rowvec(g.matmul(q_in, p.q.w), p.q.b);
  Tensor k = g.matmul(kv_in, p.k.w);
  Tensor v = g.add_rowvec(g.matmul(kv_in, p.v.w), p.v.b);
  const std::size_t d = q.cols();
  const std::size_t dh = d / static_cast<std::size_t>(n_heads);
  const double inv = 1.0 / std::sqrt(static_cast<double>(dh));
  std::vector<Tensor> heads;
  heads.reserve(static_cast<std::size_t>(n_heads));
  for (int h = 0; h < n_heads; ++h) {
    const std::size_t off = static_cast<std::size_t>(h) * dh;
    Tensor qh = g.slice_cols(q, off, dh);
    Tensor kh = g.slice_cols(k, off, dh);
    Tensor vh = g.slice_cols(v, off, dh);
    Tensor s = g.scale(g.matmul(qh, g.transpose(kh)), inv);
    s = g.add(s, mask);
    heads.push_back(g.matmul(g.softmax(s), vh));
  }
  return g.add_rowvec(g.matmul(g.concat_cols(heads), p.o.w), p.o.b);
}

}  // namespace

Seq2SeqModel::Seq2SeqModel(const ModelConfig& config, const Vocab& vocab)
    : config_(config) {
  config_.validate();
  if (config_.vocab_size != vocab.size()) {
    throw std::invalid_argument(
        "config vocab_size " + std::to_string(config_.vocab_size) +
        " does not match vocab size " + std::to_string(vocab.size()));
  }
  const auto d = static_cast<std::size_t>(config_.d_model);
  const auto v = static_cast<std::size_t>(config_.vocab_size);
  const Rng base(config_.seed);
  ParamBuilder pb(params_, base);
  layers_ = std::make_shared<Layers>();
  layers_->table = pb.weight("embed.tokens", v, d);
  for (int i = 0; i < config_.enc_layers; ++i) {
    const std::string p = "enc." + std::to_string(i);
    EncLayer l;
    l.ln1 = pb.norm(p + ".ln1", d);
    l.attn = pb.attn(p + ".attn", d);
    l.ln2 = pb.norm(p + ".ln2", d);
    l.ff1 = pb.linear(p + ".ff1", d, static_cast<std::size_t>(config_.d_ff));
    l.ff2 = pb.linear(p + ".ff2", static_cast<std::size_t>(config_.d_ff), d);
    layers_->enc.push_back(std::move(l));
  }
  layers_->enc_final = pb.norm("enc.final", d);
  for (int i = 0; i < config_.dec_layers; ++i) {
    const std::string p = "dec." + std::to_string(i);
    DecLayer l;
    l.ln1 = pb.norm(p + ".ln1", d);
    l.self = pb.attn(p + ".self", d);
    l.ln2 = pb.norm(p + ".ln2", d);
    l.cross = pb.attn(p + ".cross", d);
    l.ln3 = pb.norm(p + ".ln3", d);
    l.ff1 = pb.linear(p + ".ff1", d, static_cast<std::size_t>(config_.d_ff));
    l.ff2 = pb.linear(p + ".ff2", static_cast<std::size_t>(config_.d_ff), d);
    layers_->dec.push_back(std::move(l));
  }
  layers_->dec_final = pb.norm("dec.final", d);
}

std::vector<Tensor> Seq2SeqModel::parameter_tensors() const {
  std::vector<Tensor> out;
  out.reserve(params_.size());
  for (const auto& p : params_) out.push_back(p.tensor);
  return out;
}

Tensor Seq2SeqModel::embedding_table() const { return layers_->table; }

std::vector<double> Seq2SeqModel::embedding_row(int token_id) const {
  const auto d = static_cast<std::size_t>(config_.d_model);
  if (token_id < 0 ||
      static_cast<std::size_t>(token_id) >= layers_->table.rows()) {
    throw std::out_of_range("embedding_row: token id out of range");
  }
  const double* r = layers_->table.data() + static_cast<std::size_t>(token_id) * d;
  return {r, r + d};
}

void Seq2SeqModel::append_embedding_row(const std::vector<double>& row) {
  layers_->table.append_row(row);
  config_.vocab_size += 1;
}

std::vector<int> Seq2SeqModel::truncate_src(std::vector<int> ids) const {
  if (ids.size() > static_cast<std::size_t>(config_.max_src_len)) {
    ids.resize(static_cast<std::size_t>(config_.max_src_len));
  }
  return ids;
}

Tensor Seq2SeqModel::forward_logits(Graph& g, const std::vector<int>& src_ids_in,
                                    const std::vector<int>& tgt_in_ids,
                                    bool training, Rng* dropout_rng) const {
  const std::vector<int> src_ids = truncate_src(src_ids_in);
  if (src_ids.empty()) throw std::invalid_argument("empty source");
  if (tgt_in_ids.empty()) throw std::invalid_argument("empty decoder input");
  const auto d = static_cast<std::size_t>(config_.d_model);
  const double emb_scale = std::sqrt(static_cast<double>(config_.d_model));
  const double p_drop = training ? config_.dropout : 0.0;
  Rng unused(0);
  Rng& drop = dropout_rng ? *dropout_rng : unused;
  const bool use_drop = training && config_.dropout > 0.0;

  auto maybe_drop = [&](const Tensor& t) {
    return use_drop ? g.dropout(t, p_drop, drop, true) : t;
  };

  // encoder
  Tensor x = g.add(g.scale(g.embedding(layers_->table, src_ids), emb_scale),
                   positional_constant(src_ids.size(), d));
  x = maybe_drop(x);
  const Tensor src_mask = attention_mask(src_ids.size(), src_ids, false);
  for (const auto& l : layers_->enc) {
    Tensor h = g.layer_norm(x, l.ln1.gain, l.ln1.bias);
    x = g.add(x, maybe_drop(mha(g, h, h, l.attn, config_.n_heads, src_mask)));
    h = g.layer_norm(x, l.ln2.gain, l.ln2.bias);
    Tensor f = g.add_rowvec(
        g.matmul(g.gelu(g.add_rowvec(g.matmul(h, l.ff1.w), l.ff1.b)), l.ff2.w),
        l.ff2.b);
    x = g.add(x, maybe_drop(f));
  }
  const Tensor enc_out =
      g.layer_norm(x, layers_->enc_final.gain, layers_->enc_final.bias);

  // decoder (teacher forced)
  Tensor y = g.add(g.scale(g.embedding(layers_->table, tgt_in_ids), emb_scale),
                   positional_constant(tgt_in_ids.size(), d));
  y = maybe_drop(y);
  const Tensor causal_mask =
      attention_mask(tgt_in_ids.size(), tgt_in_ids, true);
  const Tensor cross_mask = attention_mask(tgt_in_ids.size(), src_ids, false);
  for (const auto& l : layers_->dec) {
    Tensor h = g.layer_norm(y, l.ln1.gain, l.ln1.bias);
    y = g.add(y, maybe_drop(mha(g, h, h, l.self, config_.n_heads, causal_mask)));
    h = g.layer_norm(y, l.ln2.gain, l.ln2.bias);
    y = g.add(y, maybe_drop(mha(g, h, enc_out, l.cross, config_.n_heads,
                                cross_mask)));
    h = g.layer_norm(y, l.ln3.gain, l.ln3.bias);
    Tensor f = g.add_rowvec(
        g.matmul(g.gelu(g.add_rowvec(g.matmul(h, l.ff1.w), l.ff1.b)), l.ff2.w),
        l.ff2.b);
    y = g.add(y, maybe_drop(f));
  }
  y = g.layer_norm(y, layers_->dec_final.gain, layers_->dec_final.bias);
  return g.matmul(y, g.transpose(layers_->table));  // tied output projection
}

Tensor Seq2SeqModel::forward_loss(Graph& g, const TokenSeq& src,
                                  const TokenSeq& tgt, bool training,
                                  Rng* dropout_rng) const {
  if (tgt.ids.size() < 2) throw std::invalid_argument("empty tgt");
  std::vector<int> tgt_ids = tgt.ids;
  const std::size_t cap = static_cast<std::size_t>(config_.max_tgt_len) + 2;
  if (tgt_ids.size() > cap) {
    tgt_ids.resize(cap - 1);
    tgt_ids.push_back(Vocab::kEos);
  }
  const std::vector<int> dec_in(tgt_ids.begin(), tgt_ids.end() - 1);
  const std::vector<int> labels(tgt_ids.begin() + 1, tgt_ids.end());
  Tensor logits = forward_logits(g, src.ids, dec_in, training, dropout_rng);
  return g.cross_entropy(logits, labels, Vocab::kPad);
}

// ---------------------------------------------------------------------------
// fast inference path

namespace {

struct Mat {
  std::size_t r = 0, c = 0;
  std::vector<double> v;

  static Mat zeros(std::size_t r_, std::size_t c_) {
    return {r_, c_, std::vector<double>(r_ * c_, 0.0)};
  }
  double* row(std::size_t i) { return v.data() + i * c; }
  const double* row(std::size_t i) const { return v.data() + i * c; }
  void push_row(const double* src) { v.insert(v.end(), src, src + c), ++r; }
};

void linear_into(const double* x, const Linear& lin, double* out) {
  const std::size_t in = lin.w.rows(), on = lin.w.cols();
  const double* w = lin.w.data();
  for (std::size_t j = 0; j < on; ++j) out[j] = 0.0;
  for (std::size_t p = 0; p < in; ++p) {
    const double xv = x[p];
    const double* wp = w + p * on;
    for (std::size_t j = 0; j < on; ++j) out[j] += xv * wp[j];
  }
  if (lin.b.defined()) {
    const double* b = lin.b.data();
    for (std::size_t j = 0; j < on; ++j) out[j] += b[j];
  }
}

Mat linear_mat(const Mat& x, const Linear& lin) {
  Mat out = Mat::zeros(x.r, lin.w.cols());
  for (std::size_t i = 0; i < x.r; ++i) linear_into(x.row(i), lin, out.row(i));
  return out;
}

void layer_norm_row(const double* x, const Norm& n, std::size_t d, double* out) {
  double mean = 0.0;
  for (std::size_t j = 0; j < d; ++j) mean += x[j];
  mean /= static_cast<double>(d);
  double var = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double dv = x[j] - mean;
    var += dv * dv;
  }
  var /= static_cast<double>(d);
  const double inv = 1.0 / std::sqrt(var + nn::kLayerNormEps);
  const double* gain = n.gain.data();
  const double* bias = n.bias.data();
  for (std::size_t j = 0; j < d; ++j)
    out[j] = gain[j] * ((x[j] - mean) * inv) + bias[j];
}

Mat layer_norm_mat(const Mat& x, const Norm& n) {
  Mat out = Mat::zeros(x.r, x.c);
  for (std::size_t i = 0; i < x.r; ++i) layer_norm_row(x.row(i), n, x.c, out.row(i));
  return out;
}

// attention of one query row against cached keys/values, restricted to the
// `live` key positions (softmax over skipped positions is exactly zero in
// the tape path, so restriction preserves the values)
void attend_row(const double* q, const Mat& keys, const Mat& values,
                const std::vector<std::size_t>& live, int n_heads,
                double* out) {
  const std::size_t d = keys.c;
  const std::size_t dh = d / static_cast<std::size_t>(n_heads);
  const double inv = 1.0 / std::sqrt(static_cast<double>(dh));
  std::vector<double> scores(live.size());
  for (int h = 0; h < n_heads; ++h) {
    const std::size_t off = static_cast<std::size_t>(h) * dh;
    for (std::size_t jj = 0; jj < live.size(); ++jj) {
      const double* kr = keys.row(live[jj]) + off;
      double acc = 0.0;
      for (std::size_t p = 0; p < dh; ++p) acc += q[off + p] * kr[p];
      scores[jj] = acc * inv;
    }
    double mx = scores[0];
    for (std::size_t jj = 1; jj < live.size(); ++jj) mx = std::max(mx, scores[jj]);
    double z = 0.0;
    for (std::size_t jj = 0; jj < live.size(); ++jj) {
      scores[jj] = std::exp(scores[jj] - mx);
      z += scores[jj];
    }
    for (std::size_t p = 0; p < dh; ++p) out[off + p] = 0.0;
    for (std::size_t jj = 0; jj < live.size(); ++jj) {
      const double a = scores[jj] / z;
      const double* vr = values.row(live[jj]) + off;
      for (std::size_t p = 0; p < dh; ++p) out[off + p] += a * vr[p];
    }
  }
}

std::vector<std::size_t> all_positions(std::size_t n) {
  std::vector<std::size_t> out(n);
  std::iota(out.begin(), out.end(), 0);
  return out;
}

}  // namespace

struct InferenceSession::Impl {
  const Seq2SeqModel& m;
  const Seq2SeqModel::Layers& L;
  std::size_t d;
  int n_heads;
  Mat enc;                       // final encoder states
  std::vector<std::size_t> live; // non-PAD source positions
  std::vector<Mat> cross_k, cross_v;
  std::vector<Mat> self_k, self_v;
  std::size_t pos = 0;
  std::vector<double> logits;

  Impl(const Seq2SeqModel& model, std::vector<int> src_ids)
      : m(model), L(*model.layers_), d(static_cast<std::size_t>(model.config_.d_model)),
        n_heads(model.config_.n_heads) {
    src_ids = m.truncate_src(std::move(src_ids));
    if (src_ids.empty()) throw std::invalid_argument("empty source");
    for (std::size_t j = 0; j < src_ids.size(); ++j) {
      if (src_ids[j] != Vocab::kPad) live.push_back(j);
    }
    if (live.empty()) throw std::invalid_argument("source is all PAD");
    encode(src_ids);
    const std::size_t s = enc.r;
    for (const auto& l : L.dec) {
      Mat ck = Mat::zeros(s, d), cv = Mat::zeros(s, d);
      for (std::size_t i = 0; i < s; ++i) {
        linear_into(enc.row(i), l.cross.k, ck.row(i));
        linear_into(enc.row(i), l.cross.v, cv.row(i));
      }
      cross_k.push_back(std::move(ck));
      cross_v.push_back(std::move(cv));
      self_k.push_back(Mat{0, d, {}});
      self_v.push_back(Mat{0, d, {}});
    }
    logits.assign(L.table.rows(), 0.0);
  }

  void embed_position(int token, std::size_t p, double* out) const {
    const double scale = std::sqrt(static_cast<double>(d));
    const double* row = L.table.data() + static_cast<std::size_t>(token) * d;
    for (std::size_t i = 0; i < d; ++i)
      out[i] = row[i] * scale + positional_value(p, i, d);
  }

  void encode(const std::vector<int>& src_ids) {
    const std::size_t s = src_ids.size();
    Mat x = Mat::zeros(s, d);
    for (std::size_t i = 0; i < s; ++i) embed_position(src_ids[i], i, x.row(i));
    std::vector<double> tmp(d);
    for (const auto& l : L.enc) {
      Mat h = layer_norm_mat(x, l.ln1);
      Mat q = linear_mat(h, l.attn.q);
      Mat k = linear_mat(h, l.attn.k);
      Mat v = linear_mat(h, l.attn.v);
      for (std::size_t i = 0; i < s; ++i) {
        attend_row(q.row(i), k, v, live, n_heads, tmp.data());
        linear_into(tmp.data(), l.attn.o, h.row(i));  // reuse h as attn out
      }
      for (std::size_t i = 0; i < s * d; ++i) x.v[i] += h.v[i];
      h = layer_norm_mat(x, l.ln2);
      std::vector<double> f1(l.ff1.w.cols());
      std::vector<double> f2(d);
      for (std::size_t i = 0; i < s; ++i) {
        linear_into(h.row(i), l.ff1, f1.data());
        for (double& fv : f1) fv = gelu_value(fv);
        linear_into(f1.data(), l.ff2, f2.data());
        double* xr = x.row(i);
        for (std::size_t j = 0; j < d; ++j) xr[j] += f2[j];
      }
    }
    enc = layer_norm_mat(x, L.enc_final);
  }

  const std::vector<double>& step(int token) {
    if (token < 0 || static_cast<std::size_t>(token) >= L.table.rows()) {
      throw std::out_of_range("step: token id out of range");
    }
    std::vector<double> x(d), h(d), tmp(d), proj(d);
    embed_position(token, pos, x.data());
    for (std::size_t li = 0; li < L.dec.size(); ++li) {
      const auto& l = L.dec[li];
      // causal self-attention over cached positions
      layer_norm_row(x.data(), l.ln1, d, h.data());
      std::vector<double> q(d), k(d), v(d);
      linear_into(h.data(), l.self.q, q.data());
      linear_into(h.data(), l.self.k, k.data());
      linear_into(h.data(), l.self.v, v.data());
      self_k[li].push_row(k.data());
      self_v[li].push_row(v.data());
      attend_row(q.data(), self_k[li], self_v[li],
                 all_positions(self_k[li].r), n_heads, tmp.data());
      linear_into(tmp.data(), l.self.o, proj.data());
      for (std::size_t j = 0; j < d; ++j) x[j] += proj[j];
      // cross attention over live source positions
      layer_norm_row(x.data(), l.ln2, d, h.data());
      linear_into(h.data(), l.cross.q, q.data());
      attend_row(q.data(), cross_k[li], cross_v[li], live, n_heads, tmp.data());
      linear_into(tmp.data(), l.cross.o, proj.data());
      for (std::size_t j = 0; j < d; ++j) x[j] += proj[j];
      // feed forward
      layer_norm_row(x.data(), l.ln3, d, h.data());
      std::vector<double> f1(l.ff1.w.cols());
      linear_into(h.data(), l.ff1, f1.data());
      for (double& fv : f1) fv = gelu_value(fv);
      linear_into(f1.data(), l.ff2, proj.data());
      for (std::size_t j = 0; j < d; ++j) x[j] += proj[j];
    }
    layer_norm_row(x.data(), L.dec_final, d, h.data());
    const std::size_t vsize = L.table.rows();
    logits.resize(vsize);
    const double* tab = L.table.data();
    for (std::size_t t = 0; t < vsize; ++t) {
      const double* tr = tab + t * d;
      double acc = 0.0;
      for (std::size_t p = 0; p < d; ++p) acc += h[p] * tr[p];
      logits[t] = acc;
    }
    ++pos;
    return logits;
  }
};

InferenceSession::InferenceSession(const Seq2SeqModel& model,
                                   std::vector<int> prefixed_src)
    : impl_(std::make_unique<Impl>(model, std::move(prefixed_src))) {}

InferenceSession::~InferenceSession() = default;
InferenceSession::InferenceSession(InferenceSession&&) noexcept = default;

const std::vector<double>& InferenceSession::step(int token_id) {
  return impl_->step(token_id);
}

TokenSeq Seq2SeqModel::generate_greedy(
    const TokenSeq& src, std::optional<int> author_tok,
    const text::AuthorRegistry& registry) const {
  const PrefixMode mode = config_.prefix_mode;
  if (mode == PrefixMode::BASE && author_tok.has_value()) {
    throw std::invalid_argument("BASE mode forbids an author token");
  }
  if (mode != PrefixMode::BASE && !author_tok.has_value()) {
    throw std::invalid_argument("missing author token");
  }

  std::vector<int> enc_input = src.ids;
  if (mode == PrefixMode::ENC || mode == PrefixMode::ENC_DEC) {
    enc_input.insert(enc_input.begin(), *author_tok);
  }
  InferenceSession session(*this, std::move(enc_input));

  std::vector<int> seed = {Vocab::kBos};
  if (mode == PrefixMode::DEC || mode == PrefixMode::ENC_DEC) {
    seed.push_back(*author_tok);
  }
  const std::vector<double>* logits = nullptr;
  for (int t : seed) logits = &session.step(t);

  std::vector<int> raw;
  for (int emitted = 0; emitted < config_.max_tgt_len; ++emitted) {
    int best = 0;
    double best_v = (*logits)[0];
    for (std::size_t j = 1; j < logits->size(); ++j) {
      if ((*logits)[j] > best_v) {  // ties keep the lowest id
        best_v = (*logits)[j];
        best = static_cast<int>(j);
      }
    }
    if (best == Vocab::kEos) break;
    raw.push_back(best);
    if (emitted + 1 >= config_.max_tgt_len) break;
    logits = &session.step(best);
  }

  TokenSeq out;
  out.kind = text::SeqKind::source;
  for (int id : raw) {
    if (id == Vocab::kPad || id == Vocab::kBos || id == Vocab::kEos) continue;
    if (registry.is_author_token(id)) continue;
    out.ids.push_back(id);
  }
  return out;
}

TrainLog train_model(Seq2SeqModel& model, const std::vector<TrainRecord>& dataset,
                     const text::AuthorRegistry& registry, int epochs,
                     int batch_size, nn::Adam& optimizer, const Rng& rng) {
  const PrefixMode mode = model.config().prefix_mode;
  if (mode != PrefixMode::BASE) {
    for (const auto& r : dataset) {
      if (!registry.contains(r.author)) {
        throw std::invalid_argument("unregistered author: " + r.author);
      }
    }
  }
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");

  TrainLog log;
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  for (int e = 0; e < epochs; ++e) {
    Rng shuffle_rng = rng.child("shuffle.e" + std::to_string(e));
    shuffle_rng.shuffle(order);
    Rng drop_rng = rng.child("dropout.e" + std::to_string(e));
    double epoch_loss = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
      const std::size_t end = std::min(order.size(), i + static_cast<std::size_t>(batch_size));
      Graph g;
      Tensor total;
      for (std::size_t b = i; b < end; ++b) {
        const TrainRecord& rec = dataset[order[b]];
        std::optional<int> tok;
        if (mode != PrefixMode::BASE) tok = registry.token_of(rec.author);
        auto [src, tgt] = text::apply_prefix(mode, tok, rec.src, rec.tgt, registry);
        Tensor li = model.forward_loss(g, src, tgt, true, &drop_rng);
        epoch_loss += li.item();
        total = total.defined() ? g.add(total, li) : li;
      }
      Tensor loss = g.scale(total, 1.0 / static_cast<double>(end - i));
      g.backward(loss);
      optimizer.step();
      i = end;
    }
    log.epoch_mean_loss.push_back(
        dataset.empty() ? 0.0 : epoch_loss / static_cast<double>(dataset.size()));
  }
  return log;
}

}  // namespace authorsum::model
