#include "authorsum/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <stdexcept>

#include "authorsum/util.hpp"
#include "json.hpp"

namespace authorsum::harness {

static_assert(std::endian::native == std::endian::little,
              "checkpoint blobs are little-endian");

namespace {
constexpr int kFormatVersion = 1;

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof(buf), "0x%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}
}  // namespace

void save_checkpoint(const model::Seq2SeqModel& m, const text::Vocab& vocab,
                     const text::AuthorRegistry& registry,
                     const std::filesystem::path& stem,
                     std::uint64_t experiment_hash, std::uint64_t seed) {
  nlohmann::ordered_json manifest;
  manifest["format_version"] = kFormatVersion;
  manifest["config"] =
      nlohmann::ordered_json::parse(model_config_to_json(m.config()));
  manifest["vocab_hash"] = hex64(text::vocab_hash(vocab, registry));
  manifest["experiment_config"] = hex64(experiment_hash);
  manifest["seed"] = seed;

  std::string blob;
  auto params = nlohmann::ordered_json::array();
  for (const auto& p : m.parameters()) {
    params.push_back({{"name", p.name}, {"shape", p.tensor.shape()}});
    const auto& values = p.tensor.values();
    const std::size_t at = blob.size();
    blob.resize(at + values.size() * sizeof(double));
    std::memcpy(blob.data() + at, values.data(),
                values.size() * sizeof(double));
  }
  manifest["params"] = std::move(params);
  manifest["blob_bytes"] = blob.size();

  write_file_atomic(stem.string() + ".json", manifest.dump(2) + "\n");
  write_file_atomic(stem.string() + ".bin", blob);
}

model::Seq2SeqModel load_checkpoint(
    const std::filesystem::path& stem, const text::Vocab& vocab,
    const text::AuthorRegistry& registry,
    const std::optional<model::ModelConfig>& expected_config) {
  nlohmann::ordered_json manifest;
  try {
    manifest = nlohmann::ordered_json::parse(read_file(stem.string() + ".json"));
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("corrupted checkpoint manifest " + stem.string() +
                             ".json: " + e.what());
  }
  if (manifest.at("format_version").get<int>() != kFormatVersion) {
    throw std::runtime_error(
        "unsupported checkpoint format version " +
        manifest.at("format_version").dump());
  }
  const std::string stored_hash = manifest.at("vocab_hash").get<std::string>();
  if (stored_hash != hex64(text::vocab_hash(vocab, registry))) {
    throw std::runtime_error("vocabulary drift: checkpoint " + stem.string() +
                             " was saved against a different vocabulary");
  }
  const model::ModelConfig cfg =
      model::model_config_from_json(manifest.at("config").dump());
  if (expected_config.has_value() && !(cfg == *expected_config)) {
    throw std::runtime_error(
        "checkpoint config mismatch (shape error): stored d_model " +
        std::to_string(cfg.d_model) + ", expected " +
        std::to_string(expected_config->d_model));
  }

  model::Seq2SeqModel m(cfg, vocab);

  std::size_t expected_bytes = 0;
  const auto& params_meta = manifest.at("params");
  if (params_meta.size() != m.parameters().size()) {
    throw std::runtime_error("checkpoint parameter list mismatch");
  }
  for (std::size_t i = 0; i < params_meta.size(); ++i) {
    const auto& meta = params_meta[i];
    const auto& p = m.parameters()[i];
    if (meta.at("name").get<std::string>() != p.name ||
        meta.at("shape").get<std::vector<std::size_t>>() != p.tensor.shape()) {
      throw std::runtime_error("checkpoint shape mismatch for parameter " +
                               p.name);
    }
    expected_bytes += p.tensor.size() * sizeof(double);
  }
  if (manifest.at("blob_bytes").get<std::size_t>() != expected_bytes) {
    throw std::runtime_error("checkpoint blob size mismatch: manifest says " +
                             manifest.at("blob_bytes").dump() + ", expected " +
                             std::to_string(expected_bytes));
  }
  const std::string blob = read_file(stem.string() + ".bin");
  if (blob.size() != expected_bytes) {
    throw std::runtime_error(
        "checkpoint blob truncated: expected " +
        std::to_string(expected_bytes) + " bytes, found " +
        std::to_string(blob.size()));
  }
  std::size_t at = 0;
  for (const auto& p : m.parameters()) {
    nn::Tensor t = p.tensor;
    std::memcpy(t.values().data(), blob.data() + at,
                t.size() * sizeof(double));
    at += t.size() * sizeof(double);
  }
  return m;
}

}  // namespace authorsum::harness
