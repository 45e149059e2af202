#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "authorsum/model.hpp"
#include "authorsum/text.hpp"

namespace authorsum::harness {

// Writes <stem>.json (manifest: format version, model config, vocab hash,
// parameter names + shapes, blob byte count) and <stem>.bin (little-endian
// 64-bit floats concatenated in manifest order). Both writes are atomic.
void save_checkpoint(const model::Seq2SeqModel& m, const text::Vocab& vocab,
                     const text::AuthorRegistry& registry,
                     const std::filesystem::path& stem,
                     std::uint64_t experiment_hash = 0,
                     std::uint64_t seed = 0);

// Reconstructs the model from the manifest config. Fails loudly with no
// partial state on version, vocab-hash, config or blob-size mismatches.
model::Seq2SeqModel load_checkpoint(
    const std::filesystem::path& stem, const text::Vocab& vocab,
    const text::AuthorRegistry& registry,
    const std::optional<model::ModelConfig>& expected_config = std::nullopt);

}  // namespace authorsum::harness
