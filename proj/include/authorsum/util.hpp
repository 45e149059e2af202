#pragma once

#include <filesystem>
#include <functional>
#include <string>

namespace authorsum {

// Runs fn(0..n-1) across worker threads. Callers keep determinism by
// writing results into per-index slots only.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  unsigned threads = 0);

// write-temp-then-rename
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content);

std::string read_file(const std::filesystem::path& path);

}  // namespace authorsum
