#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace authorsum {

std::uint64_t fnv1a64(std::string_view s);
std::uint64_t fnv1a64(const void* data, std::size_t bytes, std::uint64_t seed = 14695981039346656037ull);

// Deterministic 64-bit PRNG (splitmix64 core). Child streams are derived by
// hashing the parent seed with a label, so corpus, model-init and dropout
// streams stay independent and reproducible across runs.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next_u64();
  double uniform();                              // [0, 1)
  double uniform(double lo, double hi);
  std::uint64_t uniform_int(std::uint64_t n);    // [0, n), n >= 1
  double normal(double mean = 0.0, double stddev = 1.0);
  bool bernoulli(double p);

  // child seed = hash(parent seed, label); independent of draw history
  Rng child(std::string_view label) const;

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_int(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<std::size_t>(uniform_int(v.size()))];
  }

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t state_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace authorsum
