#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace agentir {

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t hash_string(std::string_view text);  // FNV-1a 64
std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value);

// Counter-based generator; distributions are implemented here so that draws are
// identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64() { return splitmix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }
  // Uniform in [0, 1) with 53 bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  // Uniform integer in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Hierarchical substream identifier. A substream is a pure value: deriving a child
// never consumes state, so the draws of one substream are unaffected by how many
// other substreams exist or in which order they are used.
class Substream {
 public:
  Substream() = default;
  explicit Substream(std::uint64_t key) : key_(key) {}

  static Substream root(std::uint64_t seed) { return Substream{splitmix64(seed ^ 0x5851f42d4c957f2dULL)}; }

  Substream child(std::uint64_t index) const { return Substream{hash_combine(key_, index)}; }
  Substream child(std::string_view label) const { return child(hash_string(label)); }
  template <typename... Rest>
  Substream child(std::uint64_t first, Rest... rest) const {
    return child(first).child(static_cast<std::uint64_t>(rest)...);
  }

  Rng rng() const { return Rng{key_}; }
  double uniform() const { return rng().uniform(); }
  std::uint64_t key() const { return key_; }

  friend bool operator==(const Substream&, const Substream&) = default;

 private:
  std::uint64_t key_ = 0;
};

}  // namespace agentir
