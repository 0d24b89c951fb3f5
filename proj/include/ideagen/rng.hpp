#pragma once

#include <cstdint>
#include <vector>

namespace ideagen {

// Counter-based random source. A draw is a pure function of
// (seed, stream, counter), so sample i of a run is reproducible regardless of
// the order or thread in which samples are produced.
class CounterRng {
 public:
  constexpr CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
      : seed_(seed), stream_(stream) {}

  std::uint64_t bits(std::uint64_t counter) const noexcept;

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform(std::uint64_t counter) const noexcept;

  // Standard normal via Box-Muller over two derived counters.
  double normal(std::uint64_t counter) const noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
};

std::uint64_t mix64(std::uint64_t x) noexcept;

// FNV-1a over bytes; used for content hashes and hashed toy embeddings.
std::uint64_t fnv1a(const void* data, std::size_t size,
                    std::uint64_t basis = 0xcbf29ce484222325ULL) noexcept;

// Fisher-Yates permutation of 0..n-1 driven by CounterRng, portable across
// standard libraries (std::shuffle is not).
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

}  // namespace ideagen
