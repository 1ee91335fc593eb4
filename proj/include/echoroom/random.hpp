#pragma once

// Reproducible random streams.
//
// Every stochastic quantity is drawn from its own SplitMix64 stream whose seed
// is derived from (master seed, stream coordinates). Simulation noise for entry
// (i, j) uses stream_seed(seed, i, j); a solver restart r uses
// stream_seed(seed, r); a sweep trial uses stream_seed(master, sigma_index,
// trial). Draws therefore never depend on evaluation order, masks or the
// number of worker threads.

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace echoroom {

class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed of the stream addressed by `coords` under `master`.
inline std::uint64_t stream_seed(std::uint64_t master, std::initializer_list<std::uint64_t> coords) {
  std::uint64_t h = mix64(master + 0x9E3779B97F4A7C15ULL);
  for (std::uint64_t c : coords) h = mix64(h ^ (c + 0x632BE59BD9B4E019ULL + (h << 6) + (h >> 2)));
  return h;
}

}  // namespace echoroom
