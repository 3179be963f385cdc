#ifndef RUMOR_RNG_HPP
#define RUMOR_RNG_HPP

#include <cstdint>

namespace rumor {

// splitmix64 finalizer (Steele/Lea/Flood; Vigna's constants). Full avalanche,
// bijective on 64 bits.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Sequential splitmix64 stream. Cheap, passes BigCrush, one word of state.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  constexpr std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t operator()() { return next(); }
  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return ~0ULL; }

  // Uniform in [0,1), 53 random bits.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

// Counter-based randomness for one Monte Carlo trial. Every draw is keyed by
// (master seed, trial index, site key, salt), so a value never depends on the
// order in which the simulation happens to visit sites. That makes trials
// reproducible under any scheduling and makes shared-randomness couplings
// (same keys, different law) exact.
class TrialRng {
 public:
  TrialRng(std::uint64_t master_seed, std::uint64_t trial_index)
      : trial_seed_(mix64(master_seed ^ mix64(trial_index + 0x6a09e667f3bcc909ULL))) {}

  std::uint64_t bits(std::uint64_t key, std::uint32_t salt = 0) const {
    std::uint64_t h = trial_seed_ ^ mix64(key + 0x9e3779b97f4a7c15ULL);
    return mix64(h ^ (0x100000001b3ULL * (salt + 1)));
  }

  double uniform01(std::uint64_t key, std::uint32_t salt = 0) const {
    return static_cast<double>(bits(key, salt) >> 11) * 0x1.0p-53;
  }

  // Sequential sub-stream rooted at (key, salt); for draws that are naturally
  // ordered (e.g. a Markov chain).
  SplitMix64 stream(std::uint64_t key, std::uint32_t salt = 0) const {
    return SplitMix64(bits(key, salt));
  }

  std::uint64_t trial_seed() const { return trial_seed_; }

 private:
  std::uint64_t trial_seed_;
};

// Key for a tree vertex identified by its path from the root; stable across
// exploration orders and lazily generated structure.
constexpr std::uint64_t child_key(std::uint64_t parent_key, std::uint64_t child_index) {
  return mix64(parent_key ^ (0x9e3779b97f4a7c15ULL * (child_index + 1)));
}

constexpr std::uint64_t kRootKey = 0x243f6a8885a308d3ULL;

}  // namespace rumor

#endif  // RUMOR_RNG_HPP
