#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace oad {

/// SplitMix64 finalizer: the 64-bit multiply-xor-shift cascade used for all
/// seed derivation.
///
///   z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9
///   z = (z ^ (z >> 27)) * 0x94d049bb133111eb
///   z =  z ^ (z >> 31)
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Combines two 64-bit words into a child seed: mix64(a ^ mix64(b + golden)).
constexpr std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept {
  return mix64(a ^ mix64(b + 0x9e3779b97f4a7c15ULL));
}

/// Seed for an independent substream keyed by (seed, purpose tag, index).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag,
                                    std::uint64_t index = 0) noexcept {
  return mix_seed(mix_seed(seed, tag), index);
}

/// FNV-1a over bytes; turns run identifiers into mixable integers.
constexpr std::uint64_t fnv1a(std::string_view text) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Purpose tags for derive_seed. Values are part of the reproducibility
// contract; do not renumber.
namespace seed_tag {
inline constexpr std::uint64_t embed = 1;
inline constexpr std::uint64_t activity = 2;
inline constexpr std::uint64_t observe = 3;
inline constexpr std::uint64_t corpus_pose = 4;
inline constexpr std::uint64_t corpus_observe = 5;
inline constexpr std::uint64_t teacher = 6;
inline constexpr std::uint64_t init = 7;
inline constexpr std::uint64_t shuffle = 8;
inline constexpr std::uint64_t select = 9;
inline constexpr std::uint64_t pretrain = 10;
inline constexpr std::uint64_t run = 11;
}  // namespace seed_tag

/// mt19937_64 engine with distribution code written out here, so draws are
/// identical across standard libraries (std:: distributions are not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n); rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t n);

  /// Standard normal via Box-Muller; the second variate is cached.
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace oad
