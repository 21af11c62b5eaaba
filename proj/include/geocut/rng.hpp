#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace geocut {

/// splitmix64 round; used to derive substream seeds from a master seed.
inline std::uint64_t mix_seed(std::uint64_t state) {
  std::uint64_t z = state + 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// FNV-1a hash of a stream label, so substreams can be named.
inline std::uint64_t stream_label(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

/// Deterministic RNG stream.  Distributions are implemented from raw
/// mt19937_64 output rather than <random> distribution adaptors, whose
/// exact draw sequences differ between standard-library implementations.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(mix_seed(seed)) {}

  std::uint64_t bits() { return gen_(); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Uniform in [a, b).
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Standard normal via Box-Muller; consumes exactly two words per call.
  double normal() {
    double u1 = static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    double u2 = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // rejection to avoid modulo bias
    std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return x % n;
  }

 private:
  std::mt19937_64 gen_;
};

/// Derive a stream from a master seed and a path of labels/indices.
inline RngStream derive_stream(std::uint64_t master,
                               std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = mix_seed(master);
  for (std::uint64_t p : path) s = mix_seed(s ^ p);
  return RngStream(s);
}

}  // namespace geocut
