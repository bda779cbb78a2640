#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <string_view>

namespace barbat {

// Identifier of the generator family below. Any change to seeding, stream
// derivation or output functions must bump the version suffix, because traces
// are only comparable between runs that share it.
inline constexpr std::string_view kRngAlgorithm = "pcg64-xslrr-128/64+splitmix64-keyed/v1";

// SplitMix64 finalizer. Used for key derivation and the keyed generator.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Order-sensitive hash of a tuple of integers into a stream index.
constexpr std::uint64_t derive_key(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = 0x6A09E667F3BCC909ULL;
  for (std::uint64_t p : parts) h = mix64(h ^ mix64(p));
  return h;
}

// PCG64 with the XSL-RR output function (O'Neill 2014), 128-bit LCG state.
// The stream argument selects the LCG increment, so distinct streams are
// distinct sequences, not offsets of one sequence.
class Pcg64 {
 public:
  using result_type = std::uint64_t;

  Pcg64(std::uint64_t seed, std::uint64_t stream);

  result_type operator()() {
    state_ = state_ * kMultiplier + increment_;
    const auto rot = static_cast<unsigned>(state_ >> 122U);
    const auto xored = static_cast<std::uint64_t>(state_ ^ (state_ >> 64U));
    return (xored >> rot) | (xored << ((64U - rot) & 63U));
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

 private:
  using u128 = unsigned __int128;
  static constexpr u128 kMultiplier =
      (static_cast<u128>(0x2360ED051FC65DA4ULL) << 64U) | 0x4385DF649FCCF645ULL;

  u128 state_ = 0;
  u128 increment_ = 0;
};

// Counter-keyed generator: a SplitMix64 sequence started from a hashed key.
// Lets the environment evaluate r_{t,k} for any (round, arm) in any order and
// still produce the same value, which is what keeps reward streams paired
// across policies that observe different arms.
class KeyedRng {
 public:
  using result_type = std::uint64_t;

  explicit KeyedRng(std::uint64_t key) : state_(mix64(key)) {}

  result_type operator()() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

 private:
  std::uint64_t state_;
};

// (seed, stream) pair naming one reproducible Pcg64 sequence.
struct RngStream {
  std::string_view algorithm = kRngAlgorithm;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  Pcg64 engine() const { return Pcg64(seed, stream); }
};

// Uniform double in [0, 1) with 53 random bits.
template <class Gen>
double uniform01(Gen& gen) {
  return static_cast<double>(gen() >> 11U) * 0x1.0p-53;
}

// Uniform integer in [0, n), Lemire's multiply-shift with rejection.
template <class Gen>
std::size_t uniform_below(Gen& gen, std::size_t n) {
  using u128 = unsigned __int128;
  const auto bound = static_cast<std::uint64_t>(n);
  u128 product = static_cast<u128>(gen()) * bound;
  auto low = static_cast<std::uint64_t>(product);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      product = static_cast<u128>(gen()) * bound;
      low = static_cast<std::uint64_t>(product);
    }
  }
  return static_cast<std::size_t>(product >> 64U);
}

// Box-Muller, one output per two uniforms; no cached spare so the draw count
// per call is fixed.
template <class Gen>
double standard_normal(Gen& gen) {
  const double u1 = 1.0 - uniform01(gen);  // (0, 1]
  const double u2 = uniform01(gen);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace barbat
