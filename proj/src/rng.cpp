#include "barbat/rng.hpp"

namespace barbat {

// Seeding follows the PCG reference: zero state, odd increment from the
// stream id, one step, add the seed, one more step.
Pcg64::Pcg64(std::uint64_t seed, std::uint64_t stream) {
  increment_ = (static_cast<u128>(mix64(stream)) << 64U | stream) << 1U | 1U;
  state_ = 0;
  (*this)();
  state_ += (static_cast<u128>(mix64(seed)) << 64U) | seed;
  (*this)();
}

}  // namespace barbat
