#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "barbat/rng.hpp"

namespace barbat {

enum class RewardKind { kTruncatedNormal, kBernoulli };

inline constexpr std::size_t kMaxRejectionAttempts = 1'000'000;

// Fixed mean vector plus the reward law. Samples always lie in [0, 1].
class Environment {
 public:
  // `variance` is the variance of the normal before truncation to [0, 1].
  Environment(std::vector<double> mu, RewardKind kind, double variance = 0.1);

  std::size_t num_arms() const { return mu_.size(); }
  const std::vector<double>& mu() const { return mu_; }
  RewardKind kind() const { return kind_; }
  double variance() const { return variance_; }

  // Sum of the `count` largest means: the per-round value of the optimal action.
  double best_value(std::size_t count = 1) const;

  template <class Gen>
  double draw(std::size_t arm, Gen& gen) const {
    const double mean = mu_[arm];
    if (kind_ == RewardKind::kBernoulli) return uniform01(gen) < mean ? 1.0 : 0.0;
    for (std::size_t attempt = 0; attempt < kMaxRejectionAttempts; ++attempt) {
      const double x = mean + stddev_ * standard_normal(gen);
      if (x >= 0.0 && x <= 1.0) return x;
    }
    throw std::runtime_error("truncated-normal rejection sampler exhausted for arm " +
                             std::to_string(arm));
  }

  // One i.i.d. reward vector drawn sequentially from `gen`.
  template <class Gen>
  std::vector<double> sample_rewards(Gen& gen) const {
    std::vector<double> r(mu_.size());
    for (std::size_t k = 0; k < r.size(); ++k) r[k] = draw(k, gen);
    return r;
  }

 private:
  std::vector<double> mu_;
  RewardKind kind_;
  double variance_;
  double stddev_;
};

// Reward stream of one agent: r_{t,k} is a pure function of (key, t, k), so
// any subset of arms can be evaluated lazily and every policy sees the same
// realization.
class RewardStream {
 public:
  RewardStream(const Environment& env, std::uint64_t key) : env_(&env), key_(key) {}

  double reward(std::uint64_t round, std::size_t arm) const {
    KeyedRng gen(derive_key({key_, round, arm}));
    return env_->draw(arm, gen);
  }

  void fill(std::uint64_t round, std::span<double> out) const {
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = reward(round, k);
  }

  const Environment& environment() const { return *env_; }

 private:
  const Environment* env_;
  std::uint64_t key_;
};

// K i.i.d. uniform draws from [low, high].
std::vector<double> generate_means(std::size_t num_arms, Pcg64& rng, double low = 0.02,
                                   double high = 0.96);

}  // namespace barbat
