#include "barbat/policy.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace barbat {

IndependentAgents::IndependentAgents(std::vector<std::unique_ptr<Policy>> agents)
    : agents_(std::move(agents)) {
  if (agents_.empty()) throw std::invalid_argument("agent group needs at least one agent");
  for (const auto& a : agents_) {
    if (a->num_arms() != agents_.front()->num_arms()) {
      throw std::invalid_argument("agents disagree on the number of arms");
    }
  }
}

DiscreteSampler::DiscreteSampler(std::span<const double> weights) {
  cumulative_.resize(weights.size());
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] < 0.0) throw std::invalid_argument("negative sampling weight");
    total += weights[i];
    cumulative_[i] = total;
  }
  if (!(total > 0.0)) throw std::invalid_argument("sampling weights sum to zero");
}

std::size_t DiscreteSampler::sample(Pcg64& rng) const {
  const double u = uniform01(rng) * cumulative_.back();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto idx = static_cast<std::size_t>(it - cumulative_.begin());
  return std::min(idx, cumulative_.size() - 1);
}

FixedPolicy::FixedPolicy(std::size_t num_arms, std::vector<std::size_t> arms)
    : num_arms_(num_arms), arms_(std::move(arms)) {
  if (arms_.empty()) throw std::invalid_argument("fixed policy needs at least one arm");
  for (std::size_t a : arms_) {
    if (a >= num_arms_) throw std::invalid_argument("fixed arm out of range");
  }
}

UniformPolicy::UniformPolicy(std::size_t num_arms, std::size_t subset_size)
    : num_arms_(num_arms), subset_size_(subset_size), pool_(num_arms) {
  if (subset_size_ < 1 || subset_size_ > num_arms_) {
    throw std::invalid_argument("uniform subset size must lie in [1, K]");
  }
  chosen_.resize(subset_size_);
}

std::span<const std::size_t> UniformPolicy::choose(Pcg64& rng) {
  if (subset_size_ == 1) {
    chosen_[0] = uniform_below(rng, num_arms_);
    return chosen_;
  }
  // Partial Fisher-Yates over a fresh identity permutation.
  std::iota(pool_.begin(), pool_.end(), std::size_t{0});
  for (std::size_t i = 0; i < subset_size_; ++i) {
    const std::size_t j = i + uniform_below(rng, num_arms_ - i);
    std::swap(pool_[i], pool_[j]);
    chosen_[i] = pool_[i];
  }
  return chosen_;
}

}  // namespace barbat
