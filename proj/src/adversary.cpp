#include "barbat/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace barbat {

void CorruptionLedger::debit(std::size_t epoch, double amount) {
  if (per_epoch_.size() <= epoch) per_epoch_.resize(epoch + 1, 0.0);
  per_epoch_[epoch] += amount;
  cumulative_ += amount;
}

void CorruptionLedger::exhaust(std::size_t epoch, double budget) {
  if (per_epoch_.size() <= epoch) per_epoch_.resize(epoch + 1, 0.0);
  per_epoch_[epoch] += budget - cumulative_;
  cumulative_ = budget;
}

Adversary::Adversary(AttackConfig config, std::span<const double> mu)
    : config_(config), num_arms_(mu.size()) {
  if (!(config_.budget >= 0.0)) throw std::invalid_argument("corruption budget must be >= 0");
  if (num_arms_ == 0) throw std::invalid_argument("adversary needs at least one arm");

  std::vector<std::size_t> order(num_arms_);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return mu[a] < mu[b]; });
  targets_.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(2, num_arms_)));
  std::sort(targets_.begin(), targets_.end());

  target_value_.assign(num_arms_, 0.0);
  for (std::size_t t : targets_) target_value_[t] = 1.0;
}

bool Adversary::active(const PublicState& state) const {
  if (config_.kind == AttackKind::kNone || remaining() <= 0.0) return false;
  if (config_.kind == AttackKind::kEpochFrontLoad) return state.epoch == config_.target_epoch;
  return true;
}

double Adversary::corrupt(std::uint64_t /*round*/, std::span<double> rewards,
                          const PublicState& state) {
  if (!active(state)) return 0.0;
  if (rewards.size() % num_arms_ != 0) {
    throw std::invalid_argument("reward buffer is not a whole number of reward vectors");
  }

  double deviation = 0.0;
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    deviation = std::max(deviation, std::abs(target_value_[i % num_arms_] - rewards[i]));
  }
  if (deviation == 0.0) return 0.0;

  const double left = remaining();
  double spend = deviation;
  double scale = 1.0;
  const bool exhausting = deviation >= left;
  if (exhausting) {
    scale = left / deviation;
    spend = left;
  }
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    const double target = target_value_[i % num_arms_];
    rewards[i] = scale == 1.0 ? target : rewards[i] + scale * (target - rewards[i]);
    rewards[i] = std::clamp(rewards[i], 0.0, 1.0);
  }
  if (exhausting) {
    ledger_.exhaust(state.epoch, config_.budget);
  } else {
    ledger_.debit(state.epoch, spend);
  }
  return spend;
}

}  // namespace barbat
