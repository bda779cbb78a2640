#include "barbat/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace barbat {

BarbarPolicy::BarbarPolicy(std::size_t num_arms, std::uint64_t horizon, BarbarOptions options)
    : num_arms_(num_arms) {
  if (num_arms_ < 2) throw std::invalid_argument("BARBAR needs at least 2 arms");
  if (horizon < 2) throw std::invalid_argument("BARBAR needs a horizon of at least 2");
  if (options.delta < 0.0 || options.delta >= 1.0) throw std::invalid_argument("BARBAR delta must lie in (0, 1)");
  if (options.lambda < 0.0 || !std::isfinite(options.lambda)) {
    throw std::invalid_argument("BARBAR lambda must be positive");
  }
  const auto k = static_cast<double>(num_arms_);
  delta_ = options.delta > 0.0 ? options.delta : 1.0 / static_cast<double>(horizon);
  lambda_ = options.lambda > 0.0
                ? options.lambda
                : 1024.0 * std::log(8.0 * k / delta_ * std::log2(static_cast<double>(horizon)));
  gaps_.assign(num_arms_, 1.0);
  begin_epoch(1);
}

void BarbarPolicy::begin_epoch(std::size_t m) {
  epoch_.m = m;
  epoch_.n.resize(num_arms_);
  double total = 0.0;
  for (std::size_t k = 0; k < num_arms_; ++k) {
    epoch_.n[k] = lambda_ / (gaps_[k] * gaps_[k]);
    total += epoch_.n[k];
  }
  epoch_.probs.resize(num_arms_);
  for (std::size_t k = 0; k < num_arms_; ++k) epoch_.probs[k] = epoch_.n[k] / total;
  epoch_.epoch_len = std::ceil(total);
  sampler_ = DiscreteSampler(epoch_.probs);
  totals_.assign(num_arms_, 0.0);
  rounds_in_epoch_ = 0;
}

std::span<const std::size_t> BarbarPolicy::choose(Pcg64& rng) {
  chosen_ = sampler_.sample(rng);
  return {&chosen_, 1};
}

void BarbarPolicy::observe(const RewardView& rewards) {
  totals_[chosen_] += rewards[chosen_];
  ++rounds_in_epoch_;
  if (static_cast<double>(rounds_in_epoch_) >= epoch_.epoch_len) finish_epoch();
}

void BarbarPolicy::finish_epoch() {
  std::vector<double> r(num_arms_);
  double r_star = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < num_arms_; ++k) {
    r[k] = std::min(totals_[k] / epoch_.n[k], 1.0);
    r_star = std::max(r_star, r[k] - gaps_[k] / 16.0);
  }
  const double floor = std::ldexp(1.0, -static_cast<int>(std::min<std::size_t>(epoch_.m, 1000)));
  for (std::size_t k = 0; k < num_arms_; ++k) gaps_[k] = std::max(floor, r_star - r[k]);
  ++completed_;
  begin_epoch(epoch_.m + 1);
}

void BarbarPolicy::end_epoch_with(std::span<const double> totals) {
  if (totals.size() != num_arms_) throw std::invalid_argument("totals length differs from K");
  totals_.assign(totals.begin(), totals.end());
  finish_epoch();
}

namespace {

struct WeightSum {
  double sum = 0.0;
  double slope_sum = 0.0;  // sum of w^{3/2}
};

WeightSum weight_sum(std::span<const double> losses, double eta, double x) {
  WeightSum out;
  for (double l : losses) {
    const double w = 4.0 / ((eta * (l - x)) * (eta * (l - x)));
    out.sum += w;
    out.slope_sum += w * std::sqrt(w);
  }
  return out;
}

void fill_weights(std::span<const double> losses, double eta, double x, std::vector<double>& w) {
  w.resize(losses.size());
  for (std::size_t k = 0; k < losses.size(); ++k) {
    w[k] = 4.0 / ((eta * (losses[k] - x)) * (eta * (losses[k] - x)));
  }
}

}  // namespace

TsallisSolve tsallis_weights(std::span<const double> losses, double eta) {
  if (losses.size() < 2) throw std::invalid_argument("Tsallis weights need at least 2 arms");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw std::invalid_argument("learning rate must be positive");
  const double min_loss = *std::min_element(losses.begin(), losses.end());
  const double upper = min_loss - 2.0 / eta;  // sum >= 1 here
  const double lower = min_loss - 2.0 * std::sqrt(static_cast<double>(losses.size())) / eta;

  TsallisSolve solve;
  // The sum is convex and increasing in x, so Newton from the right of the
  // root moves monotonically left onto it.
  double x = upper;
  for (; solve.newton_iterations < kTsallisMaxIterations; ++solve.newton_iterations) {
    const WeightSum s = weight_sum(losses, eta, x);
    if (std::abs(s.sum - 1.0) <= kTsallisTolerance) {
      solve.x = x;
      fill_weights(losses, eta, x, solve.weights);
      return solve;
    }
    const double next = x - (s.sum - 1.0) / (eta * s.slope_sum);
    if (!std::isfinite(next) || next >= min_loss) break;
    x = next;
  }

  solve.used_bisection = true;
  double lo = lower;
  double hi = upper;
  for (std::size_t i = 0; i < 4 * kTsallisMaxIterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double sum = weight_sum(losses, eta, mid).sum;
    if (std::abs(sum - 1.0) <= kTsallisTolerance) {
      solve.x = mid;
      fill_weights(losses, eta, mid, solve.weights);
      return solve;
    }
    (sum > 1.0 ? hi : lo) = mid;
    if (hi <= lo || mid == lo || mid == hi) break;
  }
  throw std::runtime_error("Tsallis normalization failed to converge");
}

TsallisInfPolicy::TsallisInfPolicy(std::size_t num_arms)
    : num_arms_(num_arms), losses_(num_arms, 0.0), weights_(num_arms, 1.0 / static_cast<double>(num_arms)) {
  if (num_arms_ < 2) throw std::invalid_argument("Tsallis-INF needs at least 2 arms");
}

double TsallisInfPolicy::learning_rate() const {
  return 1.0 / std::sqrt(static_cast<double>(round_ + 1));
}

std::span<const std::size_t> TsallisInfPolicy::choose(Pcg64& rng) {
  weights_ = tsallis_weights(losses_, learning_rate()).weights;
  double u = uniform01(rng);
  chosen_ = num_arms_ - 1;
  for (std::size_t k = 0; k < num_arms_; ++k) {
    if (u < weights_[k]) {
      chosen_ = k;
      break;
    }
    u -= weights_[k];
  }
  return {&chosen_, 1};
}

void TsallisInfPolicy::observe(const RewardView& rewards) {
  const double loss = 1.0 - rewards[chosen_];
  losses_[chosen_] += loss / weights_[chosen_];
  ++round_;
}

}  // namespace barbat
