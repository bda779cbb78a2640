#include "barbat/barbat.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace barbat {

void BarbatState::begin_epoch(std::size_t m, std::size_t num_arms, const ScheduleKnobs& knobs,
                              std::size_t subset_size) {
  const double previous_end = m > 1 ? params.epoch_end : 0.0;
  params = compute_epoch_params(m, num_arms, knobs, previous_end);
  const auto best = select_best(estimates.r, subset_size);
  schedule = build_schedule(params, estimates.gaps, best);
  totals.assign(num_arms, 0.0);
  rounds_in_epoch = 0;
}

BatchGrid BatchGrid::from_schedule(std::uint64_t horizon, std::size_t num_arms,
                                   const ScheduleKnobs& knobs) {
  BatchGrid grid;
  double end = 0.0;
  for (std::size_t m = 1; end < static_cast<double>(horizon); ++m) {
    end = compute_epoch_params(m, num_arms, knobs, end).epoch_end;
    grid.boundaries.push_back(end >= static_cast<double>(horizon)
                                  ? horizon
                                  : static_cast<std::uint64_t>(end));
  }
  return grid;
}

BarbatPolicy::BarbatPolicy(std::size_t num_arms, ScheduleKnobs knobs)
    : num_arms_(num_arms), knobs_(knobs), batched_(knobs.kind == ScheduleKind::kBatched) {
  if (knobs_.kind == ScheduleKind::kSubset || knobs_.kind == ScheduleKind::kMultiAgent) {
    throw std::invalid_argument("BarbatPolicy handles the plain and batched schedules only");
  }
  state_.estimates = initial_estimates(num_arms_);
  state_.begin_epoch(1, num_arms_, knobs_, 1);
  sampler_ = DiscreteSampler(state_.schedule.probs);
}

BarbatPolicy BarbatPolicy::batched(std::size_t num_arms, std::uint64_t horizon,
                                   std::size_t batches, double denominator) {
  return BarbatPolicy(num_arms, batched_knobs(horizon, batches, denominator));
}

std::span<const std::size_t> BarbatPolicy::choose(Pcg64& rng) {
  chosen_ = sampler_.sample(rng);
  return {&chosen_, 1};
}

void BarbatPolicy::observe(const RewardView& rewards) {
  const double r = rewards[chosen_];
  if (batched_) {
    buffer_.emplace_back(chosen_, r);
  } else {
    state_.totals[chosen_] += r;
  }
  ++state_.rounds_in_epoch;
  if (state_.epoch_complete()) finish_epoch();
}

void BarbatPolicy::finish_epoch() {
  if (batched_) {
    for (const auto& [arm, r] : buffer_) state_.totals[arm] += r;
    buffer_.clear();
    ++observation_events_;
  }
  state_.estimates =
      update_gap_estimates(state_.totals, state_.schedule.n_tilde, state_.params, 1);
  ++state_.completed_epochs;
  state_.begin_epoch(state_.params.m + 1, num_arms_, knobs_, 1);
  sampler_ = DiscreteSampler(state_.schedule.probs);
}

void BarbatPolicy::end_epoch_with(std::span<const double> totals) {
  if (totals.size() != num_arms_) throw std::invalid_argument("totals length differs from K");
  buffer_.clear();
  state_.totals.assign(totals.begin(), totals.end());
  finish_epoch();
}

void systematic_sample(std::span<const double> marginals, std::size_t subset_size, double u,
                       std::vector<std::size_t>& out) {
  out.clear();
  double total = 0.0;
  for (double q : marginals) {
    if (q < -1e-12 || q > 1.0 + 1e-9) throw std::invalid_argument("marginal outside [0, 1]");
    total += q;
  }
  const auto d = static_cast<double>(subset_size);
  if (subset_size == 0 || subset_size > marginals.size() || std::abs(total - d) > 1e-6 * d) {
    throw std::invalid_argument("marginals must sum to the subset size");
  }
  const double scale = d / total;

  // Points u, u+1, ..., u+d-1; arm k takes the point inside its interval.
  // Intervals are at most one wide, so no arm can take two points.
  double upper = 0.0;
  std::size_t next = 0;
  for (std::size_t k = 0; k < marginals.size() && next < subset_size; ++k) {
    upper += std::clamp(marginals[k], 0.0, 1.0) * scale;
    if (marginals[k] > 0.0 && u + static_cast<double>(next) < upper) {
      out.push_back(k);
      ++next;
    }
  }
  // Rounding can leave the last point just past the end of the line.
  for (std::size_t k = marginals.size(); out.size() < subset_size && k-- > 0;) {
    if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
  }
  std::sort(out.begin(), out.end());
}

DsBarbatPolicy::DsBarbatPolicy(std::size_t num_arms, std::size_t subset_size)
    : num_arms_(num_arms), subset_size_(subset_size) {
  if (subset_size_ < 1 || subset_size_ >= num_arms_) {
    throw std::invalid_argument("d-set size must lie in [1, K-1]");
  }
  knobs_.kind = ScheduleKind::kSubset;
  knobs_.subset_size = subset_size_;
  state_.estimates = initial_estimates(num_arms_);
  state_.begin_epoch(1, num_arms_, knobs_, subset_size_);
  chosen_.reserve(subset_size_);
}

std::span<const std::size_t> DsBarbatPolicy::choose(Pcg64& rng) {
  systematic_sample(state_.schedule.probs, subset_size_, uniform01(rng), chosen_);
  return chosen_;
}

void DsBarbatPolicy::observe(const RewardView& rewards) {
  for (std::size_t k : chosen_) state_.totals[k] += rewards[k];
  ++state_.rounds_in_epoch;
  if (state_.epoch_complete()) finish_epoch();
}

void DsBarbatPolicy::finish_epoch() {
  state_.estimates =
      update_gap_estimates(state_.totals, state_.schedule.n_tilde, state_.params, subset_size_);
  ++state_.completed_epochs;
  state_.begin_epoch(state_.params.m + 1, num_arms_, knobs_, subset_size_);
}

void DsBarbatPolicy::end_epoch_with(std::span<const double> totals) {
  if (totals.size() != num_arms_) throw std::invalid_argument("totals length differs from K");
  state_.totals.assign(totals.begin(), totals.end());
  finish_epoch();
}

}  // namespace barbat
