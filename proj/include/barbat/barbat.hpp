#pragma once

// Single-agent BARBAT policies: the plain epoch schedule, its batched
// variant (feedback revealed only at epoch boundaries) and the d-set
// semi-bandit variant.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "barbat/epoch.hpp"
#include "barbat/policy.hpp"

namespace barbat {

// Everything a BARBAT variant carries across rounds of one epoch.
struct BarbatState {
  EpochParams params;
  ArmSchedule schedule;
  GapEstimates estimates;      // from the previous epoch (Delta^{m-1}, r^{m-1})
  std::vector<double> totals;  // S^m, this epoch
  std::uint64_t rounds_in_epoch = 0;
  std::size_t completed_epochs = 0;

  void begin_epoch(std::size_t m, std::size_t num_arms, const ScheduleKnobs& knobs,
                   std::size_t subset_size);
  bool epoch_complete() const {
    return static_cast<double>(rounds_in_epoch) >= params.epoch_len;
  }
};

// Static batch grid implied by the batched schedule: t_j = T_j for every
// epoch started before the horizon, with the last boundary clipped to T.
struct BatchGrid {
  std::vector<std::uint64_t> boundaries;

  static BatchGrid from_schedule(std::uint64_t horizon, std::size_t num_arms,
                                 const ScheduleKnobs& knobs);
};

class BarbatPolicy final : public Policy {
 public:
  // Plain BARBAT (base 2) unless `knobs` says otherwise.
  explicit BarbatPolicy(std::size_t num_arms, ScheduleKnobs knobs = {});

  // Batched variant: base a = max(T^(1/denominator), 2), rewards buffered
  // until the epoch (= batch) ends.
  static BarbatPolicy batched(std::size_t num_arms, std::uint64_t horizon, std::size_t batches,
                              double denominator = 0.0);

  std::string_view name() const override { return batched_ ? "bb-barbat" : "barbat"; }
  std::size_t num_arms() const override { return num_arms_; }
  std::span<const std::size_t> choose(Pcg64& rng) override;
  void observe(const RewardView& rewards) override;
  std::size_t epoch() const override { return state_.params.m; }

  const BarbatState& state() const { return state_; }
  const ScheduleKnobs& knobs() const { return knobs_; }
  bool is_batched() const { return batched_; }
  // Number of times buffered feedback was released to the estimator.
  std::size_t observation_events() const { return observation_events_; }
  std::size_t pending_observations() const { return buffer_.size(); }

  // Closes the running epoch as if its totals were `totals`. Lets tests walk
  // the schedule through many epochs without simulating every round.
  void end_epoch_with(std::span<const double> totals);

 private:
  void finish_epoch();

  std::size_t num_arms_;
  ScheduleKnobs knobs_;
  bool batched_ = false;
  BarbatState state_;
  DiscreteSampler sampler_;
  std::size_t chosen_ = 0;
  std::vector<std::pair<std::size_t, double>> buffer_;
  std::size_t observation_events_ = 0;
};

// Draws exactly `subset_size` distinct arms whose inclusion probabilities
// equal `marginals` (each in [0, 1], summing to subset_size): systematic
// sampling with one uniform offset `u` in [0, 1) on the cumulative line.
// Writes the arms to `out` in increasing index order.
void systematic_sample(std::span<const double> marginals, std::size_t subset_size, double u,
                       std::vector<std::size_t>& out);

class DsBarbatPolicy final : public Policy {
 public:
  DsBarbatPolicy(std::size_t num_arms, std::size_t subset_size);

  std::string_view name() const override { return "ds-barbat"; }
  std::size_t num_arms() const override { return num_arms_; }
  std::span<const std::size_t> choose(Pcg64& rng) override;
  void observe(const RewardView& rewards) override;
  std::size_t epoch() const override { return state_.params.m; }

  const BarbatState& state() const { return state_; }
  std::size_t subset_size() const { return subset_size_; }

  void end_epoch_with(std::span<const double> totals);

 private:
  void finish_epoch();

  std::size_t num_arms_;
  std::size_t subset_size_;
  ScheduleKnobs knobs_;
  BarbatState state_;
  std::vector<std::size_t> chosen_;
};

}  // namespace barbat
