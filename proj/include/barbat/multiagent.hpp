#pragma once

// Cooperative multi-agent BARBAT: V agents sample from one shared epoch
// schedule and pool their reward totals at every epoch boundary.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "barbat/barbat.hpp"
#include "barbat/policy.hpp"

namespace barbat {

class CommLedger {
 public:
  explicit CommLedger(std::size_t agents = 0) : per_agent_(agents, 0) {}

  void record_broadcast(std::size_t agent) { ++per_agent_[agent]; }
  std::uint64_t broadcasts(std::size_t agent) const { return per_agent_[agent]; }
  std::uint64_t total() const;
  std::size_t num_agents() const { return per_agent_.size(); }

 private:
  std::vector<std::uint64_t> per_agent_;
};

// Every agent broadcasts its totals S_{v,k}; the pooled estimate uses
// r_k = min(sum_v S_{v,k} / (V n~_k), 1) and radius sqrt(4 ln(4/beta)/(V n~_k)).
GapEstimates ma_epoch_sync(std::span<const std::vector<double>> agent_totals,
                           const ArmSchedule& schedule, const EpochParams& params,
                           CommLedger& comm);

class MaBarbatGroup final : public AgentGroup {
 public:
  MaBarbatGroup(std::size_t num_arms, std::size_t agents);

  std::string_view name() const override { return "ma-barbat"; }
  std::size_t num_agents() const override { return agents_; }
  std::size_t num_arms() const override { return num_arms_; }
  std::span<const std::size_t> choose(std::size_t agent, Pcg64& rng) override;
  void observe(std::size_t agent, const RewardView& rewards) override;
  void end_round() override;
  PublicState public_state() const override { return {state_.params.m}; }
  std::uint64_t broadcasts() const override { return comm_.total(); }

  const BarbatState& state() const { return state_; }
  const CommLedger& comm() const { return comm_; }
  const std::vector<double>& agent_totals(std::size_t agent) const { return local_[agent]; }
  const ScheduleKnobs& knobs() const { return knobs_; }

  // Closes the running epoch with the given per-agent totals.
  void end_epoch_with(std::span<const std::vector<double>> totals);

 private:
  void finish_epoch();

  std::size_t num_arms_;
  std::size_t agents_;
  ScheduleKnobs knobs_;
  BarbatState state_;  // totals unused; per-agent totals live in local_
  DiscreteSampler sampler_;
  std::vector<std::vector<double>> local_;
  std::vector<std::size_t> chosen_;
  CommLedger comm_;
};

}  // namespace barbat
