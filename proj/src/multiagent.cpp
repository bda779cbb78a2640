#include "barbat/multiagent.hpp"

#include <numeric>
#include <stdexcept>

namespace barbat {

std::uint64_t CommLedger::total() const {
  return std::accumulate(per_agent_.begin(), per_agent_.end(), std::uint64_t{0});
}

GapEstimates ma_epoch_sync(std::span<const std::vector<double>> agent_totals,
                           const ArmSchedule& schedule, const EpochParams& params,
                           CommLedger& comm) {
  const std::size_t agents = agent_totals.size();
  if (agents == 0 || comm.num_agents() != agents) {
    throw std::invalid_argument("one totals vector and one ledger slot per agent required");
  }
  const std::size_t k = schedule.n_tilde.size();
  std::vector<double> pooled(k, 0.0);
  for (std::size_t v = 0; v < agents; ++v) {
    if (agent_totals[v].size() != k) throw std::invalid_argument("agent totals length differs from K");
    comm.record_broadcast(v);
    for (std::size_t i = 0; i < k; ++i) pooled[i] += agent_totals[v][i];
  }
  std::vector<double> counts(k);
  for (std::size_t i = 0; i < k; ++i) counts[i] = static_cast<double>(agents) * schedule.n_tilde[i];
  return update_gap_estimates(pooled, counts, params, 1);
}

MaBarbatGroup::MaBarbatGroup(std::size_t num_arms, std::size_t agents)
    : num_arms_(num_arms), agents_(agents), local_(agents), chosen_(agents, 0), comm_(agents) {
  if (agents_ < 1) throw std::invalid_argument("multi-agent group needs V >= 1");
  knobs_.kind = ScheduleKind::kMultiAgent;
  knobs_.agents = agents_;
  state_.estimates = initial_estimates(num_arms_);
  state_.begin_epoch(1, num_arms_, knobs_, 1);
  sampler_ = DiscreteSampler(state_.schedule.probs);
  for (auto& totals : local_) totals.assign(num_arms_, 0.0);
}

std::span<const std::size_t> MaBarbatGroup::choose(std::size_t agent, Pcg64& rng) {
  chosen_[agent] = sampler_.sample(rng);
  return {&chosen_[agent], 1};
}

void MaBarbatGroup::observe(std::size_t agent, const RewardView& rewards) {
  local_[agent][chosen_[agent]] += rewards[chosen_[agent]];
}

void MaBarbatGroup::end_round() {
  ++state_.rounds_in_epoch;
  if (state_.epoch_complete()) finish_epoch();
}

void MaBarbatGroup::finish_epoch() {
  state_.estimates = ma_epoch_sync(local_, state_.schedule, state_.params, comm_);
  ++state_.completed_epochs;
  state_.begin_epoch(state_.params.m + 1, num_arms_, knobs_, 1);
  sampler_ = DiscreteSampler(state_.schedule.probs);
  for (auto& totals : local_) totals.assign(num_arms_, 0.0);
}

void MaBarbatGroup::end_epoch_with(std::span<const std::vector<double>> totals) {
  if (totals.size() != agents_) throw std::invalid_argument("one totals vector per agent required");
  for (std::size_t v = 0; v < agents_; ++v) local_[v] = totals[v];
  finish_epoch();
}

}  // namespace barbat
