#pragma once

// BARBAT for strongly observable feedback graphs: pulls are planned through
// repeated out-domination sets so every arm reaches its observation target.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "barbat/barbat.hpp"
#include "barbat/graph.hpp"

namespace barbat {

struct ObservationPlan {
  std::vector<double> z;        // planned pulls Z_k
  std::vector<double> h;        // planned observations H_k
  std::vector<double> n_tilde;  // Z_k off k_m, N_m - sum_{k != k_m} Z_k on k_m
  std::vector<double> n_hat;    // sum of n_tilde over in-neighbours (self-loop included)
  std::vector<std::vector<std::size_t>> dominating_sets;  // one per iteration
  std::size_t iterations() const { return dominating_sets.size(); }
};

// Repeats until every arm has H_k >= n_k: D = oods(remaining arms),
// Hbar = min over remaining arms of n_k - H_k, every member of D gets Hbar
// more pulls and each of its out-neighbours Hbar more observations, then
// satisfied arms leave the remainder. Throws std::logic_error if the pulls
// planned off k_m exceed the epoch length.
ObservationPlan plan_epoch_observations(const FeedbackGraph& g, std::span<const double> targets,
                                        double epoch_len, std::size_t best_arm);

class SogBarbatPolicy final : public Policy {
 public:
  explicit SogBarbatPolicy(FeedbackGraph graph);

  std::string_view name() const override { return "sog-barbat"; }
  std::size_t num_arms() const override { return graph_.num_vertices(); }
  std::span<const std::size_t> choose(Pcg64& rng) override;
  // Adds the corrupted reward of every out-neighbour of the pulled arm.
  void observe(const RewardView& rewards) override;
  std::size_t epoch() const override { return state_.params.m; }

  const BarbatState& state() const { return state_; }
  const ObservationPlan& plan() const { return plan_; }
  const FeedbackGraph& graph() const { return graph_; }

  void end_epoch_with(std::span<const double> totals);

 private:
  void begin_epoch(std::size_t m);
  void finish_epoch();

  FeedbackGraph graph_;
  std::vector<std::vector<std::size_t>> out_lists_;
  BarbatState state_;
  ObservationPlan plan_;
  DiscreteSampler sampler_;
  std::size_t chosen_ = 0;
};

}  // namespace barbat
