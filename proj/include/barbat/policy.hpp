#pragma once

// Policy interfaces and the small policies used as references and controls.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "barbat/adversary.hpp"
#include "barbat/environment.hpp"
#include "barbat/rng.hpp"

namespace barbat {

// Corrupted rewards of one agent for one round. Entries are evaluated on
// demand, so a policy pays only for the arms its feedback rule reveals.
class RewardView {
 public:
  RewardView(const RewardStream& stream, std::uint64_t round, const double* corrupted)
      : stream_(&stream), round_(round), corrupted_(corrupted) {}

  double operator[](std::size_t arm) const {
    return corrupted_ != nullptr ? corrupted_[arm] : stream_->reward(round_, arm);
  }
  std::uint64_t round() const { return round_; }

 private:
  const RewardStream* stream_;
  std::uint64_t round_;
  const double* corrupted_;
};

// Single-agent policy. Each round is one choose() followed by one observe();
// observe() may only read the entries its feedback rule allows (the pulled
// arm, its out-neighbours, or the chosen subset).
class Policy {
 public:
  virtual ~Policy() = default;

  virtual std::string_view name() const = 0;
  virtual std::size_t num_arms() const = 0;
  // Arms played this round. The span stays valid until the next call.
  virtual std::span<const std::size_t> choose(Pcg64& rng) = 0;
  virtual void observe(const RewardView& rewards) = 0;
  // Current epoch index, 0 for policies without epochs.
  virtual std::size_t epoch() const { return 0; }
};

// V agents advancing in lockstep.
class AgentGroup {
 public:
  virtual ~AgentGroup() = default;

  virtual std::string_view name() const = 0;
  virtual std::size_t num_agents() const = 0;
  virtual std::size_t num_arms() const = 0;
  virtual std::span<const std::size_t> choose(std::size_t agent, Pcg64& rng) = 0;
  virtual void observe(std::size_t agent, const RewardView& rewards) = 0;
  // Called once after every agent observed the round.
  virtual void end_round() {}
  virtual PublicState public_state() const = 0;
  // Messages broadcast so far, summed over agents.
  virtual std::uint64_t broadcasts() const { return 0; }
};

// Agents that never communicate; each runs its own copy of a policy.
class IndependentAgents final : public AgentGroup {
 public:
  explicit IndependentAgents(std::vector<std::unique_ptr<Policy>> agents);

  std::string_view name() const override { return agents_.front()->name(); }
  std::size_t num_agents() const override { return agents_.size(); }
  std::size_t num_arms() const override { return agents_.front()->num_arms(); }
  std::span<const std::size_t> choose(std::size_t agent, Pcg64& rng) override {
    return agents_[agent]->choose(rng);
  }
  void observe(std::size_t agent, const RewardView& rewards) override {
    agents_[agent]->observe(rewards);
  }
  // The adversary keys on agent 0's epoch.
  PublicState public_state() const override { return {agents_.front()->epoch()}; }

  Policy& agent(std::size_t v) { return *agents_[v]; }

 private:
  std::vector<std::unique_ptr<Policy>> agents_;
};

// Inverse-CDF sampler over a fixed weight vector.
class DiscreteSampler {
 public:
  DiscreteSampler() = default;
  explicit DiscreteSampler(std::span<const double> weights);

  std::size_t sample(Pcg64& rng) const;
  std::size_t size() const { return cumulative_.size(); }

 private:
  std::vector<double> cumulative_;
};

// Always plays the same arm set.
class FixedPolicy final : public Policy {
 public:
  FixedPolicy(std::size_t num_arms, std::vector<std::size_t> arms);

  std::string_view name() const override { return "fixed"; }
  std::size_t num_arms() const override { return num_arms_; }
  std::span<const std::size_t> choose(Pcg64&) override { return arms_; }
  void observe(const RewardView&) override {}

 private:
  std::size_t num_arms_;
  std::vector<std::size_t> arms_;
};

// Plays a uniformly random subset of `subset_size` distinct arms.
class UniformPolicy final : public Policy {
 public:
  explicit UniformPolicy(std::size_t num_arms, std::size_t subset_size = 1);

  std::string_view name() const override { return "uniform"; }
  std::size_t num_arms() const override { return num_arms_; }
  std::span<const std::size_t> choose(Pcg64& rng) override;
  void observe(const RewardView&) override {}

 private:
  std::size_t num_arms_;
  std::size_t subset_size_;
  std::vector<std::size_t> pool_;
  std::vector<std::size_t> chosen_;
};

}  // namespace barbat
