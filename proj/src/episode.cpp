#include "barbat/episode.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace barbat {

double RegretTrace::mean_final_regret() const {
  if (cumulative.empty()) return 0.0;
  double total = 0.0;
  for (const auto& agent : cumulative) total += agent.back();
  return total / static_cast<double>(cumulative.size());
}

std::uint64_t reward_key(std::uint64_t seed, std::uint64_t stream, std::size_t agent) {
  return derive_key({seed, stream, 0x7265776172647300ULL /* "rewards" */, agent});
}

RegretTrace run_episode(AgentGroup& group, const Environment& env, Adversary& adversary,
                        std::uint64_t horizon, AgentStreams& streams,
                        std::uint64_t checkpoint_stride) {
  if (horizon == 0) throw std::invalid_argument("horizon must be at least 1 round");
  if (checkpoint_stride == 0) throw std::invalid_argument("checkpoint stride must be >= 1");
  const std::size_t agents = group.num_agents();
  const std::size_t k = env.num_arms();
  if (group.num_arms() != k) throw std::invalid_argument("policy and environment arm counts differ");
  if (streams.policy.size() != agents ||
      streams.rewards.size() != agents) {
    throw std::invalid_argument("one policy stream and one reward stream per agent required");
  }

  // best_prefix[j] = sum of the j largest means.
  std::vector<double> sorted = env.mu();
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  std::vector<double> best_prefix(k + 1, 0.0);
  for (std::size_t j = 0; j < k; ++j) best_prefix[j + 1] = best_prefix[j] + sorted[j];
  const auto& mu = env.mu();

  RegretTrace trace;
  trace.horizon = horizon;
  trace.cumulative.resize(agents);
  const std::size_t checkpoints = static_cast<std::size_t>(horizon / checkpoint_stride) + 1;
  trace.rounds.reserve(checkpoints);
  trace.corruption_spent.reserve(checkpoints);
  for (auto& c : trace.cumulative) c.reserve(checkpoints);

  std::vector<double> regret(agents, 0.0);
  std::vector<double> corrupted(agents * k);

  for (std::uint64_t t = 1; t <= horizon; ++t) {
    const PublicState state = group.public_state();
    const bool attacked = adversary.active(state);
    if (attacked) {
      for (std::size_t v = 0; v < agents; ++v) {
        streams.rewards[v].fill(t, std::span<double>(corrupted).subspan(v * k, k));
      }
      adversary.corrupt(t, corrupted, state);
    }
    for (std::size_t v = 0; v < agents; ++v) {
      const auto action = group.choose(v, streams.policy[v]);
      double value = 0.0;
      for (std::size_t arm : action) value += mu[arm];
      regret[v] += best_prefix[action.size()] - value;
      group.observe(v, RewardView(streams.rewards[v], t, attacked ? corrupted.data() + v * k : nullptr));
    }
    group.end_round();

    if (t % checkpoint_stride == 0 || t == horizon) {
      trace.rounds.push_back(t);
      trace.corruption_spent.push_back(adversary.spent());
      for (std::size_t v = 0; v < agents; ++v) trace.cumulative[v].push_back(regret[v]);
    }
  }
  trace.broadcasts = group.broadcasts();
  return trace;
}

namespace {

// Borrows a single policy as a one-agent group.
class SingleAgent final : public AgentGroup {
 public:
  explicit SingleAgent(Policy& p) : policy_(&p) {}
  std::string_view name() const override { return policy_->name(); }
  std::size_t num_agents() const override { return 1; }
  std::size_t num_arms() const override { return policy_->num_arms(); }
  std::span<const std::size_t> choose(std::size_t, Pcg64& rng) override { return policy_->choose(rng); }
  void observe(std::size_t, const RewardView& r) override { policy_->observe(r); }
  PublicState public_state() const override { return {policy_->epoch()}; }

 private:
  Policy* policy_;
};

}  // namespace

RegretTrace run_episode(Policy& policy, const Environment& env, Adversary& adversary,
                        std::uint64_t horizon, const RngStream& rng,
                        std::uint64_t checkpoint_stride) {
  SingleAgent group(policy);
  AgentStreams streams;
  streams.policy.push_back(rng.engine());
  streams.rewards.emplace_back(env, reward_key(rng.seed, rng.stream, 0));
  return run_episode(group, env, adversary, horizon, streams, checkpoint_stride);
}

}  // namespace barbat
