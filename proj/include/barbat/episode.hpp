#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "barbat/adversary.hpp"
#include "barbat/environment.hpp"
#include "barbat/policy.hpp"
#include "barbat/rng.hpp"

namespace barbat {

// Cumulative pseudo-regret sampled at checkpoints. The final round is always
// a checkpoint.
struct RegretTrace {
  std::uint64_t horizon = 0;
  std::vector<std::uint64_t> rounds;
  std::vector<std::vector<double>> cumulative;  // [agent][checkpoint]
  std::vector<double> corruption_spent;         // [checkpoint]
  std::uint64_t broadcasts = 0;

  std::size_t num_agents() const { return cumulative.size(); }
  double final_regret(std::size_t agent = 0) const { return cumulative[agent].back(); }
  // Mean over agents of the final individual regret.
  double mean_final_regret() const;
};

// Per-agent randomness for one episode: the policy's sampling stream and the
// environment's reward stream.
struct AgentStreams {
  std::vector<Pcg64> policy;
  std::vector<RewardStream> rewards;
};

// Simulates exactly `horizon` rounds. Per round: the adversary sees the true
// reward vectors (and the group's public state) and corrupts them, each
// agent chooses an action, suffers sum_{top |x|} mu - sum_{k in x} mu, and
// observes the corrupted rewards through its feedback rule. Epochs that
// would overrun the horizon are simply cut off.
RegretTrace run_episode(AgentGroup& group, const Environment& env, Adversary& adversary,
                        std::uint64_t horizon, AgentStreams& streams,
                        std::uint64_t checkpoint_stride = 1);

// Single-agent convenience form: policy randomness from `rng.engine()`,
// rewards keyed by a key derived from the same (seed, stream).
RegretTrace run_episode(Policy& policy, const Environment& env, Adversary& adversary,
                        std::uint64_t horizon, const RngStream& rng,
                        std::uint64_t checkpoint_stride = 1);

std::uint64_t reward_key(std::uint64_t seed, std::uint64_t stream, std::size_t agent);

}  // namespace barbat
