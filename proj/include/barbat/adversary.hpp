#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace barbat {

enum class AttackKind {
  kNone,
  kTwoWorstTarget,   // two smallest-mean arms -> 1, every other arm -> 0
  kEpochFrontLoad,   // same rewrite, only while the victim is in one epoch
};

struct AttackConfig {
  AttackKind kind = AttackKind::kNone;
  double budget = 0.0;         // C, in reward units
  std::size_t target_epoch = 1;  // epoch-front-load only
};

// Algorithm state the adversary is allowed to look at.
struct PublicState {
  std::size_t epoch = 0;  // 0 for policies without epochs
};

class CorruptionLedger {
 public:
  void debit(std::size_t epoch, double amount);
  // Debit that exhausts the budget: the cumulative total is set to `budget`
  // exactly instead of accumulating rounding error.
  void exhaust(std::size_t epoch, double budget);

  double cumulative() const { return cumulative_; }
  // Spend attributed to each epoch index (index 0 = epoch-free policies).
  const std::vector<double>& per_epoch() const { return per_epoch_; }

 private:
  double cumulative_ = 0.0;
  std::vector<double> per_epoch_;
};

// Budgeted, omniscient corruption strategy. Targets come from the true means.
class Adversary {
 public:
  Adversary(AttackConfig config, std::span<const double> mu);

  const AttackConfig& config() const { return config_; }
  const std::vector<std::size_t>& targets() const { return targets_; }
  const CorruptionLedger& ledger() const { return ledger_; }
  double spent() const { return ledger_.cumulative(); }
  double remaining() const { return config_.budget - ledger_.cumulative(); }

  // Whether corrupt() could change anything this round. Lets callers skip
  // materializing full reward vectors once the attack is over.
  bool active(const PublicState& state) const;

  // Rewrites every reward vector of the round in place (`rewards` holds
  // `rewards.size() / num_arms` vectors back to back, one per agent). The
  // round's spend is the max |r~ - r| over all entries; the last corrupting
  // round is scaled back so the ledger lands exactly on the budget.
  // Returns the amount debited.
  double corrupt(std::uint64_t round, std::span<double> rewards, const PublicState& state);

 private:
  AttackConfig config_;
  std::size_t num_arms_;
  std::vector<std::size_t> targets_;
  std::vector<double> target_value_;
  CorruptionLedger ledger_;
};

}  // namespace barbat
