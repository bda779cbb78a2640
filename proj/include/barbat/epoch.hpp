#pragma once

// Epoch-schedule mathematics shared by every BARBAT variant: per-epoch
// scalars, per-arm pull budgets, and the end-of-epoch gap refresh.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace barbat {

enum class ScheduleKind {
  kPlain,       // single agent, base 2 (also used by the graph variant)
  kMultiAgent,  // ln(VK), 1/(VK zeta), lambda / V, beta = delta / (VK)
  kBatched,     // base a, ln(aK)
  kSubset,      // d-set semi-bandit: N_m divided by d
};

struct ScheduleKnobs {
  ScheduleKind kind = ScheduleKind::kPlain;
  double base = 2.0;
  std::size_t agents = 1;       // V, multi-agent only
  std::size_t subset_size = 1;  // d, subset only
};

// Knobs for the batched variant: a = max(T^(1/denominator), 2). A zero
// denominator selects the default 2(L+1). Throws if L < 1 or L > log2(T).
ScheduleKnobs batched_knobs(std::uint64_t horizon, std::size_t batches,
                            double denominator = 0.0);

struct EpochParams {
  std::size_t m = 1;
  double zeta = 0.0;
  double delta = 0.0;
  double lambda = 0.0;
  double beta = 0.0;
  // N_m is a ceiling and, for large m, can exceed 2^64; kept as an
  // integral-valued double.
  double epoch_len = 0.0;
  double epoch_end = 0.0;  // T_m = T_{m-1} + N_m
  double base = 2.0;

  double gap_floor() const;  // base^{-m}
};

// Throws std::invalid_argument for K < 2, m < 1, base <= 1, V < 1 or d
// outside [1, K-1].
EpochParams compute_epoch_params(std::size_t m, std::size_t num_arms,
                                 const ScheduleKnobs& knobs,
                                 double previous_end = 0.0);

// base^exponent; exact exponent arithmetic when base == 2.
double power_of(double base, double exponent);

struct GapEstimates {
  std::vector<double> r;       // r_k, clipped to [0, 1]
  double r_star = 0.0;
  std::vector<double> gaps;    // Delta_k
  std::vector<double> s;       // S_k, corrupted reward totals
  std::vector<double> counts;  // divisor used for r_k
};

// Delta^0 = 1, r^0 = 0.
GapEstimates initial_estimates(std::size_t num_arms);

// r_k = min(S_k / counts_k, 1), r_* = the subset_size-th largest of
// r_k - sqrt(4 ln(4/beta) / counts_k), Delta_k = max(base^{-m}, r_* - r_k).
// All counts must be strictly positive.
GapEstimates update_gap_estimates(std::span<const double> totals,
                                  std::span<const double> counts,
                                  const EpochParams& params,
                                  std::size_t subset_size = 1);

// The subset_size arms with the largest r, ties to the smaller index,
// returned in increasing index order.
std::vector<std::size_t> select_best(std::span<const double> r,
                                     std::size_t subset_size = 1);

struct ArmSchedule {
  std::vector<double> n;        // n_k = lambda / Delta_k^2, never rounded
  std::vector<double> n_tilde;  // realized budgets
  std::vector<std::size_t> best;
  std::vector<double> probs;    // n_tilde / N_m; sums to |best|
};

std::vector<double> target_pulls(const EpochParams& params,
                                 std::span<const double> previous_gaps);

// n_tilde_k = n_k off the best set and N_m - sum_{k not in best} n_k / d on
// it. With d = 1 this is the single-best-arm rule.
ArmSchedule build_schedule(const EpochParams& params,
                           std::span<const double> previous_gaps,
                           std::span<const std::size_t> best);

// Number of epochs that start within the first `horizon` rounds.
std::size_t epochs_started(std::uint64_t horizon, std::size_t num_arms,
                           const ScheduleKnobs& knobs);

}  // namespace barbat
