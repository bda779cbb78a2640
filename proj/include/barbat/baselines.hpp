#pragma once

// Comparison policies: BARBAR (elimination with data-dependent epoch
// lengths) and 1/2-Tsallis-INF (FTRL with a per-round normalization solve).

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "barbat/policy.hpp"

namespace barbat {

struct BarbarOptions {
  double delta = 0.0;   // 0 selects 1/T
  double lambda = 0.0;  // 0 selects 1024 ln(8K/delta * log2 T)
};

struct BarbarEpoch {
  std::size_t m = 1;
  std::vector<double> n;      // n_k = lambda / (Delta_k^{m-1})^2
  std::vector<double> probs;  // n_k / sum n
  double epoch_len = 0.0;     // ceil(sum n)
};

class BarbarPolicy final : public Policy {
 public:
  BarbarPolicy(std::size_t num_arms, std::uint64_t horizon, BarbarOptions options = {});

  std::string_view name() const override { return "barbar"; }
  std::size_t num_arms() const override { return num_arms_; }
  std::span<const std::size_t> choose(Pcg64& rng) override;
  void observe(const RewardView& rewards) override;
  std::size_t epoch() const override { return epoch_.m; }

  double lambda() const { return lambda_; }
  double delta() const { return delta_; }
  const BarbarEpoch& current() const { return epoch_; }
  const std::vector<double>& gaps() const { return gaps_; }
  std::size_t completed_epochs() const { return completed_; }

  // Closes the running epoch with the given totals.
  void end_epoch_with(std::span<const double> totals);

 private:
  void begin_epoch(std::size_t m);
  void finish_epoch();

  std::size_t num_arms_;
  double delta_;
  double lambda_;
  BarbarEpoch epoch_;
  std::vector<double> gaps_;  // Delta^{m-1}
  std::vector<double> totals_;
  DiscreteSampler sampler_;
  std::uint64_t rounds_in_epoch_ = 0;
  std::size_t completed_ = 0;
  std::size_t chosen_ = 0;
};

struct TsallisSolve {
  std::vector<double> weights;
  double x = 0.0;
  std::size_t newton_iterations = 0;
  bool used_bisection = false;
};

inline constexpr double kTsallisTolerance = 1e-12;
inline constexpr std::size_t kTsallisMaxIterations = 100;

// Finds x < min L so that sum_k 4 (eta (L_k - x))^{-2} = 1: Newton from
// min L - 2/eta, bisection on [min L - 2 sqrt(K)/eta, min L - 2/eta] if
// Newton stalls. Throws std::runtime_error if both fail.
TsallisSolve tsallis_weights(std::span<const double> losses, double eta);

class TsallisInfPolicy final : public Policy {
 public:
  explicit TsallisInfPolicy(std::size_t num_arms);

  std::string_view name() const override { return "tsallis"; }
  std::size_t num_arms() const override { return num_arms_; }
  std::span<const std::size_t> choose(Pcg64& rng) override;
  // Loss 1 - reward, importance weighted by the sampling weight.
  void observe(const RewardView& rewards) override;

  const std::vector<double>& loss_estimates() const { return losses_; }
  const std::vector<double>& weights() const { return weights_; }
  std::uint64_t round() const { return round_; }
  double learning_rate() const;  // 1/sqrt(t) for the upcoming round

 private:
  std::size_t num_arms_;
  std::vector<double> losses_;
  std::vector<double> weights_;
  std::uint64_t round_ = 0;  // rounds completed
  std::size_t chosen_ = 0;
};

}  // namespace barbat
