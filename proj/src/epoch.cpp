#include "barbat/epoch.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace barbat {

ScheduleKnobs batched_knobs(std::uint64_t horizon, std::size_t batches,
                            double denominator) {
  if (horizon < 2) throw std::invalid_argument("batched schedule needs T >= 2");
  if (batches < 1 ||
      static_cast<double>(batches) > std::log2(static_cast<double>(horizon))) {
    throw std::invalid_argument("batch count L must satisfy 1 <= L <= log2(T), got L=" +
                                std::to_string(batches));
  }
  if (denominator == 0.0) denominator = 2.0 * static_cast<double>(batches + 1);
  if (denominator <= 0.0) throw std::invalid_argument("batched exponent denominator must be > 0");
  ScheduleKnobs knobs;
  knobs.kind = ScheduleKind::kBatched;
  knobs.base = std::max(std::pow(static_cast<double>(horizon), 1.0 / denominator), 2.0);
  return knobs;
}

double power_of(double base, double exponent) {
  if (base == 2.0 && exponent == std::trunc(exponent)) {
    return std::ldexp(1.0, static_cast<int>(exponent));
  }
  return std::pow(base, exponent);
}

double EpochParams::gap_floor() const {
  return power_of(base, -static_cast<double>(m));
}

EpochParams compute_epoch_params(std::size_t m, std::size_t num_arms,
                                 const ScheduleKnobs& knobs, double previous_end) {
  if (num_arms < 2) throw std::invalid_argument("need at least 2 arms (ln K must be positive)");
  if (m < 1) throw std::invalid_argument("epoch index starts at 1");
  if (!(knobs.base > 1.0)) throw std::invalid_argument("epoch growth base must exceed 1");
  if (knobs.kind == ScheduleKind::kMultiAgent && knobs.agents < 1) {
    throw std::invalid_argument("multi-agent schedule needs V >= 1");
  }
  if (knobs.kind == ScheduleKind::kSubset &&
      (knobs.subset_size < 1 || knobs.subset_size >= num_arms)) {
    throw std::invalid_argument("subset size d must lie in [1, K-1]");
  }

  const double k = static_cast<double>(num_arms);
  const double md = static_cast<double>(m);
  const double base = knobs.base;
  const double v = knobs.kind == ScheduleKind::kMultiAgent ? static_cast<double>(knobs.agents) : 1.0;

  double log_term = std::log(k);
  if (knobs.kind == ScheduleKind::kMultiAgent) log_term = std::log(v * k);
  if (knobs.kind == ScheduleKind::kBatched) log_term = std::log(base * k);

  EpochParams p;
  p.m = m;
  p.base = base;
  p.zeta = (md + 4.0) * power_of(base, 2.0 * (md + 4.0)) * log_term;
  p.delta = 1.0 / (v * k * p.zeta);
  p.lambda = power_of(base, 8.0) * std::log(4.0 * k / p.delta) / v;
  p.beta = p.delta / (v * k);
  double raw_len = k * p.lambda * power_of(base, 2.0 * (md - 1.0));
  if (knobs.kind == ScheduleKind::kSubset) raw_len /= static_cast<double>(knobs.subset_size);
  p.epoch_len = std::ceil(raw_len);
  p.epoch_end = previous_end + p.epoch_len;
  return p;
}

GapEstimates initial_estimates(std::size_t num_arms) {
  GapEstimates e;
  e.r.assign(num_arms, 0.0);
  e.gaps.assign(num_arms, 1.0);
  e.s.assign(num_arms, 0.0);
  e.counts.assign(num_arms, 0.0);
  return e;
}

GapEstimates update_gap_estimates(std::span<const double> totals,
                                  std::span<const double> counts,
                                  const EpochParams& params, std::size_t subset_size) {
  const std::size_t k = totals.size();
  if (counts.size() != k) throw std::invalid_argument("totals and counts differ in length");
  if (subset_size < 1 || subset_size > k) throw std::invalid_argument("subset size out of range");

  GapEstimates e;
  e.s.assign(totals.begin(), totals.end());
  e.counts.assign(counts.begin(), counts.end());
  e.r.resize(k);
  std::vector<double> lower(k);
  const double numer = 4.0 * std::log(4.0 / params.beta);
  for (std::size_t i = 0; i < k; ++i) {
    if (!(counts[i] > 0.0)) {
      throw std::invalid_argument("estimator divisor must be positive for every arm");
    }
    e.r[i] = std::min(totals[i] / counts[i], 1.0);
    lower[i] = e.r[i] - std::sqrt(numer / counts[i]);
  }
  std::nth_element(lower.begin(), lower.begin() + static_cast<std::ptrdiff_t>(subset_size - 1),
                   lower.end(), std::greater<>());
  e.r_star = lower[subset_size - 1];

  const double floor = params.gap_floor();
  e.gaps.resize(k);
  for (std::size_t i = 0; i < k; ++i) e.gaps[i] = std::max(floor, e.r_star - e.r[i]);
  return e;
}

std::vector<std::size_t> select_best(std::span<const double> r, std::size_t subset_size) {
  if (subset_size < 1 || subset_size > r.size()) {
    throw std::invalid_argument("subset size out of range");
  }
  std::vector<std::size_t> order(r.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return r[a] > r[b]; });
  order.resize(subset_size);
  std::sort(order.begin(), order.end());
  return order;
}

std::vector<double> target_pulls(const EpochParams& params,
                                 std::span<const double> previous_gaps) {
  std::vector<double> n(previous_gaps.size());
  for (std::size_t i = 0; i < n.size(); ++i) {
    n[i] = params.lambda / (previous_gaps[i] * previous_gaps[i]);
  }
  return n;
}

ArmSchedule build_schedule(const EpochParams& params, std::span<const double> previous_gaps,
                           std::span<const std::size_t> best) {
  const std::size_t k = previous_gaps.size();
  if (best.empty() || best.size() >= k + 1) throw std::invalid_argument("bad best-arm set");

  ArmSchedule s;
  s.n = target_pulls(params, previous_gaps);
  s.best.assign(best.begin(), best.end());
  std::vector<bool> in_best(k, false);
  for (std::size_t b : best) {
    if (b >= k) throw std::invalid_argument("best arm index out of range");
    in_best[b] = true;
  }

  double off_best = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    if (!in_best[i]) off_best += s.n[i];
  }
  const double best_budget = params.epoch_len - off_best / static_cast<double>(best.size());
  if (best_budget < 0.0) {
    throw std::logic_error("epoch length smaller than the off-best pull budget");
  }

  s.n_tilde = s.n;
  for (std::size_t b : best) s.n_tilde[b] = best_budget;
  s.probs.resize(k);
  for (std::size_t i = 0; i < k; ++i) s.probs[i] = s.n_tilde[i] / params.epoch_len;
  return s;
}

std::size_t epochs_started(std::uint64_t horizon, std::size_t num_arms,
                           const ScheduleKnobs& knobs) {
  std::size_t count = 0;
  double end = 0.0;
  const auto t = static_cast<double>(horizon);
  while (end < t) {
    ++count;
    end = compute_epoch_params(count, num_arms, knobs, end).epoch_end;
  }
  return count;
}

}  // namespace barbat
