#include "barbat/sog_barbat.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace barbat {

namespace {
// Relative slack when deciding that an arm met its target; the running sum
// H + (n - H) need not round back to n exactly.
constexpr double kTargetSlack = 1e-12;
}  // namespace

ObservationPlan plan_epoch_observations(const FeedbackGraph& g, std::span<const double> targets,
                                        double epoch_len, std::size_t best_arm) {
  const std::size_t k = g.num_vertices();
  if (targets.size() != k) throw std::invalid_argument("one observation target per arm required");
  if (best_arm >= k) throw std::invalid_argument("best arm out of range");

  ObservationPlan plan;
  plan.z.assign(k, 0.0);
  plan.h.assign(k, 0.0);
  auto satisfied = [&](std::size_t v) { return plan.h[v] >= targets[v] * (1.0 - kTargetSlack); };

  VertexMask remaining = 0;
  for (std::size_t v = 0; v < k; ++v) {
    if (!satisfied(v)) remaining |= vertex_bit(v);
  }
  while (remaining != 0) {
    if (plan.iterations() > k) throw std::logic_error("observation planning failed to converge");
    auto dominators = oods(g, remaining);
    double step = std::numeric_limits<double>::infinity();
    for (std::size_t v = 0; v < k; ++v) {
      if ((remaining & vertex_bit(v)) != 0) step = std::min(step, targets[v] - plan.h[v]);
    }
    for (std::size_t d : dominators) {
      plan.z[d] += step;
      for (std::size_t v = 0; v < k; ++v) {
        if (g.has_edge(d, v)) plan.h[v] += step;
      }
    }
    for (std::size_t v = 0; v < k; ++v) {
      if ((remaining & vertex_bit(v)) != 0 && satisfied(v)) remaining &= ~vertex_bit(v);
    }
    plan.dominating_sets.push_back(std::move(dominators));
  }

  double off_best = 0.0;
  for (std::size_t v = 0; v < k; ++v) {
    if (v != best_arm) off_best += plan.z[v];
  }
  if (off_best > epoch_len) {
    throw std::logic_error("planned pulls off the best arm exceed the epoch length");
  }
  plan.n_tilde = plan.z;
  plan.n_tilde[best_arm] = epoch_len - off_best;
  plan.n_hat.assign(k, 0.0);
  for (std::size_t from = 0; from < k; ++from) {
    for (std::size_t to = 0; to < k; ++to) {
      if (g.has_edge(from, to)) plan.n_hat[to] += plan.n_tilde[from];
    }
  }
  return plan;
}

SogBarbatPolicy::SogBarbatPolicy(FeedbackGraph graph) : graph_(std::move(graph)) {
  graph_.require_strongly_observable();
  const std::size_t k = graph_.num_vertices();
  if (k < 2) throw std::invalid_argument("need at least 2 arms");
  out_lists_.resize(k);
  for (std::size_t u = 0; u < k; ++u) {
    for (std::size_t v = 0; v < k; ++v) {
      if (graph_.has_edge(u, v)) out_lists_[u].push_back(v);
    }
  }
  state_.estimates = initial_estimates(k);
  begin_epoch(1);
}

void SogBarbatPolicy::begin_epoch(std::size_t m) {
  const std::size_t k = graph_.num_vertices();
  const double previous_end = m > 1 ? state_.params.epoch_end : 0.0;
  state_.params = compute_epoch_params(m, k, ScheduleKnobs{}, previous_end);
  const auto best = select_best(state_.estimates.r, 1);
  ArmSchedule& s = state_.schedule;
  s.n = target_pulls(state_.params, state_.estimates.gaps);
  s.best = best;
  plan_ = plan_epoch_observations(graph_, s.n, state_.params.epoch_len, best.front());
  s.n_tilde = plan_.n_tilde;
  s.probs.resize(k);
  for (std::size_t v = 0; v < k; ++v) s.probs[v] = s.n_tilde[v] / state_.params.epoch_len;
  sampler_ = DiscreteSampler(s.probs);
  state_.totals.assign(k, 0.0);
  state_.rounds_in_epoch = 0;
}

std::span<const std::size_t> SogBarbatPolicy::choose(Pcg64& rng) {
  chosen_ = sampler_.sample(rng);
  return {&chosen_, 1};
}

void SogBarbatPolicy::observe(const RewardView& rewards) {
  for (std::size_t v : out_lists_[chosen_]) state_.totals[v] += rewards[v];
  ++state_.rounds_in_epoch;
  if (state_.epoch_complete()) finish_epoch();
}

void SogBarbatPolicy::finish_epoch() {
  state_.estimates = update_gap_estimates(state_.totals, plan_.n_hat, state_.params, 1);
  ++state_.completed_epochs;
  begin_epoch(state_.params.m + 1);
}

void SogBarbatPolicy::end_epoch_with(std::span<const double> totals) {
  if (totals.size() != graph_.num_vertices()) throw std::invalid_argument("totals length differs from K");
  state_.totals.assign(totals.begin(), totals.end());
  finish_epoch();
}

}  // namespace barbat
