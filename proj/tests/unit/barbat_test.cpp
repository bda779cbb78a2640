#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>
#include <vector>

#include "barbat/barbat.hpp"

using namespace barbat;

namespace {

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

// Random totals consistent with the realized budgets.
std::vector<double> random_totals(const BarbatState& s, Pcg64& rng) {
  std::vector<double> totals(s.schedule.n_tilde.size());
  for (std::size_t k = 0; k < totals.size(); ++k) totals[k] = s.schedule.n_tilde[k] * uniform01(rng);
  return totals;
}

}  // namespace

TEST_CASE("plain schedule stays a distribution across many epochs") {
  for (std::size_t k : {2, 5, 12}) {
    BarbatPolicy policy(k);
    Pcg64 rng(k, 0);
    for (int e = 0; e < 15; ++e) {
      const auto& s = policy.state();
      CHECK(sum(s.schedule.probs) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(sum(s.schedule.n_tilde) == doctest::Approx(s.params.epoch_len).epsilon(1e-12));
      for (std::size_t i = 0; i < k; ++i) {
        REQUIRE(s.schedule.probs[i] >= 0.0);
        REQUIRE(s.schedule.probs[i] <= 1.0);
        REQUIRE(s.estimates.gaps[i] >= std::ldexp(1.0, -static_cast<int>(s.params.m - 1)));
      }
      policy.end_epoch_with(random_totals(s, rng));
    }
    CHECK(policy.epoch() == 16);
    CHECK(policy.state().completed_epochs == 15);
  }
}

TEST_CASE("BarbatPolicy refuses schedules it does not run") {
  ScheduleKnobs ds;
  ds.kind = ScheduleKind::kSubset;
  ds.subset_size = 2;
  CHECK_THROWS_AS(BarbatPolicy(4, ds), std::invalid_argument);
  ScheduleKnobs ma;
  ma.kind = ScheduleKind::kMultiAgent;
  CHECK_THROWS_AS(BarbatPolicy(4, ma), std::invalid_argument);
  CHECK_THROWS_AS(BarbatPolicy(1), std::invalid_argument);
}

TEST_CASE("two separated arms: best-arm share in the final epoch") {
  // With Delta^{m-1} <= 1 the off-best arm keeps at least lambda_m of the
  // N_m = 2 lambda_m 4^{m-1} pulls, so the share is capped by
  // 1 - 1/(2 4^{m-1}). At T = 1e5 the final epoch is m = 3: cap 31/32.
  const Environment env({1.0, 0.0}, RewardKind::kBernoulli);
  const std::uint64_t horizon = 100000;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    BarbatPolicy policy(2);
    Pcg64 rng(seed, 3);
    const RewardStream stream(env, seed);
    std::size_t final_epoch_pulls = 0, final_epoch_best = 0;
    for (std::uint64_t t = 1; t <= horizon; ++t) {
      const std::size_t m = policy.epoch();
      const auto arm = policy.choose(rng).front();
      if (m == 3) {
        ++final_epoch_pulls;
        final_epoch_best += arm == 0;
      }
      policy.observe(RewardView(stream, t, nullptr));
    }
    REQUIRE(policy.epoch() == 3);
    const double share = static_cast<double>(final_epoch_best) / static_cast<double>(final_epoch_pulls);
    const double cap = policy.state().schedule.probs[0];
    const double se = std::sqrt(cap * (1 - cap) / static_cast<double>(final_epoch_pulls));
    CAPTURE(seed);
    CHECK(cap <= 31.0 / 32.0);
    CHECK(cap > 0.95);
    CHECK(std::abs(share - cap) < 4.0 * se);
  }
}

TEST_CASE("batched grid for T = 2^20, L = 4") {
  const std::uint64_t horizon = 1ULL << 20;
  const auto knobs = batched_knobs(horizon, 4);
  const auto grid = BatchGrid::from_schedule(horizon, 6, knobs);
  REQUIRE(!grid.boundaries.empty());
  CHECK(grid.boundaries.back() == horizon);
  CHECK(grid.boundaries.size() <= 4);
  for (std::size_t j = 1; j < grid.boundaries.size(); ++j) {
    CHECK(grid.boundaries[j] > grid.boundaries[j - 1]);
  }
}

TEST_CASE("batched policy hides feedback until the batch ends") {
  const std::uint64_t horizon = 1ULL << 16;
  auto policy = BarbatPolicy::batched(3, horizon, 3);
  CHECK(policy.is_batched());
  CHECK(policy.name() == "bb-barbat");
  const Environment env({0.2, 0.5, 0.8}, RewardKind::kTruncatedNormal);
  const RewardStream stream(env, 7);
  Pcg64 rng(1, 1);
  auto probs = policy.state().schedule.probs;
  std::size_t epoch = policy.epoch();
  for (std::uint64_t t = 1; t <= horizon; ++t) {
    policy.choose(rng);
    policy.observe(RewardView(stream, t, nullptr));
    if (policy.epoch() == epoch) {
      REQUIRE(policy.state().schedule.probs == probs);
      REQUIRE(sum(policy.state().totals) == 0.0);
      REQUIRE(policy.pending_observations() == policy.state().rounds_in_epoch);
    } else {
      epoch = policy.epoch();
      probs = policy.state().schedule.probs;
      REQUIRE(policy.pending_observations() == 0);
    }
  }
  CHECK(policy.observation_events() == policy.state().completed_epochs);
  CHECK(policy.observation_events() <= 3);
  const auto grid = BatchGrid::from_schedule(horizon, 3, policy.knobs());
  CHECK(grid.boundaries.size() <= 3);
  CHECK(policy.epoch() == grid.boundaries.size());
}

TEST_CASE("batched gap floor uses the growth base") {
  auto policy = BarbatPolicy::batched(4, 1ULL << 20, 4);
  Pcg64 rng(3, 0);
  policy.end_epoch_with(random_totals(policy.state(), rng));
  for (double g : policy.state().estimates.gaps) CHECK(g >= 0.25);
  CHECK(*std::min_element(policy.state().estimates.gaps.begin(), policy.state().estimates.gaps.end()) ==
        doctest::Approx(0.25));
}

TEST_CASE("systematic sampling with saturated marginals") {
  std::vector<std::size_t> out;
  for (double u : {0.0, 0.3, 0.999999}) {
    systematic_sample(std::vector<double>{1, 1, 0, 0}, 2, u, out);
    CHECK(out == std::vector<std::size_t>{0, 1});
    systematic_sample(std::vector<double>{0, 1, 0, 1}, 2, u, out);
    CHECK(out == std::vector<std::size_t>{1, 3});
  }
}

TEST_CASE("systematic sampling rejects inconsistent marginals") {
  std::vector<std::size_t> out;
  CHECK_THROWS_AS(systematic_sample(std::vector<double>{0.5, 0.5, 0.5}, 2, 0.1, out),
                  std::invalid_argument);
  CHECK_THROWS_AS(systematic_sample(std::vector<double>{1.5, 0.5}, 2, 0.1, out), std::invalid_argument);
  CHECK_THROWS_AS(systematic_sample(std::vector<double>{0.5, 0.5}, 0, 0.1, out), std::invalid_argument);
}

TEST_CASE("systematic sampling hits uniform marginals") {
  const std::size_t k = 12, d = 3;
  const std::vector<double> q(k, static_cast<double>(d) / k);
  Pcg64 rng(8, 8);
  std::vector<std::size_t> counts(k, 0), out;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    systematic_sample(q, d, uniform01(rng), out);
    REQUIRE(out.size() == d);
    REQUIRE(std::set<std::size_t>(out.begin(), out.end()).size() == d);
    for (auto a : out) ++counts[a];
  }
  const double p = static_cast<double>(d) / k;
  const double sigma = std::sqrt(p * (1 - p) / n);
  for (std::size_t a = 0; a < k; ++a) CHECK(std::abs(counts[a] / double(n) - p) < 3.0 * sigma);
}

TEST_CASE("systematic sampling reproduces random marginals") {
  Pcg64 rng(99, 2);
  for (int vec = 0; vec < 5; ++vec) {
    const std::size_t k = 6 + uniform_below(rng, 8);
    const std::size_t d = 1 + uniform_below(rng, k - 1);
    // Random marginals in [0, 1] summing to d: scale, then cap and spread.
    std::vector<double> q(k);
    for (double& x : q) x = uniform01(rng);
    for (int pass = 0; pass < 50; ++pass) {
      const double s = sum(q);
      for (double& x : q) x = std::min(1.0, x * static_cast<double>(d) / s);
    }
    const double s = sum(q);
    for (double& x : q) x *= static_cast<double>(d) / s;
    if (*std::max_element(q.begin(), q.end()) > 1.0) continue;
    std::vector<std::size_t> counts(k, 0), out;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      systematic_sample(q, d, uniform01(rng), out);
      REQUIRE(out.size() == d);
      for (auto a : out) ++counts[a];
    }
    for (std::size_t a = 0; a < k; ++a) {
      const double sigma = std::sqrt(std::max(q[a] * (1 - q[a]), 1e-12) / n);
      CHECK(std::abs(counts[a] / double(n) - q[a]) <= 3.0 * sigma + 1e-12);
    }
  }
}

TEST_CASE("DS schedule marginals sum to d and stay below one") {
  for (std::size_t d : {1, 3, 5}) {
    DsBarbatPolicy policy(12, d);
    Pcg64 rng(d, 0);
    for (int e = 0; e < 12; ++e) {
      const auto& s = policy.state();
      CHECK(sum(s.schedule.probs) == doctest::Approx(static_cast<double>(d)).epsilon(1e-12));
      CHECK(sum(s.schedule.n_tilde) == doctest::Approx(d * s.params.epoch_len).epsilon(1e-12));
      CHECK(s.schedule.best.size() == d);
      for (std::size_t i = 0; i < 12; ++i) {
        REQUIRE(s.schedule.probs[i] >= 0.0);
        REQUIRE(s.schedule.probs[i] <= 1.0 + 1e-12);
        REQUIRE(s.schedule.n_tilde[i] >= s.schedule.n[i] * (1 - 1e-12));
      }
      policy.end_epoch_with(random_totals(s, rng));
    }
  }
  CHECK_THROWS_AS(DsBarbatPolicy(4, 0), std::invalid_argument);
  CHECK_THROWS_AS(DsBarbatPolicy(4, 4), std::invalid_argument);
}

TEST_CASE("DS policy plays d distinct arms and observes all of them") {
  DsBarbatPolicy policy(6, 2);
  const Environment env({0.1, 0.2, 0.3, 0.4, 0.5, 0.6}, RewardKind::kBernoulli);
  const RewardStream stream(env, 3);
  Pcg64 rng(4, 4);
  double observed = 0.0;
  for (std::uint64_t t = 1; t <= 500; ++t) {
    const auto x = policy.choose(rng);
    REQUIRE(x.size() == 2);
    REQUIRE(x[0] != x[1]);
    for (auto a : x) observed += stream.reward(t, a);
    policy.observe(RewardView(stream, t, nullptr));
  }
  CHECK(sum(policy.state().totals) == doctest::Approx(observed));
}
