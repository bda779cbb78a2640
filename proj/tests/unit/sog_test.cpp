#include <doctest.h>

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "barbat/sog_barbat.hpp"
#include "graphs.hpp"

using namespace barbat;

namespace {

double sum(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

// Observations each arm gets from a pull plan, recomputed from the edge list.
std::vector<double> observations(const FeedbackGraph& g, const std::vector<double>& pulls) {
  std::vector<double> h(g.num_vertices(), 0.0);
  for (std::size_t u = 0; u < g.num_vertices(); ++u) {
    for (std::size_t v = 0; v < g.num_vertices(); ++v) {
      if (g.has_edge(u, v)) h[v] += pulls[u];
    }
  }
  return h;
}

}  // namespace

TEST_CASE("complete graph plans one pull per target level") {
  const auto g = FeedbackGraph::complete(5);
  const auto equal = plan_epoch_observations(g, std::vector<double>(5, 30.0), 1000, 4);
  CHECK(equal.iterations() == 1);
  CHECK(sum(equal.z) == doctest::Approx(30));

  const std::vector<double> targets{10, 20, 30, 40, 50};
  const auto plan = plan_epoch_observations(g, targets, 1000, 4);
  CHECK(plan.iterations() == 5);
  CHECK(sum(plan.z) == doctest::Approx(50));
  for (std::size_t v = 0; v < 5; ++v) CHECK(plan.h[v] == doctest::Approx(50));
  // Every observation budget is the whole epoch.
  for (double n : plan.n_hat) CHECK(n == doctest::Approx(1000));
  CHECK(sum(plan.n_tilde) == doctest::Approx(1000));
}

TEST_CASE("targets already met plan no pulls off the best arm") {
  const auto g = FeedbackGraph::complete(4);
  const auto plan = plan_epoch_observations(g, std::vector<double>{0, 0, 0, 0}, 64, 2);
  CHECK(plan.iterations() == 0);
  CHECK(plan.n_tilde == std::vector<double>{0, 0, 64, 0});
}

TEST_CASE("self-loops only reduce to the full bandit budget") {
  FeedbackGraph g(3);
  for (std::size_t v = 0; v < 3; ++v) g.add_edge(v, v);
  const std::vector<double> targets{5, 7, 9};
  const auto plan = plan_epoch_observations(g, targets, 100, 0);
  CHECK(plan.z == std::vector<double>{5, 7, 9});
  CHECK(plan.n_tilde == std::vector<double>{84, 7, 9});
  CHECK(plan.n_hat == plan.n_tilde);
}

TEST_CASE("plans on random strongly observable graphs") {
  Pcg64 rng(12, 12);
  for (int i = 0; i < 1000; ++i) {
    const auto g = erdos_renyi_strongly_observable(12, 0.5, 0.5, rng);
    std::vector<double> targets(12);
    for (double& t : targets) t = 1.0 + 5000.0 * uniform01(rng);
    const std::size_t best = uniform_below(rng, 12);
    const double len = 1e6;
    const auto plan = plan_epoch_observations(g, targets, len, best);
    REQUIRE(plan.iterations() <= 12);
    const auto h = observations(g, plan.z);
    double probs = 0.0;
    for (std::size_t v = 0; v < 12; ++v) {
      REQUIRE(plan.h[v] == doctest::Approx(h[v]).epsilon(1e-12));
      REQUIRE(h[v] >= targets[v] * (1 - 1e-12));
      REQUIRE(plan.n_tilde[v] >= 0.0);
      REQUIRE(plan.n_hat[v] >= targets[v] * (1 - 1e-12));
      probs += plan.n_tilde[v] / len;
    }
    REQUIRE(probs == doctest::Approx(1.0).epsilon(1e-12));
    REQUIRE(observations(g, plan.n_tilde) == plan.n_hat);
  }
}

TEST_CASE("planning throws when off-best pulls exceed the epoch") {
  FeedbackGraph g(3);
  for (std::size_t v = 0; v < 3; ++v) g.add_edge(v, v);
  CHECK_THROWS_AS(plan_epoch_observations(g, std::vector<double>{1, 60, 60}, 100, 0), std::logic_error);
  CHECK_THROWS_AS(plan_epoch_observations(g, std::vector<double>{1, 2}, 100, 0), std::invalid_argument);
  CHECK_THROWS_AS(plan_epoch_observations(g, std::vector<double>{1, 2, 3}, 100, 3), std::invalid_argument);
}

TEST_CASE("policy rejects graphs that are not strongly observable") {
  FeedbackGraph weak(3);
  weak.add_edge(0, 0);
  weak.add_edge(1, 1);
  weak.add_edge(0, 2);
  CHECK_THROWS_AS(SogBarbatPolicy{weak}, std::invalid_argument);
  CHECK_THROWS_AS(SogBarbatPolicy(FeedbackGraph::complete(1)), std::invalid_argument);
}

TEST_CASE("observe credits every out-neighbour of the pulled arm") {
  FeedbackGraph g(4);
  for (std::size_t v = 0; v < 4; ++v) g.add_edge(v, v);
  g.add_edge(0, 1);
  g.add_edge(2, 3);
  g.add_edge(2, 0);
  SogBarbatPolicy policy(g);
  const Environment env({0.1, 0.4, 0.6, 0.8}, RewardKind::kTruncatedNormal);
  const RewardStream stream(env, 11);
  Pcg64 rng(2, 2);
  std::vector<double> expected(4, 0.0);
  for (std::uint64_t t = 1; t <= 2000; ++t) {
    const auto arm = policy.choose(rng).front();
    for (std::size_t v = 0; v < 4; ++v) {
      if (g.has_edge(arm, v)) expected[v] += stream.reward(t, v);
    }
    policy.observe(RewardView(stream, t, nullptr));
  }
  REQUIRE(policy.epoch() == 1);
  for (std::size_t v = 0; v < 4; ++v) CHECK(policy.state().totals[v] == doctest::Approx(expected[v]));
}

TEST_CASE("full feedback observes every arm on every round") {
  SogBarbatPolicy policy(FeedbackGraph::complete(6));
  Pcg64 rng(3, 0);
  for (int e = 0; e < 6; ++e) {
    const auto& s = policy.state();
    for (double n : policy.plan().n_hat) REQUIRE(n == doctest::Approx(s.params.epoch_len));
    CHECK(sum(s.schedule.probs) == doctest::Approx(1.0));
    std::vector<double> totals(6);
    for (double& x : totals) x = s.params.epoch_len * uniform01(rng);
    policy.end_epoch_with(totals);
  }
  CHECK(policy.epoch() == 7);
}

TEST_CASE("sampling frequencies follow the planned probabilities") {
  Pcg64 grng(4, 4);
  const auto g = erdos_renyi_strongly_observable(8, 0.3, 0.5, grng);
  SogBarbatPolicy policy(g);
  const auto probs = policy.state().schedule.probs;
  Pcg64 rng(5, 5);
  std::vector<double> counts(8, 0.0);
  const int n = 20000;  // stays inside epoch 1 for K = 8
  REQUIRE(policy.state().params.epoch_len > n);
  const Environment env(std::vector<double>(8, 0.5), RewardKind::kBernoulli);
  const RewardStream stream(env, 0);
  for (int t = 1; t <= n; ++t) {
    ++counts[policy.choose(rng).front()];
    policy.observe(RewardView(stream, static_cast<std::uint64_t>(t), nullptr));
  }
  for (std::size_t v = 0; v < 8; ++v) {
    const double se = std::sqrt(std::max(probs[v] * (1 - probs[v]), 1e-12) / n);
    CHECK(std::abs(counts[v] / n - probs[v]) <= 4.0 * se + 1e-12);
  }
}
