#include "barbat/environment.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace barbat {

Environment::Environment(std::vector<double> mu, RewardKind kind, double variance)
    : mu_(std::move(mu)), kind_(kind), variance_(variance), stddev_(std::sqrt(variance)) {
  if (mu_.empty()) throw std::invalid_argument("environment needs at least one arm");
  for (double m : mu_) {
    if (!(m >= 0.0 && m <= 1.0)) throw std::invalid_argument("arm means must lie in [0, 1]");
  }
  if (kind_ == RewardKind::kTruncatedNormal && !(variance_ > 0.0)) {
    throw std::invalid_argument("truncated-normal variance must be positive");
  }
}

double Environment::best_value(std::size_t count) const {
  std::vector<double> sorted = mu_;
  count = std::min(count, sorted.size());
  std::partial_sort(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(count),
                    sorted.end(), std::greater<>());
  double total = 0.0;
  for (std::size_t i = 0; i < count; ++i) total += sorted[i];
  return total;
}

std::vector<double> generate_means(std::size_t num_arms, Pcg64& rng, double low, double high) {
  if (num_arms < 2) throw std::invalid_argument("need at least 2 arms");
  if (!(low <= high) || low < 0.0 || high > 1.0) {
    throw std::invalid_argument("mean interval must satisfy 0 <= low <= high <= 1");
  }
  std::vector<double> mu(num_arms);
  for (double& m : mu) m = low + (high - low) * uniform01(rng);
  return mu;
}

}  // namespace barbat
