#pragma once

// Experiment configuration: a flat `key = value` text format, command-line
// overrides, and exhaustive validation.

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "barbat/adversary.hpp"
#include "barbat/environment.hpp"

namespace barbat::harness {

enum class Variant { kBarbat, kMa, kBb, kSog, kDs, kBarbar, kTsallis, kUniform };

std::string_view to_string(Variant v);
std::string_view to_string(AttackKind a);
std::string_view to_string(RewardKind r);

struct ExperimentConfig {
  Variant variant = Variant::kBarbat;
  std::size_t num_arms = 12;         // K
  std::uint64_t horizon = 50000;     // T
  double budget = 0.0;               // C
  std::size_t trials = 50;
  std::uint64_t master_seed = 1;
  std::size_t agents = 1;            // V; independent copies unless variant = ma
  std::size_t batches = 0;           // L, bb only
  double bb_denominator = 0.0;       // 0 = 2(L+1)
  std::size_t subset_size = 0;       // d, ds and uniform; 0 = 1 for uniform
  std::string graph_file;            // sog; empty = Erdos-Renyi
  double p_edge = 0.5;
  double p_loop = 0.5;
  AttackKind attack = AttackKind::kNone;
  std::size_t attack_epoch = 1;
  RewardKind environment = RewardKind::kTruncatedNormal;
  double variance = 0.1;
  double mu_low = 0.02;
  double mu_high = 0.96;
  std::uint64_t stride = 0;          // 0 = max(T / 500, 1)
  double barbar_delta = 0.0;         // 0 = 1/T
  double barbar_lambda = 0.0;        // 0 = BARBAR's own formula
  std::string label;                 // empty = variant name

  std::uint64_t resolved_stride() const;
  std::string resolved_label() const;
  std::size_t resolved_subset() const;
};

// Carries every problem found, one message per entry.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

// Sets one key. Appends a message to `problems` on an unknown key or an
// unparsable value instead of throwing.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value,
                   std::vector<std::string>& problems);

// Lines are `key = value`; `#` starts a comment. Collects problems without
// throwing.
void apply_text(ExperimentConfig& config, std::string_view text, std::string_view origin,
                std::vector<std::string>& problems);

// `key=value` as given on the command line.
void apply_override(ExperimentConfig& config, std::string_view assignment,
                    std::vector<std::string>& problems);

// Variant-specific preconditions, all of them.
std::vector<std::string> validate(const ExperimentConfig& config);

// Reads a config file, applies overrides, validates. Throws ConfigError with
// every problem found.
ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

// Parses text, applies overrides, validates.
ExperimentConfig parse_config(std::string_view text, const std::vector<std::string>& overrides = {});

// Every key with its resolved value, in a fixed order.
std::vector<std::pair<std::string, std::string>> describe(const ExperimentConfig& config);

}  // namespace barbat::harness
