#pragma once

// Trial batteries: per-trial stream derivation, parallel execution, and the
// trace / aggregate / manifest outputs.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "barbat/episode.hpp"
#include "barbat/graph.hpp"
#include "barbat/harness/config.hpp"

namespace barbat::harness {

inline constexpr std::string_view kCodeVersion = "barbat-bandits 1.0.0";
inline constexpr std::string_view kTraceHeader = "trial,t,agent,cum_regret,corruption_spent";
inline constexpr std::string_view kAggregateHeader = "t,mean,std,trials";

// Everything a trial draws from the master seed. Depends on (seed, trial)
// only, so every variant sees the same means, graph and reward streams.
struct TrialSetup {
  std::vector<double> mu;
  std::unique_ptr<FeedbackGraph> graph;  // sog only
  std::vector<std::uint64_t> reward_keys;  // one per agent
  std::vector<Pcg64> policy_streams;        // one per agent
};

TrialSetup make_trial_setup(const ExperimentConfig& config, std::size_t trial);

struct TrialResult {
  std::size_t trial = 0;
  RegretTrace trace;
  double wall_seconds = 0.0;
  std::size_t epochs = 0;  // epoch reached by agent 0 at T, 0 if epoch-free
  std::vector<double> mu;
};

TrialResult run_trial(const ExperimentConfig& config, std::size_t trial);

// Runs every trial on `workers` threads; results sorted by trial index.
// Rethrows the first trial failure as std::runtime_error.
std::vector<TrialResult> run_trials(const ExperimentConfig& config, std::size_t workers);

struct AggregateRow {
  std::uint64_t t = 0;
  double mean = 0.0;
  double std = 0.0;  // unbiased (n - 1); 0 for a single trial
  std::size_t trials = 0;
};

// Per trial, the value at a checkpoint is the mean over agents of the
// cumulative individual regret.
std::vector<AggregateRow> aggregate(const std::vector<TrialResult>& results);

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

std::string trace_csv(const std::vector<TrialResult>& results);
std::string aggregate_csv(const std::vector<AggregateRow>& rows);

struct ExperimentSummary {
  std::string label;
  double final_mean = 0.0;
  double final_std = 0.0;
  double mean_trial_seconds = 0.0;
  std::size_t trials = 0;
};

// Writes trace.csv, aggregate.csv and manifest.json into `out_dir`. On any
// failure the files written so far are removed and the error rethrown.
ExperimentSummary run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                                 std::size_t workers);

struct SweepEntry {
  std::string source;  // config path
  bool ok = false;
  bool config_error = false;
  std::string error;
  ExperimentConfig config;
  ExperimentSummary summary;
  std::filesystem::path out_dir;
};

// One subdirectory per config plus comparison.csv in `out_dir`. A failing
// config is reported in its row and does not stop the others.
std::vector<SweepEntry> sweep(const std::vector<std::string>& config_paths,
                              const std::filesystem::path& out_dir, std::size_t workers,
                              const std::vector<std::string>& overrides = {});

inline constexpr std::string_view kComparisonHeader =
    "label,variant,K,T,C,V,trials,final_mean,final_std,mean_trial_seconds,status,error";

}  // namespace barbat::harness
