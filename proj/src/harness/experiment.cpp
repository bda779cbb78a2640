#include "barbat/harness/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "barbat/baselines.hpp"
#include "barbat/barbat.hpp"
#include "barbat/multiagent.hpp"
#include "barbat/sog_barbat.hpp"

namespace barbat::harness {

namespace {

constexpr std::uint64_t kMeansTag = 0x6d65616e73ULL;    // "means"
constexpr std::uint64_t kGraphTag = 0x6772617068ULL;    // "graph"
constexpr std::uint64_t kPolicyTag = 0x706f6c6963ULL;   // "polic"

FeedbackGraph read_graph(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read graph file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return FeedbackGraph::parse(text.str());
}

std::unique_ptr<Policy> make_policy(const ExperimentConfig& c, const TrialSetup& setup) {
  switch (c.variant) {
    case Variant::kBarbat:
      return std::make_unique<BarbatPolicy>(c.num_arms);
    case Variant::kBb:
      return std::make_unique<BarbatPolicy>(
          BarbatPolicy::batched(c.num_arms, c.horizon, c.batches, c.bb_denominator));
    case Variant::kSog:
      return std::make_unique<SogBarbatPolicy>(*setup.graph);
    case Variant::kDs:
      return std::make_unique<DsBarbatPolicy>(c.num_arms, c.subset_size);
    case Variant::kBarbar:
      return std::make_unique<BarbarPolicy>(c.num_arms, c.horizon,
                                            BarbarOptions{c.barbar_delta, c.barbar_lambda});
    case Variant::kTsallis:
      return std::make_unique<TsallisInfPolicy>(c.num_arms);
    case Variant::kUniform:
      return std::make_unique<UniformPolicy>(c.num_arms, c.resolved_subset());
    case Variant::kMa:
      break;
  }
  throw std::logic_error("variant has no single-agent policy");
}

std::unique_ptr<AgentGroup> make_group(const ExperimentConfig& c, const TrialSetup& setup) {
  if (c.variant == Variant::kMa) return std::make_unique<MaBarbatGroup>(c.num_arms, c.agents);
  std::vector<std::unique_ptr<Policy>> agents;
  for (std::size_t v = 0; v < c.agents; ++v) agents.push_back(make_policy(c, setup));
  return std::make_unique<IndependentAgents>(std::move(agents));
}

std::string csv_safe(std::string text) {
  std::replace(text.begin(), text.end(), ',', ';');
  std::replace(text.begin(), text.end(), '\n', ' ');
  std::replace(text.begin(), text.end(), '\r', ' ');
  return text;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
  out.close();
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

}  // namespace

TrialSetup make_trial_setup(const ExperimentConfig& c, std::size_t trial) {
  TrialSetup setup;
  Pcg64 means_rng(c.master_seed, derive_key({trial, kMeansTag}));
  setup.mu = generate_means(c.num_arms, means_rng, c.mu_low, c.mu_high);
  if (c.variant == Variant::kSog) {
    if (!c.graph_file.empty()) {
      setup.graph = std::make_unique<FeedbackGraph>(read_graph(c.graph_file));
    } else {
      Pcg64 graph_rng(c.master_seed, derive_key({trial, kGraphTag}));
      setup.graph = std::make_unique<FeedbackGraph>(
          erdos_renyi_strongly_observable(c.num_arms, c.p_edge, c.p_loop, graph_rng));
    }
  }
  for (std::size_t v = 0; v < c.agents; ++v) {
    setup.reward_keys.push_back(reward_key(c.master_seed, trial, v));
    setup.policy_streams.emplace_back(c.master_seed, derive_key({trial, kPolicyTag, v}));
  }
  return setup;
}

TrialResult run_trial(const ExperimentConfig& c, std::size_t trial) {
  TrialSetup setup = make_trial_setup(c, trial);
  const Environment env(setup.mu, c.environment, c.variance);
  auto group = make_group(c, setup);
  Adversary adversary(AttackConfig{c.attack, c.budget, c.attack_epoch}, env.mu());
  AgentStreams streams;
  streams.policy = std::move(setup.policy_streams);
  for (std::uint64_t key : setup.reward_keys) streams.rewards.emplace_back(env, key);

  TrialResult result;
  result.trial = trial;
  const auto start = std::chrono::steady_clock::now();
  result.trace = run_episode(*group, env, adversary, c.horizon, streams, c.resolved_stride());
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  result.epochs = group->public_state().epoch;
  result.mu = setup.mu;
  return result;
}

std::vector<TrialResult> run_trials(const ExperimentConfig& c, std::size_t workers) {
  std::vector<TrialResult> results(c.trials);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto work = [&] {
    for (std::size_t i = next++; i < c.trials && !failed; i = next++) {
      try {
        results[i] = run_trial(c, i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  workers = std::clamp<std::size_t>(workers, 1, c.trials);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
  }
  if (error) {
    try {
      std::rethrow_exception(error);
    } catch (const std::exception& e) {
      throw std::runtime_error(std::string("trial failed: ") + e.what());
    }
  }
  return results;
}

std::vector<AggregateRow> aggregate(const std::vector<TrialResult>& results) {
  if (results.empty()) return {};
  const auto& rounds = results.front().trace.rounds;
  std::vector<AggregateRow> rows(rounds.size());
  const auto n = static_cast<double>(results.size());
  for (std::size_t j = 0; j < rounds.size(); ++j) {
    std::vector<double> values;
    values.reserve(results.size());
    for (const auto& r : results) {
      if (r.trace.rounds.size() != rounds.size() || r.trace.rounds[j] != rounds[j]) {
        throw std::logic_error("trials disagree on the checkpoint grid");
      }
      double agents_total = 0.0;
      for (const auto& agent : r.trace.cumulative) agents_total += agent[j];
      values.push_back(agents_total / static_cast<double>(r.trace.num_agents()));
    }
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double squares = 0.0;
    for (double v : values) squares += (v - mean) * (v - mean);
    rows[j] = {rounds[j], mean, results.size() > 1 ? std::sqrt(squares / (n - 1.0)) : 0.0,
               results.size()};
  }
  return rows;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string trace_csv(const std::vector<TrialResult>& results) {
  std::string out(kTraceHeader);
  out += '\n';
  for (const auto& r : results) {
    const auto& tr = r.trace;
    for (std::size_t j = 0; j < tr.rounds.size(); ++j) {
      for (std::size_t v = 0; v < tr.num_agents(); ++v) {
        out += std::to_string(r.trial);
        out += ',';
        out += std::to_string(tr.rounds[j]);
        out += ',';
        out += std::to_string(v);
        out += ',';
        out += format_double(tr.cumulative[v][j]);
        out += ',';
        out += format_double(tr.corruption_spent[j]);
        out += '\n';
      }
    }
  }
  return out;
}

std::string aggregate_csv(const std::vector<AggregateRow>& rows) {
  std::string out(kAggregateHeader);
  out += '\n';
  for (const auto& row : rows) {
    out += std::to_string(row.t) + ',' + format_double(row.mean) + ',' + format_double(row.std) + ',' +
           std::to_string(row.trials) + '\n';
  }
  return out;
}

ExperimentSummary run_experiment(const ExperimentConfig& c, const std::filesystem::path& out_dir,
                                 std::size_t workers) {
  namespace fs = std::filesystem;
  const fs::path trace_path = out_dir / "trace.csv";
  const fs::path aggregate_path = out_dir / "aggregate.csv";
  const fs::path manifest_path = out_dir / "manifest.json";
  auto cleanup = [&] {
    std::error_code ignored;
    for (const auto& p : {trace_path, aggregate_path, manifest_path}) fs::remove(p, ignored);
  };

  try {
    fs::create_directories(out_dir);
    const auto results = run_trials(c, workers);
    const auto rows = aggregate(results);

    nlohmann::ordered_json manifest;
    manifest["code_version"] = kCodeVersion;
    manifest["rng_algorithm"] = kRngAlgorithm;
    auto& config = manifest["config"];
    for (const auto& [key, value] : describe(c)) config[key] = value;
    manifest["workers"] = workers;
    manifest["aggregate"] = {
        {"value", "per-trial mean over agents of cumulative pseudo-regret"},
        {"std_estimator", "unbiased (n-1); 0 when trials = 1"},
        {"band", "mean +/- 1 std"},
    };
    if (c.variant == Variant::kTsallis) manifest["tsallis_learning_rate"] = "1/sqrt(t)";
    if (c.variant == Variant::kBarbar) {
      const BarbarPolicy probe(c.num_arms, c.horizon, {c.barbar_delta, c.barbar_lambda});
      manifest["barbar_resolved"] = {{"delta", probe.delta()}, {"lambda", probe.lambda()}};
    }
    auto& trials = manifest["trials"];
    trials = nlohmann::ordered_json::array();
    double wall_total = 0.0;
    for (const auto& r : results) {
      wall_total += r.wall_seconds;
      trials.push_back({{"trial", r.trial},
                        {"wall_seconds", r.wall_seconds},
                        {"final_mean_regret", r.trace.mean_final_regret()},
                        {"corruption_spent", r.trace.corruption_spent.back()},
                        {"epoch_at_T", r.epochs},
                        {"broadcasts", r.trace.broadcasts},
                        {"mu", r.mu}});
    }

    write_file(trace_path, trace_csv(results));
    write_file(aggregate_path, aggregate_csv(rows));
    write_file(manifest_path, manifest.dump(2) + "\n");

    ExperimentSummary summary;
    summary.label = c.resolved_label();
    summary.final_mean = rows.back().mean;
    summary.final_std = rows.back().std;
    summary.mean_trial_seconds = wall_total / static_cast<double>(results.size());
    summary.trials = results.size();
    return summary;
  } catch (...) {
    cleanup();
    throw;
  }
}

std::vector<SweepEntry> sweep(const std::vector<std::string>& config_paths,
                              const std::filesystem::path& out_dir, std::size_t workers,
                              const std::vector<std::string>& overrides) {
  if (config_paths.empty()) throw std::invalid_argument("sweep needs at least one config");
  std::filesystem::create_directories(out_dir);
  std::vector<SweepEntry> entries;
  std::set<std::string> used;
  for (std::size_t i = 0; i < config_paths.size(); ++i) {
    SweepEntry entry;
    entry.source = config_paths[i];
    try {
      entry.config = load_config(config_paths[i], overrides);
    } catch (const ConfigError& e) {
      entry.config_error = true;
      entry.error = e.what();
      entries.push_back(std::move(entry));
      continue;
    }
    std::string dir = entry.config.resolved_label();
    if (!used.insert(dir).second) {
      dir = std::to_string(i) + "-" + dir;
      used.insert(dir);
    }
    entry.out_dir = out_dir / dir;
    try {
      entry.summary = run_experiment(entry.config, entry.out_dir, workers);
      entry.ok = true;
    } catch (const std::exception& e) {
      entry.error = e.what();
    }
    entries.push_back(std::move(entry));
  }

  std::string table(kComparisonHeader);
  table += '\n';
  for (const auto& e : entries) {
    const auto& c = e.config;
    const std::string label = e.config_error ? e.source : c.resolved_label();
    table += csv_safe(label) + ',';
    if (e.config_error) {
      table += ",,,,,,,,,config-error," + csv_safe(e.error) + '\n';
      continue;
    }
    table += std::string(to_string(c.variant)) + ',' + std::to_string(c.num_arms) + ',' +
             std::to_string(c.horizon) + ',' + format_double(c.budget) + ',' + std::to_string(c.agents) +
             ',' + std::to_string(c.trials) + ',';
    if (e.ok) {
      table += format_double(e.summary.final_mean) + ',' + format_double(e.summary.final_std) + ',' +
               format_double(e.summary.mean_trial_seconds) + ",ok,\n";
    } else {
      table += ",,,error," + csv_safe(e.error) + '\n';
    }
  }
  write_file(out_dir / "comparison.csv", table);
  return entries;
}

}  // namespace barbat::harness
