#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "barbat/harness/config.hpp"
#include "barbat/harness/experiment.hpp"

using namespace barbat;
using namespace barbat::harness;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("barbat_harness_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::vector<std::string> problems_of(std::string_view text, std::vector<std::string> overrides = {}) {
  try {
    parse_config(text, overrides);
  } catch (const ConfigError& e) {
    return e.problems();
  }
  return {};
}

bool mentions(const std::vector<std::string>& problems, std::string_view needle) {
  for (const auto& p : problems) {
    if (p.find(needle) != std::string::npos) return true;
  }
  return false;
}

const char* kSmall =
    "variant = barbat\nK = 4\nT = 3000\nC = 40\nattack = two-worst-target\n"
    "trials = 4\nmaster_seed = 3\nstride = 250\n";

}  // namespace

TEST_CASE("config text parses with comments and overrides") {
  const auto c = parse_config(
      "# comment\nvariant = ma   # trailing\n\nK=6\nT = 1000\nV = 3\nC = 10\n"
      "attack = epoch-front-load\nattack_epoch = 2\nenvironment = bernoulli\nlabel = ma6\n",
      {"T=2000", "trials=2"});
  CHECK(c.variant == Variant::kMa);
  CHECK(c.num_arms == 6);
  CHECK(c.horizon == 2000);
  CHECK(c.agents == 3);
  CHECK(c.trials == 2);
  CHECK(c.attack == AttackKind::kEpochFrontLoad);
  CHECK(c.attack_epoch == 2);
  CHECK(c.environment == RewardKind::kBernoulli);
  CHECK(c.resolved_label() == "ma6");
  CHECK(c.resolved_stride() == 4);
}

TEST_CASE("defaults resolve") {
  const auto c = parse_config("");
  CHECK(c.variant == Variant::kBarbat);
  CHECK(c.num_arms == 12);
  CHECK(c.horizon == 50000);
  CHECK(c.trials == 50);
  CHECK(c.resolved_stride() == 100);
  CHECK(c.resolved_label() == "barbat");
  CHECK(c.resolved_subset() == 1);
  const auto d = describe(c);
  CHECK(d.front().first == "variant");
  CHECK(d.back() == std::pair<std::string, std::string>{"label", "barbat"});
}

TEST_CASE("every problem is reported at once") {
  const auto p = problems_of("variant = ds\nK = 1\nd = 3\nC = -5\ncolour = blue\nT = ten\n");
  CHECK(mentions(p, "unknown key 'colour'"));
  CHECK(mentions(p, "T: expected"));
  CHECK(mentions(p, "K must be at least 2"));
  CHECK(mentions(p, "C must be non-negative"));
  CHECK(mentions(p, "ds needs 1 <= d <= K-1"));
  CHECK(p.size() >= 5);
}

TEST_CASE("variant preconditions") {
  CHECK(mentions(problems_of("C = 5\n"), "needs an attack"));
  CHECK(mentions(problems_of("variant = bb\nT = 1024\n"), "L >= 1"));
  CHECK(mentions(problems_of("variant = bb\nT = 1024\nL = 11\n"), "L <= log2(T)"));
  CHECK(problems_of("variant = bb\nT = 1024\nL = 10\n").empty());
  CHECK(mentions(problems_of("variant = tsallis\nattack = epoch-front-load\n"), "epoch-based"));
  CHECK(mentions(problems_of("variant = sog\nK = 65\n"), "at most 64"));
  CHECK(mentions(problems_of("variant = sog\np_edge = 2\n"), "p_edge"));
  CHECK(mentions(problems_of("variant = sog\ngraph = /nonexistent/g.txt\n"), "graph:"));
  CHECK(mentions(problems_of("variant = barbar\nbarbar_delta = 1\n"), "barbar_delta"));
  CHECK(mentions(problems_of("variant = uniform\nK = 4\nd = 5\n"), "d <= K"));
  CHECK(mentions(problems_of("variance = 0\n"), "variance"));
  CHECK(mentions(problems_of("mu_low = 0.9\nmu_high = 0.1\n"), "mu_low"));
  CHECK(mentions(problems_of("T = 10\nstride = 11\n"), "stride"));
  CHECK(mentions(problems_of("label = a/b\n"), "label"));
  CHECK(mentions(problems_of("", {"K"}), "not key=value"));
  CHECK(mentions(problems_of("K 4\n"), "expected key = value"));
  CHECK(mentions(problems_of("variant = fancy\n"), "one of"));
}

TEST_CASE("graph files are checked against K and observability") {
  const auto dir = scratch("graphs");
  fs::create_directories(dir);
  {
    std::ofstream(dir / "weak.graph") << "0: 0 2\n1: 1\n2:\n";
    std::ofstream(dir / "ok.graph") << FeedbackGraph::complete(3).to_text();
  }
  const std::string weak = "variant = sog\nK = 3\ngraph = " + (dir / "weak.graph").string() + "\n";
  CHECK(mentions(problems_of(weak), "graph:"));
  const std::string wrong_k = "variant = sog\nK = 4\ngraph = " + (dir / "ok.graph").string() + "\n";
  CHECK(mentions(problems_of(wrong_k), "vertices but K"));
  const std::string ok = "variant = sog\nK = 3\nT = 200\ntrials = 1\ngraph = " + (dir / "ok.graph").string() + "\n";
  CHECK(problems_of(ok).empty());
  CHECK_NOTHROW(run_trial(parse_config(ok), 0));
  fs::remove_all(dir);
}

TEST_CASE("aggregate matches a recomputation from the written trace") {
  const auto dir = scratch("aggregate");
  const auto c = parse_config(std::string(kSmall) + "variant = ma\nV = 3\n");
  run_experiment(c, dir, 2);
  std::istringstream trace(slurp(dir / "trace.csv"));
  std::string line;
  std::getline(trace, line);
  REQUIRE(line == kTraceHeader);
  // (t, trial) -> sum over agents, count of agents
  std::map<std::uint64_t, std::map<std::size_t, std::pair<double, int>>> cells;
  while (std::getline(trace, line)) {
    const auto f = split(line);
    REQUIRE(f.size() == 5);
    auto& cell = cells[std::stoull(f[1])][std::stoul(f[0])];
    cell.first += std::stod(f[3]);
    ++cell.second;
  }
  std::istringstream agg(slurp(dir / "aggregate.csv"));
  std::getline(agg, line);
  REQUIRE(line == kAggregateHeader);
  std::size_t rows = 0;
  while (std::getline(agg, line)) {
    const auto f = split(line);
    REQUIRE(f.size() == 4);
    const auto& per_trial = cells.at(std::stoull(f[0]));
    REQUIRE(per_trial.size() == 4);
    std::vector<double> x;
    for (const auto& [trial, cell] : per_trial) {
      REQUIRE(cell.second == 3);
      x.push_back(cell.first / 3.0);
    }
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= x.size();
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (x.size() - 1));
    CHECK(std::stod(f[1]) == doctest::Approx(mean).epsilon(1e-12));
    CHECK(std::stod(f[2]) == doctest::Approx(sd).epsilon(1e-9));
    CHECK(f[3] == "4");
    ++rows;
  }
  CHECK(rows == cells.size());
  CHECK(rows == 12);  // 250, 500, ..., 3000
  fs::remove_all(dir);
}

TEST_CASE("single-trial std is zero") {
  const auto c = parse_config(std::string(kSmall) + "trials = 1\n");
  const auto rows = aggregate(run_trials(c, 1));
  for (const auto& r : rows) CHECK(r.std == 0.0);
}

TEST_CASE("outputs are byte-identical across worker counts") {
  for (const char* extra : {"variant = barbat\n", "variant = ma\nV = 4\n", "variant = tsallis\nT = 800\nstride = 100\n",
                            "variant = sog\nK = 6\n", "variant = ds\nd = 2\n", "variant = barbar\n",
                            "variant = bb\nL = 3\n", "variant = uniform\nd = 2\n"}) {
    const auto c = parse_config(std::string(kSmall) + extra);
    const auto a = scratch("w1"), b = scratch("w3");
    run_experiment(c, a, 1);
    run_experiment(c, b, 3);
    CAPTURE(extra);
    CHECK(slurp(a / "trace.csv") == slurp(b / "trace.csv"));
    CHECK(slurp(a / "aggregate.csv") == slurp(b / "aggregate.csv"));
    fs::remove_all(a);
    fs::remove_all(b);
  }
}

TEST_CASE("variants see the same means and reward streams") {
  const auto a = parse_config(std::string(kSmall) + "variant = barbat\n");
  const auto b = parse_config(std::string(kSmall) + "variant = tsallis\n");
  for (std::size_t trial = 0; trial < 3; ++trial) {
    const auto sa = make_trial_setup(a, trial);
    const auto sb = make_trial_setup(b, trial);
    CHECK(sa.mu == sb.mu);
    CHECK(sa.reward_keys == sb.reward_keys);
  }
  CHECK(make_trial_setup(a, 0).mu != make_trial_setup(a, 1).mu);
  // The same trial under a different master seed changes.
  const auto c = parse_config(std::string(kSmall) + "master_seed = 4\n");
  CHECK(make_trial_setup(c, 0).mu != make_trial_setup(a, 0).mu);
}

TEST_CASE("traces are LF-terminated with round-trip numbers") {
  const auto c = parse_config(kSmall);
  const auto text = trace_csv(run_trials(c, 1));
  CHECK(text.find('\r') == std::string::npos);
  CHECK(text.back() == '\n');
  CHECK(format_double(0.1) == "0.1");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(format_double(2000) == "2000");
}

TEST_CASE("manifest records the configuration and per-trial facts") {
  const auto dir = scratch("manifest");
  run_experiment(parse_config(kSmall), dir, 1);
  const auto m = slurp(dir / "manifest.json");
  CHECK(m.find("\"code_version\"") != std::string::npos);
  CHECK(m.find("\"rng_algorithm\"") != std::string::npos);
  CHECK(m.find("\"epoch_at_T\"") != std::string::npos);
  CHECK(m.find("\"master_seed\": \"3\"") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("a failing trial leaves no partial outputs") {
  const auto dir = scratch("failing");
  // Acceptance probability so small that the rejection sampler gives up.
  const auto c = parse_config(std::string(kSmall) + "variance = 1e16\n");
  CHECK_THROWS_AS(run_experiment(c, dir, 2), std::runtime_error);
  CHECK(fs::exists(dir));
  CHECK_FALSE(fs::exists(dir / "trace.csv"));
  CHECK_FALSE(fs::exists(dir / "aggregate.csv"));
  CHECK_FALSE(fs::exists(dir / "manifest.json"));
  fs::remove_all(dir);
}

TEST_CASE("sweep fans out and reports per-config status") {
  const auto dir = scratch("sweep");
  const auto cfgs = scratch("sweep_cfgs");
  fs::create_directories(cfgs);
  {
    std::ofstream(cfgs / "a.cfg") << kSmall << "label = first\n";
    std::ofstream(cfgs / "b.cfg") << kSmall << "variant = barbar\nlabel = first\n";
    std::ofstream(cfgs / "bad.cfg") << "K = 1\n";
    std::ofstream(cfgs / "boom.cfg") << kSmall << "variance = 1e16\nlabel = boom\n";
  }
  const auto entries = sweep({(cfgs / "a.cfg").string(), (cfgs / "b.cfg").string(), (cfgs / "bad.cfg").string(),
                              (cfgs / "boom.cfg").string()},
                             dir, 2, {"trials=2"});
  REQUIRE(entries.size() == 4);
  CHECK(entries[0].ok);
  CHECK(entries[1].ok);
  CHECK(entries[0].out_dir != entries[1].out_dir);
  CHECK(entries[2].config_error);
  CHECK_FALSE(entries[3].ok);
  CHECK_FALSE(entries[3].config_error);
  CHECK(fs::exists(entries[0].out_dir / "trace.csv"));
  CHECK(fs::exists(entries[1].out_dir / "aggregate.csv"));

  std::istringstream cmp(slurp(dir / "comparison.csv"));
  std::string line;
  std::getline(cmp, line);
  CHECK(line == kComparisonHeader);
  std::vector<std::vector<std::string>> rows;
  while (std::getline(cmp, line)) rows.push_back(split(line));
  REQUIRE(rows.size() == 4);
  CHECK(rows[0][10] == "ok");
  CHECK(rows[0][6] == "2");
  CHECK(rows[1][1] == "barbar");
  CHECK(rows[2][10] == "config-error");
  CHECK(rows[3][10] == "error");
  fs::remove_all(dir);
  fs::remove_all(cfgs);
}
