#include "barbat/harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "barbat/graph.hpp"

namespace barbat::harness {

namespace {

struct VariantName {
  Variant variant;
  std::string_view name;
};

constexpr VariantName kVariants[] = {
    {Variant::kBarbat, "barbat"}, {Variant::kMa, "ma"},           {Variant::kBb, "bb"},
    {Variant::kSog, "sog"},       {Variant::kDs, "ds"},           {Variant::kBarbar, "barbar"},
    {Variant::kTsallis, "tsallis"}, {Variant::kUniform, "uniform"},
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <class T>
bool parse_number(std::string_view text, T& out) {
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({"cannot read '" + path + "'"});
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

}  // namespace

std::string_view to_string(Variant v) {
  for (const auto& entry : kVariants) {
    if (entry.variant == v) return entry.name;
  }
  return "?";
}

std::string_view to_string(AttackKind a) {
  switch (a) {
    case AttackKind::kNone: return "none";
    case AttackKind::kTwoWorstTarget: return "two-worst-target";
    case AttackKind::kEpochFrontLoad: return "epoch-front-load";
  }
  return "?";
}

std::string_view to_string(RewardKind r) {
  return r == RewardKind::kBernoulli ? "bernoulli" : "truncated-normal";
}

std::uint64_t ExperimentConfig::resolved_stride() const {
  if (stride != 0) return stride;
  return std::max<std::uint64_t>(horizon / 500, 1);
}

std::string ExperimentConfig::resolved_label() const {
  return label.empty() ? std::string(to_string(variant)) : label;
}

std::size_t ExperimentConfig::resolved_subset() const {
  return subset_size == 0 ? 1 : subset_size;
}

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error([&] {
        std::string what = "invalid configuration:";
        for (const auto& p : problems) what += "\n  " + p;
        return what;
      }()),
      problems_(std::move(problems)) {}

void apply_setting(ExperimentConfig& c, std::string_view key, std::string_view value,
                   std::vector<std::string>& problems) {
  const std::string k(key);
  auto bad = [&](std::string_view expected) {
    problems.push_back(k + ": expected " + std::string(expected) + ", got '" + std::string(value) + "'");
  };
  auto as_size = [&](auto& field) {
    std::uint64_t v = 0;
    if (!parse_number(value, v)) return bad("a non-negative integer");
    field = static_cast<std::remove_reference_t<decltype(field)>>(v);
  };
  auto as_double = [&](double& field) {
    double v = 0.0;
    if (!parse_number(value, v) || !std::isfinite(v)) return bad("a finite number");
    field = v;
  };

  if (k == "variant") {
    for (const auto& entry : kVariants) {
      if (entry.name == value) {
        c.variant = entry.variant;
        return;
      }
    }
    bad("one of barbat|ma|bb|sog|ds|barbar|tsallis|uniform");
  } else if (k == "K") {
    as_size(c.num_arms);
  } else if (k == "T") {
    as_size(c.horizon);
  } else if (k == "C") {
    as_double(c.budget);
  } else if (k == "trials") {
    as_size(c.trials);
  } else if (k == "master_seed") {
    as_size(c.master_seed);
  } else if (k == "V") {
    as_size(c.agents);
  } else if (k == "L") {
    as_size(c.batches);
  } else if (k == "bb_denominator") {
    as_double(c.bb_denominator);
  } else if (k == "d") {
    as_size(c.subset_size);
  } else if (k == "graph") {
    c.graph_file = std::string(value);
  } else if (k == "p_edge") {
    as_double(c.p_edge);
  } else if (k == "p_loop") {
    as_double(c.p_loop);
  } else if (k == "attack") {
    if (value == "none") c.attack = AttackKind::kNone;
    else if (value == "two-worst-target") c.attack = AttackKind::kTwoWorstTarget;
    else if (value == "epoch-front-load") c.attack = AttackKind::kEpochFrontLoad;
    else bad("one of none|two-worst-target|epoch-front-load");
  } else if (k == "attack_epoch") {
    as_size(c.attack_epoch);
  } else if (k == "environment") {
    if (value == "truncated-normal") c.environment = RewardKind::kTruncatedNormal;
    else if (value == "bernoulli") c.environment = RewardKind::kBernoulli;
    else bad("truncated-normal or bernoulli");
  } else if (k == "variance") {
    as_double(c.variance);
  } else if (k == "mu_low") {
    as_double(c.mu_low);
  } else if (k == "mu_high") {
    as_double(c.mu_high);
  } else if (k == "stride") {
    as_size(c.stride);
  } else if (k == "barbar_delta") {
    as_double(c.barbar_delta);
  } else if (k == "barbar_lambda") {
    as_double(c.barbar_lambda);
  } else if (k == "label") {
    c.label = std::string(value);
  } else {
    problems.push_back("unknown key '" + k + "'");
  }
}

void apply_text(ExperimentConfig& config, std::string_view text, std::string_view origin,
                std::vector<std::string>& problems) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      problems.push_back(std::string(origin) + ":" + std::to_string(line_no) + ": expected key = value");
      continue;
    }
    apply_setting(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), problems);
  }
}

void apply_override(ExperimentConfig& config, std::string_view assignment,
                    std::vector<std::string>& problems) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    problems.push_back("override '" + std::string(assignment) + "' is not key=value");
    return;
  }
  apply_setting(config, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)), problems);
}

std::vector<std::string> validate(const ExperimentConfig& c) {
  std::vector<std::string> p;
  const bool epochless = c.variant == Variant::kTsallis || c.variant == Variant::kUniform;
  if (c.num_arms < 2) p.push_back("K must be at least 2");
  if (c.horizon < 1) p.push_back("T must be at least 1");
  if (c.trials < 1) p.push_back("trials must be at least 1");
  if (c.agents < 1) p.push_back("V must be at least 1");
  if (c.budget < 0.0) p.push_back("C must be non-negative");
  if (c.budget > 0.0 && c.attack == AttackKind::kNone) p.push_back("C > 0 needs an attack strategy");
  if (c.attack_epoch < 1) p.push_back("attack_epoch must be at least 1");
  if (c.attack == AttackKind::kEpochFrontLoad && epochless) {
    p.push_back("epoch-front-load needs an epoch-based variant");
  }
  if (c.environment == RewardKind::kTruncatedNormal && !(c.variance > 0.0)) {
    p.push_back("variance must be positive");
  }
  if (!(c.mu_low >= 0.0 && c.mu_low < c.mu_high && c.mu_high <= 1.0)) {
    p.push_back("means range needs 0 <= mu_low < mu_high <= 1");
  }
  if (c.horizon >= 1 && c.stride > c.horizon) p.push_back("stride exceeds T");
  if (c.label.find_first_of("/\\ \t") != std::string::npos) p.push_back("label must not contain slashes or spaces");

  switch (c.variant) {
    case Variant::kBb:
      if (c.batches < 1) p.push_back("bb needs L >= 1");
      else if (c.horizon >= 2 && static_cast<double>(c.batches) > std::log2(static_cast<double>(c.horizon))) {
        p.push_back("bb needs L <= log2(T)");
      }
      if (c.bb_denominator < 0.0) p.push_back("bb_denominator must be non-negative");
      break;
    case Variant::kDs:
      if (c.subset_size < 1 || c.subset_size + 1 > c.num_arms) p.push_back("ds needs 1 <= d <= K-1");
      break;
    case Variant::kUniform:
      if (c.resolved_subset() > c.num_arms) p.push_back("uniform needs d <= K");
      break;
    case Variant::kSog:
      if (c.num_arms > FeedbackGraph::kMaxVertices) p.push_back("sog supports at most 64 arms");
      if (!c.graph_file.empty()) {
        try {
          std::ifstream in(c.graph_file, std::ios::binary);
          if (!in) throw std::invalid_argument("cannot read graph file '" + c.graph_file + "'");
          std::ostringstream text;
          text << in.rdbuf();
          const auto g = FeedbackGraph::parse(text.str());
          if (g.num_vertices() != c.num_arms) p.push_back("graph has " + std::to_string(g.num_vertices()) + " vertices but K = " + std::to_string(c.num_arms));
          g.require_strongly_observable();
        } catch (const std::exception& e) {
          p.push_back(std::string("graph: ") + e.what());
        }
      } else if (!(c.p_edge >= 0.0 && c.p_edge <= 1.0 && c.p_loop >= 0.0 && c.p_loop <= 1.0)) {
        p.push_back("p_edge and p_loop must lie in [0, 1]");
      }
      break;
    case Variant::kBarbar:
      if (c.barbar_delta < 0.0 || c.barbar_delta >= 1.0) p.push_back("barbar_delta must lie in [0, 1)");
      if (c.barbar_lambda < 0.0) p.push_back("barbar_lambda must be non-negative");
      if (c.horizon < 2) p.push_back("barbar needs T >= 2");
      break;
    default:
      break;
  }
  return p;
}

ExperimentConfig parse_config(std::string_view text, const std::vector<std::string>& overrides) {
  ExperimentConfig config;
  std::vector<std::string> problems;
  apply_text(config, text, "config", problems);
  for (const auto& o : overrides) apply_override(config, o, problems);
  auto more = validate(config);
  problems.insert(problems.end(), more.begin(), more.end());
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return config;
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  ExperimentConfig config;
  std::vector<std::string> problems;
  apply_text(config, slurp(path), path, problems);
  for (const auto& o : overrides) apply_override(config, o, problems);
  auto more = validate(config);
  problems.insert(problems.end(), more.begin(), more.end());
  if (!problems.empty()) throw ConfigError(std::move(problems));
  return config;
}

std::vector<std::pair<std::string, std::string>> describe(const ExperimentConfig& c) {
  return {
      {"variant", std::string(to_string(c.variant))},
      {"K", std::to_string(c.num_arms)},
      {"T", std::to_string(c.horizon)},
      {"C", format_number(c.budget)},
      {"trials", std::to_string(c.trials)},
      {"master_seed", std::to_string(c.master_seed)},
      {"V", std::to_string(c.agents)},
      {"L", std::to_string(c.batches)},
      {"bb_denominator", format_number(c.bb_denominator)},
      {"d", std::to_string(c.resolved_subset())},
      {"graph", c.graph_file},
      {"p_edge", format_number(c.p_edge)},
      {"p_loop", format_number(c.p_loop)},
      {"attack", std::string(to_string(c.attack))},
      {"attack_epoch", std::to_string(c.attack_epoch)},
      {"environment", std::string(to_string(c.environment))},
      {"variance", format_number(c.variance)},
      {"mu_low", format_number(c.mu_low)},
      {"mu_high", format_number(c.mu_high)},
      {"stride", std::to_string(c.resolved_stride())},
      {"barbar_delta", format_number(c.barbar_delta)},
      {"barbar_lambda", format_number(c.barbar_lambda)},
      {"label", c.resolved_label()},
  };
}

}  // namespace barbat::harness
