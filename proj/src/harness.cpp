#include "qrl/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>
#include <tuple>

namespace qrl {

std::string format_double(double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{})
    throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, ptr);
}

const char* agent_kind_name(AgentKind kind) {
  switch (kind) {
    case AgentKind::Qrl: return "qrl";
    case AgentKind::Td0: return "td0";
    case AgentKind::QLearning: return "qlearning";
  }
  throw std::invalid_argument("agent_kind_name: bad enum value");
}

AgentKind parse_agent_kind(const std::string& name) {
  if (name == "qrl") return AgentKind::Qrl;
  if (name == "td0") return AgentKind::Td0;
  if (name == "qlearning") return AgentKind::QLearning;
  throw ConfigError("unknown agent kind: '" + name +
                    "' (expected qrl, td0, or qlearning)");
}

void ExperimentConfig::validate() const {
  if (map_path.empty()) throw ConfigError("config: no map given");
  if (episodes < 1) throw ConfigError("config: episodes must be >= 1");
  if (seeds.empty()) throw ConfigError("config: need at least one seed");
  if (alphas.empty()) throw ConfigError("config: need at least one alpha");
  for (double a : alphas)
    if (!(a > 0.0 && a < 1.0))
      throw ConfigError("config: alpha " + format_double(a) +
                        " outside (0, 1)");
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw ConfigError("config: gamma outside [0, 1]");
  if (!(k > 0.0)) throw ConfigError("config: k must be > 0");
  if (!(epsilon >= 0.0 && epsilon <= 1.0))
    throw ConfigError("config: epsilon outside [0, 1]");
  if (max_steps < 0) throw ConfigError("config: max_steps must be >= 0");
}

// ---------------------------------------------------------------------------
// Config file parsing
// ---------------------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) parts.push_back(trim(item));
  return parts;
}

double parse_double(const std::string& s, const std::string& key) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw ConfigError("config: bad number for " + key + ": '" + s + "'");
  return value;
}

template <typename Int>
Int parse_int(const std::string& s, const std::string& key) {
  Int value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw ConfigError("config: bad integer for " + key + ": '" + s + "'");
  return value;
}

bool parse_bool(const std::string& s, const std::string& key) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw ConfigError("config: bad boolean for " + key + ": '" + s +
                    "' (expected true or false)");
}

}  // namespace

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw ConfigError("cannot open config file: " + path);

  ExperimentConfig cfg;
  std::map<std::string, bool> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(file, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key=value");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": empty key");
    if (seen[key])
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": duplicate key '" + key + "'");
    seen[key] = true;

    if (key == "agent") {
      cfg.agent = parse_agent_kind(value);
    } else if (key == "map") {
      cfg.map_path = value;
    } else if (key == "episodes") {
      cfg.episodes = parse_int<int>(value, key);
    } else if (key == "seeds") {
      cfg.seeds.clear();
      for (const std::string& item : split_list(value))
        cfg.seeds.push_back(parse_int<std::uint64_t>(item, key));
    } else if (key == "alpha") {
      cfg.alphas.clear();
      for (const std::string& item : split_list(value))
        cfg.alphas.push_back(parse_double(item, key));
    } else if (key == "gamma") {
      cfg.gamma = parse_double(value, key);
    } else if (key == "k") {
      cfg.k = parse_double(value, key);
    } else if (key == "epsilon") {
      cfg.epsilon = parse_double(value, key);
    } else if (key == "max_steps") {
      cfg.max_steps = parse_int<int>(value, key);
    } else if (key == "update") {
      if (value == "rotate-current") {
        cfg.update = AmplitudeUpdate::RotateCurrent;
      } else if (value == "from-uniform") {
        cfg.update = AmplitudeUpdate::FromUniform;
      } else {
        throw ConfigError(
            "config: bad update mode '" + value +
            "' (expected rotate-current or from-uniform)");
      }
    } else if (key == "sweep") {
      cfg.sweep = parse_bool(value, key);
    } else if (key == "log_episodes") {
      cfg.log_episodes = parse_bool(value, key);
    } else if (key == "out") {
      cfg.out_dir = value;
    } else {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": unknown key '" + key + "'");
    }
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Running
// ---------------------------------------------------------------------------

std::optional<int> converged_at_episode(const std::vector<int>& steps,
                                        int oracle_len, int window) {
  if (window < 1 || steps.size() < static_cast<std::size_t>(window))
    return std::nullopt;
  std::vector<int> buf(window);
  for (std::size_t e = window - 1; e < steps.size(); ++e) {
    std::copy(steps.begin() + (e + 1 - window), steps.begin() + (e + 1),
              buf.begin());
    // Median of the window; even windows average the two middle order stats.
    const int mid = window / 2;
    std::nth_element(buf.begin(), buf.begin() + mid, buf.end());
    double median = buf[mid];
    if (window % 2 == 0) {
      const int lo =
          *std::max_element(buf.begin(), buf.begin() + mid);
      median = (median + lo) / 2.0;
    }
    if (median == static_cast<double>(oracle_len)) return static_cast<int>(e);
  }
  return std::nullopt;
}

namespace {

RunSummary run_one_cell(const ExperimentConfig& cfg, const GridWorld& env,
                        int oracle_len, double alpha, std::uint64_t seed) {
  AgentConfig acfg;
  acfg.alpha = alpha;
  acfg.gamma = cfg.gamma;
  acfg.k = cfg.k;
  acfg.epsilon = cfg.epsilon;
  acfg.max_steps_per_episode = cfg.max_steps;
  acfg.seed = seed;
  acfg.update = cfg.update;
  acfg.sweep_values = cfg.sweep;
  acfg.validate();

  RunSummary summary;
  summary.agent = agent_kind_name(cfg.agent);
  summary.alpha = alpha;
  summary.seed = seed;
  summary.steps.reserve(cfg.episodes);
  summary.truncated.reserve(cfg.episodes);

  Rng rng(seed);
  auto record = [&](const EpisodeTrace& trace) {
    summary.steps.push_back(trace.steps);
    summary.truncated.push_back(trace.truncated ? 1 : 0);
  };

  switch (cfg.agent) {
    case AgentKind::Qrl: {
      QRLAgentState agent = make_qrl_state(env, acfg);
      for (int e = 0; e < cfg.episodes; ++e)
        record(qrl_episode(agent, env, rng));
      summary.final_greedy = greedy_path_length(env, agent);
      break;
    }
    case AgentKind::Td0: {
      ValueTable values(env.state_count());
      for (int e = 0; e < cfg.episodes; ++e)
        record(td0_episode(values, env, acfg, rng));
      summary.final_greedy = greedy_path_length(env, values, acfg.gamma);
      break;
    }
    case AgentKind::QLearning: {
      QTable q(env.state_count(), kActionCount);
      for (int e = 0; e < cfg.episodes; ++e)
        record(q_learning_episode(q, env, acfg, rng));
      summary.final_greedy = greedy_path_length(env, q);
      break;
    }
  }

  summary.converged_at = converged_at_episode(summary.steps, oracle_len);
  return summary;
}

}  // namespace

std::vector<RunSummary> run_experiment(const ExperimentConfig& cfg, int jobs) {
  cfg.validate();

  GridWorld env = [&] {
    try {
      return load_map(cfg.map_path);
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  }();
  const std::optional<int> oracle = env.bfs_shortest(env.start_state());
  if (!oracle)
    throw ConfigError("config: goal unreachable from start on " +
                      cfg.map_path);

  struct Cell {
    double alpha;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (double alpha : cfg.alphas)
    for (std::uint64_t seed : cfg.seeds) cells.push_back({alpha, seed});

  std::vector<RunSummary> results(cells.size());
  const int workers =
      std::clamp(jobs, 1, static_cast<int>(cells.size()));

  if (workers == 1) {
    for (std::size_t i = 0; i < cells.size(); ++i)
      results[i] = run_one_cell(cfg, env, *oracle, cells[i].alpha,
                                cells[i].seed);
    return results;
  }

  // Workers claim cells by index; the results slot order already is the
  // deterministic config order, so completion order does not matter.
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= cells.size()) return;
        results[i] = run_one_cell(cfg, env, *oracle, cells[i].alpha,
                                  cells[i].seed);
      }
    });
  }
  for (std::thread& t : pool) t.join();
  return results;
}

// ---------------------------------------------------------------------------
// Aggregation and CSV
// ---------------------------------------------------------------------------

std::vector<AggregateSeries> aggregate(const std::vector<RunSummary>& runs) {
  if (runs.empty())
    throw std::invalid_argument("aggregate: no run summaries");

  std::map<std::pair<std::string, double>, std::vector<const RunSummary*>>
      groups;
  for (const RunSummary& run : runs)
    groups[{run.agent, run.alpha}].push_back(&run);

  std::vector<AggregateSeries> out;
  for (const auto& [key, members] : groups) {
    const std::size_t episodes = members.front()->steps.size();
    for (const RunSummary* run : members)
      if (run->steps.size() != episodes)
        throw std::invalid_argument(
            "aggregate: episode counts differ within series " + key.first +
            " alpha=" + format_double(key.second));

    AggregateSeries series;
    series.agent = key.first;
    series.alpha = key.second;
    series.seeds = members.size();
    series.mean_steps.resize(episodes);
    series.median_steps.resize(episodes);
    series.min_steps.resize(episodes);
    series.max_steps.resize(episodes);

    std::vector<int> column(members.size());
    for (std::size_t e = 0; e < episodes; ++e) {
      for (std::size_t i = 0; i < members.size(); ++i)
        column[i] = members[i]->steps[e];
      std::sort(column.begin(), column.end());
      double sum = 0.0;
      for (int v : column) sum += v;
      series.mean_steps[e] = sum / static_cast<double>(column.size());
      const std::size_t mid = column.size() / 2;
      series.median_steps[e] =
          column.size() % 2 == 1
              ? column[mid]
              : (column[mid - 1] + column[mid]) / 2.0;
      series.min_steps[e] = column.front();
      series.max_steps[e] = column.back();
    }

    std::size_t converged = 0;
    for (const RunSummary* run : members)
      if (run->converged_at) ++converged;
    series.convergence_rate =
        static_cast<double>(converged) / static_cast<double>(members.size());
    out.push_back(std::move(series));
  }
  return out;  // std::map iteration already gave (agent, alpha) order
}

void emit_csv(const std::vector<RunSummary>& runs, const std::string& path) {
  std::vector<const RunSummary*> order;
  order.reserve(runs.size());
  for (const RunSummary& run : runs) order.push_back(&run);
  std::sort(order.begin(), order.end(),
            [](const RunSummary* a, const RunSummary* b) {
              return std::tie(a->agent, a->alpha, a->seed) <
                     std::tie(b->agent, b->alpha, b->seed);
            });

  std::ofstream file(path, std::ios::binary);  // binary: LF stays LF
  if (!file) throw std::runtime_error("cannot open for writing: " + path);
  std::string body = "agent,alpha,seed,episode,steps,truncated\n";
  for (const RunSummary* run : order) {
    const std::string prefix = run->agent + "," + format_double(run->alpha) +
                               "," + std::to_string(run->seed) + ",";
    for (std::size_t e = 0; e < run->steps.size(); ++e) {
      body += prefix;
      body += std::to_string(e);
      body += ',';
      body += std::to_string(run->steps[e]);
      body += ',';
      body += run->truncated[e] ? '1' : '0';
      body += '\n';
    }
  }
  file << body;
  if (!file) throw std::runtime_error("write failed: " + path);
}

std::vector<RunSummary> read_csv(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open: " + path);

  std::string line;
  if (!std::getline(file, line) ||
      trim(line) != "agent,alpha,seed,episode,steps,truncated")
    throw std::runtime_error("bad CSV header in " + path);

  std::vector<RunSummary> runs;
  int lineno = 1;
  while (std::getline(file, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields = split_list(line);
    // split_list splits on ',', which is exactly the CSV delimiter here
    // (no field ever contains a comma).
    if (fields.size() != 6)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected 6 fields");
    const std::string& agent = fields[0];
    const double alpha = parse_double(fields[1], "alpha");
    const std::uint64_t seed = parse_int<std::uint64_t>(fields[2], "seed");
    const int episode = parse_int<int>(fields[3], "episode");
    const int steps = parse_int<int>(fields[4], "steps");
    const int truncated = parse_int<int>(fields[5], "truncated");

    if (runs.empty() || runs.back().agent != agent ||
        runs.back().alpha != alpha || runs.back().seed != seed) {
      RunSummary fresh;
      fresh.agent = agent;
      fresh.alpha = alpha;
      fresh.seed = seed;
      runs.push_back(std::move(fresh));
    }
    RunSummary& run = runs.back();
    if (episode != static_cast<int>(run.steps.size()))
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": episodes out of order");
    run.steps.push_back(steps);
    run.truncated.push_back(truncated ? 1 : 0);
  }
  return runs;
}

}  // namespace qrl
