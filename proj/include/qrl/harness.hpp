#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qrl/agents.hpp"
#include "qrl/gridworld.hpp"

namespace qrl {

// Configuration problems (bad key, bad range, unloadable map) — the CLI maps
// these to exit code 1, everything else unexpected to 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class AgentKind { Qrl, Td0, QLearning };

const char* agent_kind_name(AgentKind kind);
AgentKind parse_agent_kind(const std::string& name);  // ConfigError on junk

// One experiment = one map, one agent kind, a seed list, and an alpha list;
// every (alpha, seed) cell is an independent run.
struct ExperimentConfig {
  AgentKind agent = AgentKind::Qrl;
  std::string map_path;
  int episodes = 10000;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::vector<double> alphas = {0.06};
  double gamma = 0.99;
  double k = 0.01;
  double epsilon = 0.01;
  int max_steps = 0;  // 0 = auto per-episode cap
  AmplitudeUpdate update = AmplitudeUpdate::RotateCurrent;
  bool sweep = false;
  bool log_episodes = false;  // plot with a log-scaled episode axis
  std::string out_dir = ".";

  void validate() const;  // ConfigError on any bad range
};

// Flat key=value file, '#' starts a full-line comment, lists are
// comma-separated. Keys: agent, map, episodes, seeds, alpha, gamma, k,
// epsilon, max_steps, update, sweep, log_episodes, out. Unknown or duplicate
// keys are errors.
ExperimentConfig load_experiment_config(const std::string& path);

// Everything recorded about one (alpha, seed) run.
struct RunSummary {
  std::string agent;
  double alpha = 0.0;
  std::uint64_t seed = 0;
  std::vector<int> steps;                // one entry per episode
  std::vector<std::uint8_t> truncated;   // parallel to steps, 0/1
  std::optional<int> converged_at;       // first episode whose trailing
                                         // window median hits the oracle
  std::optional<int> final_greedy;       // greedy path length after training
};

inline constexpr int kConvergenceWindow = 100;

// First episode index e (0-based) with median(steps[e-99..e]) == oracle_len,
// or nullopt. Drives RunSummary.converged_at.
std::optional<int> converged_at_episode(const std::vector<int>& steps,
                                        int oracle_len,
                                        int window = kConvergenceWindow);

// Runs every (alpha, seed) cell of the experiment on `jobs` worker threads
// and returns summaries in config order (alpha-major, then seed). Results do
// not depend on `jobs`.
std::vector<RunSummary> run_experiment(const ExperimentConfig& cfg,
                                       int jobs = 1);

// Cross-seed statistics for one (agent, alpha) series.
struct AggregateSeries {
  std::string agent;
  double alpha = 0.0;
  std::size_t seeds = 0;
  std::vector<double> mean_steps;    // per episode, across seeds
  std::vector<double> median_steps;
  std::vector<int> min_steps;
  std::vector<int> max_steps;
  double convergence_rate = 0.0;     // fraction of seeds with converged_at
};

// Groups summaries by (agent, alpha), sorted ascending; all runs in a group
// must have the same episode count. Throws std::invalid_argument when empty.
std::vector<AggregateSeries> aggregate(const std::vector<RunSummary>& runs);

// CSV with header `agent,alpha,seed,episode,steps,truncated`, rows in
// (agent, alpha, seed, episode) order, LF endings, shortest round-trip
// number formatting. Identical runs produce identical bytes.
void emit_csv(const std::vector<RunSummary>& runs, const std::string& path);

// Inverse of emit_csv (converged_at / final_greedy are not stored in the
// CSV; re-derive converged_at with converged_at_episode and the map oracle).
std::vector<RunSummary> read_csv(const std::string& path);

// Standalone SVG learning curves: one median-steps polyline per series plus
// axes and a legend; log_x switches the episode axis to a log scale.
void emit_learning_curve_svg(const std::vector<AggregateSeries>& series,
                             const std::string& path, bool log_x);

// Shortest text that parses back to exactly this double ("0.06", "34").
std::string format_double(double value);

}  // namespace qrl
