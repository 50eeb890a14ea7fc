#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qrl/harness.hpp"

namespace fs = std::filesystem;

namespace {

// Per-(agent, alpha) convergence counts for the run report.
void print_run_report(const std::vector<qrl::RunSummary>& runs) {
  std::map<std::pair<std::string, double>, std::pair<int, int>> counts;
  for (const qrl::RunSummary& run : runs) {
    auto& [converged, total] = counts[{run.agent, run.alpha}];
    ++total;
    if (run.converged_at) ++converged;
  }
  for (const auto& [key, c] : counts) {
    std::cout << key.first << " alpha=" << qrl::format_double(key.second)
              << ": converged " << c.first << "/" << c.second << " seeds\n";
  }
}

int do_run(const std::string& config_path, const CLI::App& cmd,
           const std::string& out_dir, std::uint64_t seed,
           const std::string& agent_name, const std::string& map_path,
           int episodes, int jobs) {
  qrl::ExperimentConfig cfg = qrl::load_experiment_config(config_path);
  if (cmd.count("--out")) cfg.out_dir = out_dir;
  if (cmd.count("--seed")) cfg.seeds = {seed};
  if (cmd.count("--agent")) cfg.agent = qrl::parse_agent_kind(agent_name);
  if (cmd.count("--map")) cfg.map_path = map_path;
  if (cmd.count("--episodes")) cfg.episodes = episodes;

  const std::vector<qrl::RunSummary> runs = qrl::run_experiment(cfg, jobs);

  fs::create_directories(cfg.out_dir);
  const std::string csv_path =
      (fs::path(cfg.out_dir) / "results.csv").string();
  qrl::emit_csv(runs, csv_path);
  std::cout << "wrote " << csv_path << "\n";
  print_run_report(runs);
  return 0;
}

// Reads a results CSV back and re-derives convergence against the map's
// shortest-path oracle.
std::vector<qrl::RunSummary> load_runs_with_convergence(
    const std::string& csv_path, const std::string& map_path) {
  std::vector<qrl::RunSummary> runs = qrl::read_csv(csv_path);
  const qrl::GridWorld env = qrl::load_map(map_path);
  const std::optional<int> oracle = env.bfs_shortest(env.start_state());
  if (!oracle)
    throw qrl::ConfigError("goal unreachable from start on " + map_path);
  for (qrl::RunSummary& run : runs)
    run.converged_at = qrl::converged_at_episode(run.steps, *oracle);
  return runs;
}

int do_aggregate(const std::string& csv_path, const std::string& map_path,
                 const CLI::App& cmd, const std::string& out_path) {
  const std::vector<qrl::RunSummary> runs =
      load_runs_with_convergence(csv_path, map_path);
  const std::vector<qrl::AggregateSeries> series = qrl::aggregate(runs);

  std::cout << "agent,alpha,seeds,convergence_rate,final_median_steps\n";
  for (const qrl::AggregateSeries& s : series) {
    std::cout << s.agent << "," << qrl::format_double(s.alpha) << ","
              << s.seeds << "," << qrl::format_double(s.convergence_rate)
              << "," << qrl::format_double(s.median_steps.back()) << "\n";
  }

  if (cmd.count("--out")) {
    std::ofstream file(out_path, std::ios::binary);
    if (!file)
      throw std::runtime_error("cannot open for writing: " + out_path);
    file << "agent,alpha,episode,mean_steps,median_steps,min_steps,max_steps\n";
    for (const qrl::AggregateSeries& s : series) {
      for (std::size_t e = 0; e < s.median_steps.size(); ++e) {
        file << s.agent << "," << qrl::format_double(s.alpha) << "," << e
             << "," << qrl::format_double(s.mean_steps[e]) << ","
             << qrl::format_double(s.median_steps[e]) << ","
             << s.min_steps[e] << "," << s.max_steps[e] << "\n";
      }
    }
    if (!file) throw std::runtime_error("write failed: " + out_path);
    std::cout << "wrote " << out_path << "\n";
  }
  return 0;
}

int do_plot(const std::string& csv_path, const std::string& out_path,
            const CLI::App& cmd, const std::string& config_path, bool log_x) {
  bool use_log = log_x;
  if (cmd.count("--config"))
    use_log = qrl::load_experiment_config(config_path).log_episodes;

  std::vector<qrl::RunSummary> runs = qrl::read_csv(csv_path);
  const std::vector<qrl::AggregateSeries> series = qrl::aggregate(runs);
  qrl::emit_learning_curve_svg(series, out_path, use_log);
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int do_oracle(const std::string& map_path, double gamma) {
  const qrl::GridWorld env = qrl::load_map(map_path);
  const std::optional<int> oracle = env.bfs_shortest(env.start_state());
  const qrl::ValueTable values = qrl::value_iteration(env, gamma);

  std::cout << "map=" << map_path << "\n"
            << "size=" << env.width() << "x" << env.height() << "\n"
            << "start=(" << env.x_of(env.start_state()) << ","
            << env.y_of(env.start_state()) << ")\n"
            << "goal=(" << env.x_of(env.goal_state()) << ","
            << env.y_of(env.goal_state()) << ")\n";
  if (oracle) {
    std::cout << "bfs_shortest=" << *oracle << "\n";
  } else {
    std::cout << "bfs_shortest=unreachable\n";
  }
  std::cout << "v_start=" << qrl::format_double(values[env.start_state()])
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gridworld learning experiment harness"};
  app.require_subcommand(1);

  std::string config_path, out_dir, agent_name, map_path;
  std::uint64_t seed = 0;
  int episodes = 0;
  int jobs = 1;

  CLI::App* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("--config", config_path, "experiment config file")
      ->required();
  run->add_option("--out", out_dir, "output directory (overrides config)");
  run->add_option("--seed", seed, "replace the seed list with one seed");
  run->add_option("--agent", agent_name, "agent override (qrl|td0|qlearning)");
  run->add_option("--map", map_path, "map file override");
  run->add_option("--episodes", episodes, "episode count override");
  run->add_option("--jobs", jobs, "worker threads for (alpha, seed) cells");

  std::string csv_path, agg_out;
  CLI::App* agg = app.add_subcommand("aggregate",
                                     "summarize a results CSV across seeds");
  agg->add_option("--csv", csv_path, "results CSV from `run`")->required();
  agg->add_option("--map", map_path, "map file (for the oracle length)")
      ->required();
  agg->add_option("--out", agg_out, "also write the per-episode aggregate CSV");

  std::string svg_out, plot_config;
  bool log_x = false;
  CLI::App* plot = app.add_subcommand("plot", "render learning curves as SVG");
  plot->add_option("--csv", csv_path, "results CSV from `run`")->required();
  plot->add_option("--out", svg_out, "output SVG path")->required();
  plot->add_option("--config", plot_config,
                   "take the episode-axis scale from this config");
  plot->add_flag("--log", log_x, "log-scaled episode axis");

  double gamma = 0.99;
  CLI::App* oracle = app.add_subcommand(
      "oracle", "print shortest path and optimal start value for a map");
  oracle->add_option("--map", map_path, "map file")->required();
  oracle->add_option("--gamma", gamma, "discount for the optimal values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);  // prints help or the parse error
    return code == 0 ? 0 : 1;      // usage problems are config errors
  }

  try {
    if (*run)
      return do_run(config_path, *run, out_dir, seed, agent_name, map_path,
                    episodes, jobs);
    if (*agg) return do_aggregate(csv_path, map_path, *agg, agg_out);
    if (*plot) return do_plot(csv_path, svg_out, *plot, plot_config, log_x);
    if (*oracle) return do_oracle(map_path, gamma);
  } catch (const qrl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
