// Acceptance checklist runner. Each criterion prints exactly one PASS/FAIL
// line; INFO lines afterwards carry supplementary measurements that do not
// gate the exit status. Exit code 0 only if every criterion passes.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qrl/agents.hpp"
#include "qrl/gridworld.hpp"
#include "qrl/harness.hpp"
#include "qrl/quantum.hpp"

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string empty_map_text(int w, int h) {
  std::string text;
  for (int y = 0; y < h; ++y) {
    std::string row(w, '.');
    if (y == 1) row[1] = 'S';
    if (y == h - 2) row[w - 2] = 'G';
    text += row;
    text += '\n';
  }
  return text;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

// --- criterion 1 -----------------------------------------------------------
// Target amplitude after L iterations from uniform equals sin((2L+1) theta),
// theta = arcsin(2^(-n/2)), for n in 1..6 and L in 0..10; n=2, L=1 reaches
// probability 1. Must finish within 1 s.
Outcome closed_form_rotation() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (int n = 1; n <= 6; ++n) {
    const double theta = qrl::grover_angle(n).theta;
    const int target = (1 << n) - 1;
    for (int L = 0; L <= 10; ++L) {
      const qrl::ActionRegister out =
          qrl::grover_iterate(qrl::uniform_superposition(n), target, L);
      const double err =
          std::abs(out.amps[target] - std::sin((2 * L + 1) * theta));
      worst = std::max(worst, err);
    }
  }
  const double pure = std::norm(
      qrl::grover_iterate(qrl::uniform_superposition(2), 1, 1).amps[1]);
  const double elapsed = seconds_since(t0);

  Outcome r;
  r.pass = worst <= 1e-9 && std::abs(pure - 1.0) <= 1e-9 && elapsed < 1.0;
  r.detail = "max amplitude error " + qrl::format_double(worst) +
             ", n=2 L=1 target probability " + qrl::format_double(pure) +
             ", " + qrl::format_double(elapsed) + " s (limit 1 s)";
  return r;
}

// --- criterion 2 -----------------------------------------------------------
// For the 2-qubit register (theta = pi/6), compute_L never exceeds 1 across
// a broad (r, V', k) grid including r=100. Must finish within 1 s.
Outcome iteration_cap() {
  const auto t0 = Clock::now();
  const qrl::GroverAngle angle = qrl::grover_angle(2);
  int worst = 0;
  long long cases = 0;
  for (double r : {-1.0, 0.0, 0.5, 1.0, 10.0, 50.0, 100.0, 500.0, 1e6}) {
    for (double v = -150.0; v <= 300.0; v += 1.37) {
      for (double k : {1e-4, 1e-3, 0.01, 0.05, 0.1, 0.5, 1.0, 10.0, 100.0}) {
        worst = std::max(worst, qrl::compute_L(r, v, k, angle));
        ++cases;
      }
    }
  }
  const double elapsed = seconds_since(t0);
  Outcome r;
  r.pass = worst <= 1 && elapsed < 1.0;
  r.detail = "max L " + std::to_string(worst) + " over " +
             std::to_string(cases) + " inputs, " +
             qrl::format_double(elapsed) + " s (limit 1 s)";
  return r;
}

// --- criterion 3 -----------------------------------------------------------
// 10^5 collapses of 20 random registers each: chi-square accepts H0 that
// frequencies follow |C_a|^2 at p > 0.001. Must finish within 5 s.
Outcome collapse_statistics() {
  const auto t0 = Clock::now();
  qrl::Rng rng(20260818);
  int accepted = 0;
  double worst_stat_margin = 1e300;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 3;
    const qrl::ActionRegister reg = oracles::random_register(n, rng);
    std::vector<long long> counts(reg.amps.size(), 0);
    std::vector<double> probs(reg.amps.size());
    for (std::size_t i = 0; i < reg.amps.size(); ++i)
      probs[i] = std::norm(reg.amps[i]);
    const long long total = 100000;
    for (long long i = 0; i < total; ++i)
      ++counts[qrl::measure_collapse(reg, rng)];
    const oracles::ChiSquareResult res =
        oracles::chi_square_gof(counts, probs, total);
    if (res.accept) ++accepted;
    if (res.df >= 1)
      worst_stat_margin = std::min(
          worst_stat_margin,
          oracles::chi_square_quantile_999(res.df) - res.stat);
  }
  const double elapsed = seconds_since(t0);
  Outcome r;
  r.pass = accepted == 20 && elapsed < 5.0;
  r.detail = std::to_string(accepted) +
             "/20 registers accepted, smallest margin to the 0.999 quantile " +
             qrl::format_double(worst_stat_margin) + ", " +
             qrl::format_double(elapsed) + " s (limit 5 s)";
  return r;
}

// --- criterion 4 -----------------------------------------------------------
// H twice and phase(phi) then phase(-phi) are identities within 1e-12 on 100
// random states.
Outcome gate_identities() {
  qrl::Rng rng(424242);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng.next_below(4));
    const qrl::ActionRegister start = oracles::random_register(n, rng);
    const int q = static_cast<int>(rng.next_below(n));
    const double phi = (rng.next_double() - 0.5) * 8.0;

    const qrl::ActionRegister h2 = qrl::hadamard(qrl::hadamard(start, q), q);
    const qrl::ActionRegister p2 =
        qrl::phase_gate(qrl::phase_gate(start, q, phi), q, -phi);
    for (std::size_t i = 0; i < start.amps.size(); ++i) {
      worst = std::max(worst, std::abs(h2.amps[i] - start.amps[i]));
      worst = std::max(worst, std::abs(p2.amps[i] - start.amps[i]));
    }
  }
  Outcome r;
  r.pass = worst <= 1e-12;
  r.detail = "max deviation from identity " + qrl::format_double(worst);
  return r;
}

// --- criterion 5 -----------------------------------------------------------
// Greedy paths under value iteration match BFS on 50 random reachable maps
// up to 12x12. Must finish within 10 s.
Outcome oracle_agreement() {
  const auto t0 = Clock::now();
  qrl::Rng rng(5150);
  int matched = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const qrl::GridWorld world = oracles::random_reachable_map(rng);
    const qrl::ValueTable values = qrl::value_iteration(world, 0.99);
    const std::optional<int> greedy =
        qrl::greedy_path_length(world, values, 0.99);
    const std::optional<int> bfs = world.bfs_shortest(world.start_state());
    if (greedy && bfs && *greedy == *bfs) ++matched;
  }
  const double elapsed = seconds_since(t0);
  Outcome r;
  r.pass = matched == 50 && elapsed < 10.0;
  r.detail = std::to_string(matched) + "/50 maps matched, " +
             qrl::format_double(elapsed) + " s (limit 10 s)";
  return r;
}

// --- criteria 6/7/8 shared plumbing ----------------------------------------

struct SweepCounts {
  std::map<double, int> converged;  // alpha -> converged seed count
  int seeds = 0;
  double elapsed = 0.0;
};

SweepCounts run_sweep(const std::string& map_path, qrl::AgentKind agent,
                      std::vector<double> alphas, double k, double epsilon,
                      qrl::AmplitudeUpdate update, int episodes) {
  const auto t0 = Clock::now();
  qrl::ExperimentConfig cfg;
  cfg.agent = agent;
  cfg.map_path = map_path;
  cfg.episodes = episodes;
  cfg.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  cfg.alphas = std::move(alphas);
  cfg.gamma = 0.99;
  cfg.k = k;
  cfg.epsilon = epsilon;
  cfg.update = update;

  SweepCounts out;
  out.seeds = static_cast<int>(cfg.seeds.size());
  for (const qrl::RunSummary& run : qrl::run_experiment(cfg)) {
    if (run.converged_at) ++out.converged[run.alpha];
    else out.converged.try_emplace(run.alpha, 0);
  }
  out.elapsed = seconds_since(t0);
  return out;
}

std::string counts_text(const SweepCounts& counts) {
  std::string text;
  for (const auto& [alpha, n] : counts.converged) {
    if (!text.empty()) text += " ";
    text += qrl::format_double(alpha) + ":" + std::to_string(n) + "/" +
            std::to_string(counts.seeds);
  }
  return text;
}

// --- criterion 6 -----------------------------------------------------------
// Empty 20x20, gamma 0.99, k = 0.01, seeds 1..10: every alpha in
// {0.02..0.10} must converge (trailing-100 median = 34 within 10000
// episodes) on at least 8 of 10 seeds. Runtime target (reported, not gated):
// 5 minutes.
Outcome qrl_convergence(const std::string& map_path, SweepCounts& saved) {
  saved = run_sweep(map_path, qrl::AgentKind::Qrl,
                    {0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.10},
                    0.01, 0.01, qrl::AmplitudeUpdate::RotateCurrent, 10000);
  bool all_ok = true;
  for (const auto& [alpha, n] : saved.converged)
    if (n < 8) all_ok = false;
  Outcome r;
  r.pass = all_ok;
  r.detail = "converged seeds " + counts_text(saved) + ", " +
             qrl::format_double(saved.elapsed) + " s (target 300 s)";
  return r;
}

// --- criterion 7 -----------------------------------------------------------
// At alpha = 0.15 the convergence fraction must be strictly lower than at
// alpha = 0.06 over the same seeds.
Outcome qrl_divergence(const std::string& map_path,
                       const SweepCounts& sweep6) {
  const SweepCounts high =
      run_sweep(map_path, qrl::AgentKind::Qrl, {0.15}, 0.01, 0.01,
                qrl::AmplitudeUpdate::RotateCurrent, 10000);
  const int at06 = sweep6.converged.count(0.06) ? sweep6.converged.at(0.06) : 0;
  const int at15 = high.converged.count(0.15) ? high.converged.at(0.15) : 0;
  Outcome r;
  r.pass = at15 < at06;
  r.detail = "alpha 0.15 converged " + std::to_string(at15) +
             "/10 vs alpha 0.06 " + std::to_string(at06) + "/10, " +
             qrl::format_double(high.elapsed) + " s";
  return r;
}

// --- criterion 8 -----------------------------------------------------------
// Classical TD(0), epsilon 0.01: alpha 0.01 converges on >= 8/10 seeds and
// alpha 0.03 shows a strictly lower convergence fraction.
Outcome td0_convergence(const std::string& map_path) {
  const SweepCounts counts =
      run_sweep(map_path, qrl::AgentKind::Td0, {0.01, 0.03}, 0.01, 0.01,
                qrl::AmplitudeUpdate::RotateCurrent, 10000);
  const int at01 = counts.converged.count(0.01) ? counts.converged.at(0.01) : 0;
  const int at03 = counts.converged.count(0.03) ? counts.converged.at(0.03) : 0;
  Outcome r;
  r.pass = at01 >= 8 && at03 < at01;
  r.detail = "alpha 0.01 converged " + std::to_string(at01) +
             "/10, alpha 0.03 " + std::to_string(at03) + "/10, " +
             qrl::format_double(counts.elapsed) + " s";
  return r;
}

// --- criterion 9 -----------------------------------------------------------
// Two CLI `run` invocations with the same config produce byte-identical CSV.
Outcome csv_determinism(const std::string& cli, const fs::path& dir) {
  Outcome r;
  if (cli.empty()) {
    r.detail = "no CLI binary path given on the command line";
    return r;
  }
  const std::string map_path = (dir / "det.map").string();
  {
    std::ofstream out(map_path, std::ios::binary);
    out << empty_map_text(5, 5);
  }
  const std::string cfg_path = (dir / "det.cfg").string();
  {
    std::ofstream out(cfg_path, std::ios::binary);
    out << "agent = qlearning\n"
        << "map = " << map_path << "\n"
        << "episodes = 200\n"
        << "seeds = 1, 2\n"
        << "alpha = 0.2, 0.4\n"
        << "epsilon = 0.1\n";
  }

  auto invoke = [&](const std::string& out_dir) {
    const std::string cmd = "\"" + cli + "\" run --config \"" + cfg_path +
                            "\" --out \"" + out_dir + "\" > /dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) && WEXITSTATUS(status) == 0;
  };

  const std::string out1 = (dir / "det_out1").string();
  const std::string out2 = (dir / "det_out2").string();
  if (!invoke(out1) || !invoke(out2)) {
    r.detail = "CLI run did not exit cleanly";
    return r;
  }
  const std::string csv1 = read_file(out1 + "/results.csv");
  const std::string csv2 = read_file(out2 + "/results.csv");
  r.pass = !csv1.empty() && csv1 == csv2;
  r.detail = "two runs, " + std::to_string(csv1.size()) + " bytes each, " +
             (r.pass ? "identical" : "DIFFER");
  return r;
}

// --- criterion 10 ----------------------------------------------------------
// Seeding V with the value-iteration fixed point leaves a per-step Bellman
// residual of at most 1e-8 along greedy trajectories.
Outcome td_fixed_point(const std::string& map_path) {
  const qrl::GridWorld env = qrl::load_map(map_path);
  const qrl::ValueTable values = qrl::value_iteration(env, 0.99);
  double worst = 0.0;
  int s = env.start_state();
  for (int guard = 0; guard < 10000; ++guard) {
    const qrl::EigenAction a = qrl::greedy_action(env, values, s, 0.99);
    const qrl::StepOutcome out = env.step(s, a);
    worst = std::max(
        worst,
        std::abs(out.reward + 0.99 * values[out.next_state] - values[s]));
    if (out.terminal) break;
    s = out.next_state;
  }
  Outcome r;
  r.pass = worst <= 1e-8;
  r.detail = "max residual " + qrl::format_double(worst) +
             " along the greedy path";
  return r;
}

// --- supplementary, non-gating ---------------------------------------------

void print_info_runs(const std::string& map_path) {
  // The gated sweep above uses k = 0.01 as specified; with that gain only
  // goal-entering transitions satisfy k*(r+V) >= 1 (every other transition
  // has r + V(s') < 99), so amplification never spreads beyond the goal's
  // neighbours. The runs below measure the alternatives for context.
  {
    const SweepCounts counts = run_sweep(
        map_path, qrl::AgentKind::Qrl, {0.02, 0.06, 0.10}, 0.05, 0.01,
        qrl::AmplitudeUpdate::FromUniform, 10000);
    std::cout << "INFO  qrl k=0.05 update=from-uniform: converged seeds "
              << counts_text(counts) << ", "
              << qrl::format_double(counts.elapsed) << " s\n";
  }
  {
    const auto t0 = Clock::now();
    qrl::ExperimentConfig cfg;
    cfg.agent = qrl::AgentKind::Qrl;
    cfg.map_path = map_path;
    cfg.episodes = 2000;
    cfg.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    cfg.alphas = {0.06};
    cfg.k = 0.05;
    cfg.update = qrl::AmplitudeUpdate::RotateCurrent;
    int best_median = 1 << 30;
    for (const qrl::RunSummary& run : qrl::run_experiment(cfg)) {
      std::vector<int> tail(run.steps.end() - 100, run.steps.end());
      std::nth_element(tail.begin(), tail.begin() + 50, tail.end());
      best_median = std::min(best_median, tail[50]);
    }
    std::cout << "INFO  qrl k=0.05 update=rotate-current alpha=0.06: best "
                 "trailing-100 median "
              << best_median << " across 10 seeds (oracle 34), "
              << qrl::format_double(seconds_since(t0)) << " s\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";

  const fs::path dir =
      fs::temp_directory_path() /
      ("qrl_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string map20 = (dir / "empty20.map").string();
  {
    std::ofstream out(map20, std::ios::binary);
    out << empty_map_text(20, 20);
  }

  struct Row {
    int id;
    const char* name;
    Outcome outcome;
  };
  std::vector<Row> rows;
  SweepCounts sweep6;

  rows.push_back({1, "grover closed-form rotation", closed_form_rotation()});
  rows.push_back({2, "iteration cap at two qubits", iteration_cap()});
  rows.push_back({3, "collapse statistics chi-square", collapse_statistics()});
  rows.push_back({4, "gate identities", gate_identities()});
  rows.push_back({5, "value-iteration greedy vs BFS", oracle_agreement()});
  rows.push_back(
      {6, "qrl convergence sweep (k=0.01)", qrl_convergence(map20, sweep6)});
  rows.push_back(
      {7, "qrl divergence at alpha=0.15", qrl_divergence(map20, sweep6)});
  rows.push_back({8, "td0 convergence alpha 0.01 vs 0.03",
                  td0_convergence(map20)});
  rows.push_back({9, "end-to-end CSV determinism", csv_determinism(cli, dir)});
  rows.push_back({10, "td fixed-point residual", td_fixed_point(map20)});

  int passed = 0;
  for (const Row& row : rows) {
    std::cout << (row.outcome.pass ? "PASS" : "FAIL") << "  " << row.id
              << "  " << row.name << "  --  " << row.outcome.detail << "\n";
    if (row.outcome.pass) ++passed;
  }

  print_info_runs(map20);

  std::cout << passed << "/" << rows.size() << " acceptance criteria passed\n";

  std::error_code ec;
  fs::remove_all(dir, ec);  // best effort
  return passed == static_cast<int>(rows.size()) ? 0 : 1;
}
