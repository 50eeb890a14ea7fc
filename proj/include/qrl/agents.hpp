#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qrl/gridworld.hpp"
#include "qrl/quantum.hpp"
#include "qrl/rng.hpp"
#include "qrl/tables.hpp"

namespace qrl {

// How a state's action register is updated after a transition.
//   RotateCurrent: apply the L Grover iterations to the register as it
//     stands (the default).
//   FromUniform: re-prepare the equal superposition first, then apply the
//     L iterations. L=0 therefore resets the register.
enum class AmplitudeUpdate { RotateCurrent, FromUniform };

struct AgentConfig {
  double alpha = 0.06;    // learning rate, in (0, 1)
  double gamma = 0.99;    // discount, in [0, 1]
  double k = 0.01;        // Grover gain, > 0
  double epsilon = 0.01;  // exploration rate for the classical baselines
  int max_steps_per_episode = 0;  // 0 = auto: 20 * width * height
  std::uint64_t seed = 0;
  AmplitudeUpdate update = AmplitudeUpdate::RotateCurrent;
  bool sweep_values = false;  // extra whole-table value relaxation per episode

  void validate() const;  // throws std::invalid_argument on a bad range
};

// Episode cap actually used for `env` given cfg.max_steps_per_episode.
int resolve_max_steps(const AgentConfig& cfg, const GridWorld& env);

struct Transition {
  int state = 0;
  int action = 0;  // eigen-action index actually executed
  int next_state = 0;
  double reward = 0.0;
  bool terminal = false;
  bool bounced = false;
  int grover_l = 0;  // iterations applied to registers[state] (QRL only)
};

struct EpisodeTrace {
  int episode = 0;  // index within the run, set by the caller
  int steps = 0;
  bool truncated = false;
  double final_reward = 0.0;
  std::vector<Transition> transitions;
};

// Learner state for the quantum-inspired agent: one action register and one
// state value per cell.
struct QRLAgentState {
  AgentConfig config;
  GroverAngle angle;
  std::vector<ActionRegister> registers;
  ValueTable values;
};

// Fresh agent: every register in the equal superposition, all values 0.
QRLAgentState make_qrl_state(const GridWorld& env, const AgentConfig& cfg);

// One learning step from state `s`:
//   1. collapse registers[s] to an action (register itself is kept),
//   2. execute it (measured index taken modulo the action count),
//   3. TD(0) update of V(s) against the pre-update V(s'),
//   4. L = compute_L(r, V(s'), k, theta) with the post-update table,
//   5. apply L Grover iterations to registers[s] per cfg.update.
Transition qrl_step(QRLAgentState& agent, const GridWorld& env, int s,
                    Rng& rng);

// Runs qrl_step from env.start until the goal or the episode cap; checks
// every register is still normalized within 1e-6 before returning. With
// cfg.sweep_values, one synchronous relaxation of all state values under the
// register policy follows the episode.
EpisodeTrace qrl_episode(QRLAgentState& agent, const GridWorld& env, Rng& rng);

// Classical TD(0) baseline. Policy: with probability epsilon a uniform
// random action, otherwise the one-step-lookahead greedy action
// argmax_a [r + gamma * V(s')] with ties broken uniformly at random.
Transition td0_step(ValueTable& values, const GridWorld& env, int s,
                    double alpha, double gamma, double epsilon, Rng& rng);
EpisodeTrace td0_episode(ValueTable& values, const GridWorld& env,
                         const AgentConfig& cfg, Rng& rng);

// Classical Q-learning baseline, epsilon-greedy over Q(s, .), same
// tie-breaking; Q(goal, .) is never written and stays 0.
Transition q_learning_step(QTable& q, const GridWorld& env, int s,
                           double alpha, double gamma, double epsilon,
                           Rng& rng);
EpisodeTrace q_learning_episode(QTable& q, const GridWorld& env,
                                const AgentConfig& cfg, Rng& rng);

// Steps to the goal when acting greedily (ties to the lowest action index),
// or nullopt if the goal is not reached within `limit` steps (0 = auto cap
// of 20 * width * height). The QRL readout follows each state's most
// probable action.
std::optional<int> greedy_path_length(const GridWorld& env,
                                      const ValueTable& values, double gamma,
                                      int limit = 0);
std::optional<int> greedy_path_length(const GridWorld& env, const QTable& q,
                                      int limit = 0);
std::optional<int> greedy_path_length(const GridWorld& env,
                                      const QRLAgentState& agent,
                                      int limit = 0);

}  // namespace qrl
