#include "qrl/agents.hpp"

#include <cmath>
#include <stdexcept>

namespace qrl {

namespace {

// Uniform choice among the argmax set of four action scores.
int random_argmax(const double (&score)[kActionCount], Rng& rng) {
  int best[kActionCount];
  int count = 1;
  best[0] = 0;
  for (int a = 1; a < kActionCount; ++a) {
    if (score[a] > score[best[0]]) {
      best[0] = a;
      count = 1;
    } else if (score[a] == score[best[0]]) {
      best[count++] = a;
    }
  }
  return count == 1 ? best[0]
                    : best[rng.next_below(static_cast<std::uint64_t>(count))];
}

// Probability that the register's collapse, taken modulo the action count,
// yields each eigen action.
void action_probabilities(const ActionRegister& reg,
                          double (&prob)[kActionCount]) {
  for (int a = 0; a < kActionCount; ++a) prob[a] = 0.0;
  for (std::size_t m = 0; m < reg.amps.size(); ++m)
    prob[m % kActionCount] += std::norm(reg.amps[m]);
}

void check_registers_normalized(const QRLAgentState& agent) {
  for (const ActionRegister& reg : agent.registers) {
    double total = 0.0;
    for (const Amplitude& a : reg.amps) total += std::norm(a);
    if (std::abs(total - 1.0) > 1e-6)
      throw std::domain_error(
          "qrl_episode: register norm drifted beyond tolerance");
  }
}

template <typename StepFn>
EpisodeTrace run_episode(const GridWorld& env, int max_steps, StepFn step_fn) {
  EpisodeTrace trace;
  trace.transitions.reserve(64);
  int s = env.start_state();
  for (int i = 0; i < max_steps; ++i) {
    const Transition tr = step_fn(s);
    trace.transitions.push_back(tr);
    ++trace.steps;
    trace.final_reward = tr.reward;
    if (tr.terminal) return trace;
    s = tr.next_state;
  }
  trace.truncated = true;
  return trace;
}

}  // namespace

void AgentConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("AgentConfig: alpha must be in (0, 1)");
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw std::invalid_argument("AgentConfig: gamma must be in [0, 1]");
  if (!(k > 0.0))
    throw std::invalid_argument("AgentConfig: k must be > 0");
  if (!(epsilon >= 0.0 && epsilon <= 1.0))
    throw std::invalid_argument("AgentConfig: epsilon must be in [0, 1]");
  if (max_steps_per_episode < 0)
    throw std::invalid_argument(
        "AgentConfig: max_steps_per_episode must be >= 0 (0 = auto)");
}

int resolve_max_steps(const AgentConfig& cfg, const GridWorld& env) {
  if (cfg.max_steps_per_episode > 0) return cfg.max_steps_per_episode;
  return 20 * env.width() * env.height();
}

QRLAgentState make_qrl_state(const GridWorld& env, const AgentConfig& cfg) {
  cfg.validate();
  QRLAgentState agent;
  agent.config = cfg;
  const int n = qubit_count(kActionCount);
  agent.angle = grover_angle(n);
  agent.registers.assign(env.state_count(), uniform_superposition(n));
  agent.values = ValueTable(env.state_count());
  return agent;
}

Transition qrl_step(QRLAgentState& agent, const GridWorld& env, int s,
                    Rng& rng) {
  ActionRegister& reg = agent.registers[s];
  const int measured = measure_collapse(reg, rng);
  const int action = measured % kActionCount;

  const StepOutcome out = env.step(s, action_from_index(action));
  const AgentConfig& cfg = agent.config;

  const double v_next = agent.values[out.next_state];  // pre-update V(s')
  agent.values[s] += cfg.alpha * (out.reward + cfg.gamma * v_next -
                                  agent.values[s]);

  // L reads the value table as it stands after the TD write; on a bounce
  // (next == s) that is the freshly updated value.
  const int L =
      compute_L(out.reward, agent.values[out.next_state], cfg.k, agent.angle);
  if (cfg.update == AmplitudeUpdate::FromUniform) {
    const double amp = 1.0 / std::sqrt(static_cast<double>(reg.amps.size()));
    for (Amplitude& c : reg.amps) c = Amplitude{amp, 0.0};
  }
  grover_rotate(reg, measured, L);

  Transition tr;
  tr.state = s;
  tr.action = action;
  tr.next_state = out.next_state;
  tr.reward = out.reward;
  tr.terminal = out.terminal;
  tr.bounced = out.bounced;
  tr.grover_l = L;
  return tr;
}

namespace {

// One synchronous relaxation of every free state's value toward the
// register-policy expected TD target, computed against the pre-sweep table.
void sweep_values_once(QRLAgentState& agent, const GridWorld& env) {
  const ValueTable before = agent.values;
  double prob[kActionCount];
  for (int s = 0; s < env.state_count(); ++s) {
    if (env.blocked(s) || s == env.goal_state()) continue;
    action_probabilities(agent.registers[s], prob);
    double target = 0.0;
    for (int a = 0; a < kActionCount; ++a) {
      const StepOutcome out = env.step(s, action_from_index(a));
      target += prob[a] * (out.reward + agent.config.gamma * before[out.next_state]);
    }
    agent.values[s] = before[s] + agent.config.alpha * (target - before[s]);
  }
}

}  // namespace

EpisodeTrace qrl_episode(QRLAgentState& agent, const GridWorld& env,
                         Rng& rng) {
  const int max_steps = resolve_max_steps(agent.config, env);
  EpisodeTrace trace = run_episode(
      env, max_steps, [&](int s) { return qrl_step(agent, env, s, rng); });
  if (agent.config.sweep_values) sweep_values_once(agent, env);
  check_registers_normalized(agent);
  return trace;
}

Transition td0_step(ValueTable& values, const GridWorld& env, int s,
                    double alpha, double gamma, double epsilon, Rng& rng) {
  int action;
  if (epsilon > 0.0 && rng.next_double() < epsilon) {
    action = static_cast<int>(rng.next_below(kActionCount));
  } else {
    double score[kActionCount];
    for (int a = 0; a < kActionCount; ++a) {
      const StepOutcome out = env.step(s, action_from_index(a));
      score[a] = out.reward + gamma * values[out.next_state];
    }
    action = random_argmax(score, rng);
  }

  const StepOutcome out = env.step(s, action_from_index(action));
  values[s] += alpha * (out.reward + gamma * values[out.next_state] - values[s]);

  Transition tr;
  tr.state = s;
  tr.action = action;
  tr.next_state = out.next_state;
  tr.reward = out.reward;
  tr.terminal = out.terminal;
  tr.bounced = out.bounced;
  return tr;
}

EpisodeTrace td0_episode(ValueTable& values, const GridWorld& env,
                         const AgentConfig& cfg, Rng& rng) {
  const int max_steps = resolve_max_steps(cfg, env);
  return run_episode(env, max_steps, [&](int s) {
    return td0_step(values, env, s, cfg.alpha, cfg.gamma, cfg.epsilon, rng);
  });
}

Transition q_learning_step(QTable& q, const GridWorld& env, int s,
                           double alpha, double gamma, double epsilon,
                           Rng& rng) {
  int action;
  if (epsilon > 0.0 && rng.next_double() < epsilon) {
    action = static_cast<int>(rng.next_below(kActionCount));
  } else {
    double score[kActionCount];
    for (int a = 0; a < kActionCount; ++a) score[a] = q.at(s, a);
    action = random_argmax(score, rng);
  }

  const StepOutcome out = env.step(s, action_from_index(action));
  const double bootstrap = out.terminal ? 0.0 : q.max(out.next_state);
  q.at(s, action) = (1.0 - alpha) * q.at(s, action) +
                    alpha * (out.reward + gamma * bootstrap);

  Transition tr;
  tr.state = s;
  tr.action = action;
  tr.next_state = out.next_state;
  tr.reward = out.reward;
  tr.terminal = out.terminal;
  tr.bounced = out.bounced;
  return tr;
}

EpisodeTrace q_learning_episode(QTable& q, const GridWorld& env,
                                const AgentConfig& cfg, Rng& rng) {
  const int max_steps = resolve_max_steps(cfg, env);
  return run_episode(env, max_steps, [&](int s) {
    return q_learning_step(q, env, s, cfg.alpha, cfg.gamma, cfg.epsilon, rng);
  });
}

namespace {

template <typename PickAction>
std::optional<int> follow_greedy(const GridWorld& env, int limit,
                                 PickAction pick) {
  if (limit <= 0) limit = 20 * env.width() * env.height();
  int s = env.start_state();
  for (int steps = 1; steps <= limit; ++steps) {
    const StepOutcome out = env.step(s, pick(s));
    if (out.terminal) return steps;
    s = out.next_state;
  }
  return std::nullopt;
}

}  // namespace

std::optional<int> greedy_path_length(const GridWorld& env,
                                      const ValueTable& values, double gamma,
                                      int limit) {
  return follow_greedy(env, limit, [&](int s) {
    return greedy_action(env, values, s, gamma);
  });
}

std::optional<int> greedy_path_length(const GridWorld& env, const QTable& q,
                                      int limit) {
  return follow_greedy(env, limit, [&](int s) {
    return action_from_index(static_cast<int>(q.argmax(s)));
  });
}

std::optional<int> greedy_path_length(const GridWorld& env,
                                      const QRLAgentState& agent, int limit) {
  return follow_greedy(env, limit, [&](int s) {
    double prob[kActionCount];
    action_probabilities(agent.registers[s], prob);
    int best = 0;
    for (int a = 1; a < kActionCount; ++a)
      if (prob[a] > prob[best]) best = a;
    return action_from_index(best);
  });
}

}  // namespace qrl
