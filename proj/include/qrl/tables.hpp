#pragma once

#include <cstddef>
#include <vector>

namespace qrl {

// Per-state value estimates, indexed by flat state id.
struct ValueTable {
  std::vector<double> v;

  ValueTable() = default;
  explicit ValueTable(std::size_t states) : v(states, 0.0) {}

  double& operator[](std::size_t s) { return v[s]; }
  double operator[](std::size_t s) const { return v[s]; }
  std::size_t size() const { return v.size(); }
};

// Per-state-action value estimates, row-major: q[s * actions + a].
struct QTable {
  std::size_t actions = 0;
  std::vector<double> q;

  QTable() = default;
  QTable(std::size_t states, std::size_t action_count)
      : actions(action_count), q(states * action_count, 0.0) {}

  double& at(std::size_t s, std::size_t a) { return q[s * actions + a]; }
  double at(std::size_t s, std::size_t a) const { return q[s * actions + a]; }

  // Greedy action for s; ties break toward the lowest index.
  std::size_t argmax(std::size_t s) const {
    std::size_t best = 0;
    double best_q = q[s * actions];
    for (std::size_t a = 1; a < actions; ++a) {
      const double qa = q[s * actions + a];
      if (qa > best_q) {
        best_q = qa;
        best = a;
      }
    }
    return best;
  }

  double max(std::size_t s) const {
    double best_q = q[s * actions];
    for (std::size_t a = 1; a < actions; ++a)
      if (q[s * actions + a] > best_q) best_q = q[s * actions + a];
    return best_q;
  }
};

}  // namespace qrl
