#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qrl/tables.hpp"

namespace qrl {

// The four eigen-actions of the gridworld, in fixed index order. The order is
// part of the file formats and traces, so it must never change.
enum class EigenAction : int { Up = 0, Down = 1, Left = 2, Right = 3 };

inline constexpr int kActionCount = 4;

EigenAction action_from_index(int index);
const char* action_name(EigenAction a);

struct StepOutcome {
  int next_state = 0;
  double reward = 0.0;
  bool terminal = false;
  bool bounced = false;  // move was blocked by a wall or the border
};

// Deterministic rectangular gridworld. Coordinates are (x, y) with the origin
// at the top-left corner, x growing rightward and y growing downward; state
// ids are y * width + x. Moving into a wall or off the board leaves the agent
// in place. Every step costs -1 except the step that enters the goal, which
// pays +100 and ends the episode.
class GridWorld {
 public:
  GridWorld(int width, int height, std::vector<std::uint8_t> blocked,
            int start_state, int goal_state);

  int width() const { return width_; }
  int height() const { return height_; }
  int state_count() const { return width_ * height_; }
  int start_state() const { return start_; }
  int goal_state() const { return goal_; }

  int state_id(int x, int y) const { return y * width_ + x; }
  int x_of(int state) const { return state % width_; }
  int y_of(int state) const { return state / width_; }
  bool blocked(int state) const { return blocked_[state] != 0; }

  StepOutcome step(int state, EigenAction action) const;

  // Fewest steps from `from` to the goal, moving through free cells only;
  // empty if the goal is unreachable.
  std::optional<int> bfs_shortest(int from) const;

  static constexpr double kStepReward = -1.0;
  static constexpr double kGoalReward = 100.0;

 private:
  int width_;
  int height_;
  int start_;
  int goal_;
  std::vector<std::uint8_t> blocked_;
};

// Parses the text map format: rows of equal length over the alphabet
//   '.' free   '#' wall   'S' start (exactly one)   'G' goal (exactly one)
// separated by '\n'. Throws std::invalid_argument with a line/column message
// on any violation.
GridWorld parse_map(const std::string& text);

// parse_map over the contents of `path`; std::runtime_error if unreadable.
GridWorld load_map(const std::string& path);

// Optimal state values under the gridworld reward scheme: Bellman backups
// V(s) <- max_a [r + gamma * V(s')] iterated until the largest update is
// below `residual`, with V(goal) pinned to 0.
ValueTable value_iteration(const GridWorld& world, double gamma,
                           double residual = 1e-10);

// Greedy action under a value table: argmax_a [r + gamma * V(s')], ties
// toward the lowest action index.
EigenAction greedy_action(const GridWorld& world, const ValueTable& values,
                          int state, double gamma);

}  // namespace qrl
