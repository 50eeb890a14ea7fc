#include "qrl/gridworld.hpp"

#include <deque>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qrl {

EigenAction action_from_index(int index) {
  if (index < 0 || index >= kActionCount)
    throw std::out_of_range("action_from_index: index " + std::to_string(index));
  return static_cast<EigenAction>(index);
}

const char* action_name(EigenAction a) {
  switch (a) {
    case EigenAction::Up: return "up";
    case EigenAction::Down: return "down";
    case EigenAction::Left: return "left";
    case EigenAction::Right: return "right";
  }
  throw std::out_of_range("action_name: bad action value");
}

GridWorld::GridWorld(int width, int height, std::vector<std::uint8_t> blocked,
                     int start_state, int goal_state)
    : width_(width), height_(height), start_(start_state), goal_(goal_state),
      blocked_(std::move(blocked)) {
  if (width_ < 1 || height_ < 1)
    throw std::invalid_argument("GridWorld: dimensions must be >= 1");
  if (blocked_.size() != static_cast<std::size_t>(width_) * height_)
    throw std::invalid_argument("GridWorld: blocked mask size != width*height");
  for (int s : {start_, goal_}) {
    if (s < 0 || s >= state_count())
      throw std::out_of_range("GridWorld: start/goal state out of range");
    if (blocked_[s])
      throw std::invalid_argument("GridWorld: start/goal placed on a wall");
  }
  if (start_ == goal_)
    throw std::invalid_argument("GridWorld: start and goal coincide");
}

StepOutcome GridWorld::step(int state, EigenAction action) const {
  if (state < 0 || state >= state_count())
    throw std::out_of_range("GridWorld::step: state out of range");
  if (blocked_[state])
    throw std::invalid_argument("GridWorld::step: state is a wall cell");
  if (state == goal_)
    throw std::invalid_argument("GridWorld::step: episode already terminal");

  int x = state % width_;
  int y = state / width_;
  switch (action) {
    case EigenAction::Up: --y; break;
    case EigenAction::Down: ++y; break;
    case EigenAction::Left: --x; break;
    case EigenAction::Right: ++x; break;
  }

  StepOutcome out;
  if (x < 0 || x >= width_ || y < 0 || y >= height_ ||
      blocked_[y * width_ + x]) {
    out.next_state = state;  // bounce: stay in place
    out.reward = kStepReward;
    out.bounced = true;
    return out;
  }
  out.next_state = y * width_ + x;
  if (out.next_state == goal_) {
    out.reward = kGoalReward;
    out.terminal = true;
  } else {
    out.reward = kStepReward;
  }
  return out;
}

std::optional<int> GridWorld::bfs_shortest(int from) const {
  if (from < 0 || from >= state_count())
    throw std::out_of_range("bfs_shortest: state out of range");
  if (blocked_[from])
    throw std::invalid_argument("bfs_shortest: state is a wall cell");

  std::vector<int> dist(state_count(), -1);
  std::deque<int> queue;
  dist[from] = 0;
  queue.push_back(from);
  while (!queue.empty()) {
    const int s = queue.front();
    queue.pop_front();
    if (s == goal_) return dist[s];
    const int x = s % width_;
    const int y = s / width_;
    const int nx[] = {x, x, x - 1, x + 1};
    const int ny[] = {y - 1, y + 1, y, y};
    for (int i = 0; i < 4; ++i) {
      if (nx[i] < 0 || nx[i] >= width_ || ny[i] < 0 || ny[i] >= height_)
        continue;
      const int n = ny[i] * width_ + nx[i];
      if (blocked_[n] || dist[n] >= 0) continue;
      dist[n] = dist[s] + 1;
      queue.push_back(n);
    }
  }
  return std::nullopt;
}

GridWorld parse_map(const std::string& text) {
  std::vector<std::string> rows;
  std::string row;
  std::istringstream in(text);
  while (std::getline(in, row)) rows.push_back(row);
  // A trailing '\n' after the last row is fine; getline already absorbs it.
  if (!rows.empty() && rows.back().empty()) rows.pop_back();
  if (rows.empty())
    throw std::invalid_argument("map: no rows");

  const std::size_t width = rows[0].size();
  if (width == 0)
    throw std::invalid_argument("map: row 1 is empty");

  std::vector<std::uint8_t> blocked;
  blocked.reserve(width * rows.size());
  int start = -1;
  int goal = -1;
  for (std::size_t y = 0; y < rows.size(); ++y) {
    if (rows[y].size() != width)
      throw std::invalid_argument(
          "map: row " + std::to_string(y + 1) + " has length " +
          std::to_string(rows[y].size()) + ", expected " + std::to_string(width));
    for (std::size_t x = 0; x < width; ++x) {
      const char c = rows[y][x];
      const int id = static_cast<int>(y * width + x);
      switch (c) {
        case '.': blocked.push_back(0); break;
        case '#': blocked.push_back(1); break;
        case 'S':
          if (start >= 0)
            throw std::invalid_argument("map: more than one start cell");
          start = id;
          blocked.push_back(0);
          break;
        case 'G':
          if (goal >= 0)
            throw std::invalid_argument("map: more than one goal cell");
          goal = id;
          blocked.push_back(0);
          break;
        default:
          throw std::invalid_argument(
              "map: bad character at row " + std::to_string(y + 1) +
              ", column " + std::to_string(x + 1) +
              (c == '\r' ? " (carriage return; use LF line endings)" : ""));
      }
    }
  }
  if (start < 0) throw std::invalid_argument("map: missing start cell 'S'");
  if (goal < 0) throw std::invalid_argument("map: missing goal cell 'G'");

  return GridWorld(static_cast<int>(width), static_cast<int>(rows.size()),
                   std::move(blocked), start, goal);
}

GridWorld load_map(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file)
    throw std::runtime_error("cannot open map file: " + path);
  std::ostringstream buf;
  buf << file.rdbuf();
  return parse_map(buf.str());
}

ValueTable value_iteration(const GridWorld& world, double gamma,
                           double residual) {
  if (gamma < 0.0 || gamma >= 1.0)
    throw std::invalid_argument("value_iteration: gamma must be in [0, 1)");
  const int states = world.state_count();
  ValueTable values(states);
  ValueTable next(states);

  double delta = residual;
  while (delta >= residual) {
    delta = 0.0;
    for (int s = 0; s < states; ++s) {
      if (world.blocked(s) || s == world.goal_state()) continue;
      double best = -1e300;
      for (int a = 0; a < kActionCount; ++a) {
        const StepOutcome out = world.step(s, action_from_index(a));
        const double q = out.reward + gamma * values[out.next_state];
        if (q > best) best = q;
      }
      next[s] = best;
      const double change = best > values[s] ? best - values[s] : values[s] - best;
      if (change > delta) delta = change;
    }
    std::swap(values.v, next.v);
  }
  return values;
}

EigenAction greedy_action(const GridWorld& world, const ValueTable& values,
                          int state, double gamma) {
  int best_a = 0;
  double best_q = -1e300;
  for (int a = 0; a < kActionCount; ++a) {
    const StepOutcome out = world.step(state, action_from_index(a));
    const double q = out.reward + gamma * values[out.next_state];
    if (q > best_q) {  // strict: ties stay with the lowest index
      best_q = q;
      best_a = a;
    }
  }
  return action_from_index(best_a);
}

}  // namespace qrl
