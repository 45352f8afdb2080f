#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cirl/rng.hpp"

namespace cirl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Index of a grid cell, row-major.
using StateIndex = int;

struct GameConfig {
  int grid_size = 10;
  int horizon_total = 20;
  int learning_steps = 10;
  int num_features = 3;
  double rbf_bandwidth = 2.5;
  double gamma = 1.0;
  double lambda = 4.0;
  /// nullopt means "cross-validate before the game begins".
  std::optional<double> eta = std::nullopt;
  int belief_samples = 1000;
  std::uint64_t seed = 1;

  int deployment_steps() const { return horizon_total - learning_steps; }

  /// Throws InputDomainError naming the first offending field.
  void validate() const;
};

/// Flat `key = value` document; `#` starts a comment. Unknown keys and
/// malformed values throw InputDomainError. Keys that are absent keep their
/// defaults; when grid_size is given without rbf_bandwidth the bandwidth
/// follows as grid_size / 4.
GameConfig parse_game_config(const std::string& text);
GameConfig load_game_config(const std::string& path);
std::string format_game_config(const GameConfig& config);

/// Hidden reward parameter θ.
struct RewardParams {
  Vector theta;

  RewardParams() = default;
  explicit RewardParams(Vector values) : theta(std::move(values)) {}
  RewardParams(std::initializer_list<double> values);

  int size() const { return static_cast<int>(theta.size()); }
  bool operator==(const RewardParams& other) const {
    return theta.size() == other.theta.size() && theta == other.theta;
  }
};

/// Each component i.i.d. uniform on [-1, 1].
RewardParams sample_theta(const GameConfig& config, Rng& rng);
RewardParams sample_theta(int num_features, Rng& rng);

struct Cell {
  int row = 0;
  int col = 0;
  bool operator==(const Cell&) const = default;
};

enum class Action : int { North = 0, South = 1, East = 2, West = 3, Noop = 4 };

inline constexpr int kNumActions = 5;
/// Tie-break order for every argmax over actions.
inline constexpr std::array<Action, kNumActions> kActionOrder = {
    Action::North, Action::South, Action::East, Action::West, Action::Noop};

char action_symbol(Action a);
Action action_from_symbol(char c);
Action inverse(Action a);

/// Radial basis features evaluated on every cell of a square grid.
class FeatureMap {
 public:
  FeatureMap(int grid_size, std::vector<Cell> centers, double bandwidth);

  const std::vector<Cell>& centers() const { return centers_; }
  double bandwidth() const { return bandwidth_; }
  int num_features() const { return static_cast<int>(centers_.size()); }
  /// |S| x N matrix; row s is φ(s).
  const Matrix& matrix() const { return matrix_; }

 private:
  std::vector<Cell> centers_;
  double bandwidth_;
  Matrix matrix_;
};

/// Deterministic navigation game on a square grid. Moves off the edge leave
/// the state unchanged; play starts in the middle cell.
class GridWorld {
 public:
  /// Centers drawn without replacement from the grid using config.seed.
  explicit GridWorld(GameConfig config);
  GridWorld(GameConfig config, std::vector<Cell> centers);

  const GameConfig& config() const { return config_; }
  const FeatureMap& features() const { return features_; }
  int grid_size() const { return config_.grid_size; }
  int num_states() const { return config_.grid_size * config_.grid_size; }
  int num_features() const { return features_.num_features(); }
  StateIndex initial_state() const { return initial_state_; }

  bool contains(Cell c) const;
  StateIndex index(Cell c) const;
  Cell cell(StateIndex s) const;
  StateIndex step(StateIndex s, Action a) const;
  /// Precomputed successor table, next_state(s, a).
  StateIndex next_state(StateIndex s, int action) const {
    return successors_[static_cast<std::size_t>(s) * kNumActions + action];
  }
  /// Per-state reward φ(s)ᵀθ for every state.
  Vector state_rewards(const RewardParams& theta) const;

 private:
  void build();

  GameConfig config_;
  FeatureMap features_;
  StateIndex initial_state_ = 0;
  std::vector<StateIndex> successors_;
};

std::vector<Cell> sample_centers(int grid_size, int count, std::uint64_t seed);

/// Component k is exp(-d²/(2·bandwidth²)) with d the distance to center k.
Vector feature_vector(const GridWorld& world, Cell state);
Vector feature_vector(const GridWorld& world, StateIndex state);
double reward(const GridWorld& world, Cell state, const RewardParams& theta);

/// Alternating state/action sequence with its accumulated features φ(τ).
class Trajectory {
 public:
  /// Rolls the actions forward from `start`.
  static Trajectory rollout(const GridWorld& world, StateIndex start,
                            std::span<const Action> actions);
  /// Validates that every consecutive pair is consistent with the action
  /// between them; throws InputDomainError otherwise.
  static Trajectory from_path(const GridWorld& world,
                              std::vector<StateIndex> states,
                              std::vector<Action> actions);

  const std::vector<StateIndex>& states() const { return states_; }
  const std::vector<Action>& actions() const { return actions_; }
  const Vector& feature_sum() const { return feature_sum_; }
  /// Number of actions.
  int length() const { return static_cast<int>(actions_.size()); }
  StateIndex start() const { return states_.front(); }
  StateIndex end() const { return states_.back(); }

  /// Appends one action; returns the new state.
  StateIndex extend(const GridWorld& world, Action a);
  std::string action_string() const;

 private:
  std::vector<StateIndex> states_;
  std::vector<Action> actions_;
  Vector feature_sum_;
};

/// Sum of φ(s) over every state in τ, start included.
Vector trajectory_features(const Trajectory& tau);

/// The two-round office-supplies game: the human moves at t = 0, the robot
/// at t = 1, then the game sinks.
struct PaperclipGame {
  struct Supplies {
    int paperclips;
    int staples;
    bool operator==(const Supplies&) const = default;
  };
  static constexpr std::array<Supplies, 3> kHumanActions = {
      Supplies{0, 2}, Supplies{1, 1}, Supplies{2, 0}};
  static constexpr std::array<Supplies, 3> kRobotActions = {
      Supplies{0, 90}, Supplies{50, 50}, Supplies{90, 0}};

  /// θ·p + (1-θ)·q.
  static constexpr double reward(Supplies a, double theta) {
    return theta * a.paperclips + (1.0 - theta) * a.staples;
  }
};

}  // namespace cirl
