#pragma once

#include <compare>
#include <map>
#include <shared_mutex>
#include <vector>

#include <nlohmann/json.hpp>

#include "cirl/game.hpp"

namespace cirl {

/// Memoizes log Z(θ, λ) for one world. Safe for concurrent use.
class LogPartitionCache {
 public:
  explicit LogPartitionCache(const GridWorld& world) : world_(&world) {}
  LogPartitionCache(const LogPartitionCache&) = delete;
  LogPartitionCache& operator=(const LogPartitionCache&) = delete;

  const GridWorld& world() const { return *world_; }
  double get(const RewardParams& theta, double lambda, int steps);
  std::size_t size() const;

 private:
  struct Key {
    std::vector<double> theta;
    double lambda;
    int steps;
    auto operator<=>(const Key&) const = default;
  };
  const GridWorld* world_;
  mutable std::shared_mutex mutex_;
  std::map<Key, double> table_;
};

/// Importance-weighted sample approximation of the robot's posterior over θ.
class Belief {
 public:
  /// Uniform weights over the given particles.
  explicit Belief(std::vector<RewardParams> particles);

  int size() const { return static_cast<int>(particles_.rows()); }
  int num_features() const { return static_cast<int>(particles_.cols()); }
  /// M x N, row i is particle i.
  const Matrix& particles() const { return particles_; }
  RewardParams particle(int i) const { return RewardParams(particles_.row(i).transpose()); }
  const Vector& log_weights() const { return log_weights_; }
  bool normalized() const { return normalized_; }

  Vector weights() const;
  /// Adds to every log-weight; leaves the belief unnormalized.
  void add_log_likelihood(const Vector& log_likelihood);
  void normalize();

 private:
  Matrix particles_;
  Vector log_weights_;
  bool normalized_ = true;
};

/// M particles drawn i.i.d. from the uniform prior on [-1, 1]^N.
Belief init_belief(const GameConfig& config, Rng& rng);

/// Conditions on a full-length demonstration under the maximum-entropy
/// likelihood: each log-weight gains λ·θᵀφ(τ) − log Z(θ, λ). The trajectory
/// must start at the world's initial state and have learning_steps actions.
Belief update(const Belief& belief, const GridWorld& world, const Trajectory& tau_obs,
              double lambda, LogPartitionCache* cache = nullptr);

/// Same likelihood truncated to the prefix's own length. Used for live
/// previews while a demonstration is still being recorded.
Belief update_prefix(const Belief& belief, const GridWorld& world,
                     const Trajectory& prefix, double lambda,
                     LogPartitionCache* cache = nullptr);

RewardParams posterior_mean(const Belief& belief);
/// Largest weight; ties go to the lowest index.
int map_index(const Belief& belief);
RewardParams map_estimate(const Belief& belief);

/// {particles, weights, posterior_mean, map_index}.
nlohmann::json belief_to_json(const Belief& belief);

}  // namespace cirl
