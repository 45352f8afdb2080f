#pragma once

#include <vector>

#include "cirl/game.hpp"

namespace cirl {

/// Per-timestep table: entry t is a |S| x |A| matrix.
using StepTable = std::vector<Matrix>;
/// Per-timestep stochastic policy; row s of entry t is a distribution over
/// actions in kActionOrder.
using StochasticPolicy = std::vector<Matrix>;
/// Per-timestep deterministic policy: entry t maps state to action index.
using DeterministicPolicy = std::vector<std::vector<int>>;

/// Finite-horizon optimal plan. Rewards accrue on every visited state,
/// including the final one, so values has steps + 1 layers and the last
/// layer is the bare state reward.
struct Plan {
  int steps = 0;
  StepTable q_values;                  // steps layers
  std::vector<Vector> values;          // steps + 1 layers
  DeterministicPolicy greedy_policy;   // steps layers
};

/// Maximum-entropy plan: the induced trajectory distribution from the
/// initial state is P(τ) ∝ exp(λ·θᵀφ(τ)) over action sequences of length
/// `steps`.
struct SoftPlan {
  int steps = 0;
  double lambda = 0.0;
  StochasticPolicy soft_policy;        // steps layers
  std::vector<Vector> soft_values;     // steps + 1 layers
  double log_partition = 0.0;          // soft_values[0][initial_state]
};

struct Occupancy {
  std::vector<Vector> visitation;      // steps + 1 distributions over states
  Vector expected_features;
};

Plan value_iteration(const GridWorld& world, const RewardParams& theta, int steps);

SoftPlan soft_value_iteration(const GridWorld& world, const RewardParams& theta,
                              double lambda, int steps);

/// log Σ_τ exp(λ·θᵀφ(τ)) over length-`steps` action sequences from `start`,
/// without materializing the policy tables.
double log_partition(const GridWorld& world, const RewardParams& theta, double lambda,
                     int steps, StateIndex start);

Occupancy occupancy_and_features(const GridWorld& world, const StochasticPolicy& policy,
                                 StateIndex start_state, int steps);

/// Value at t = 0 of following `policy` from every start state, with rewards
/// from `theta` and the world's discount.
Vector evaluate_policy(const GridWorld& world, const RewardParams& theta,
                       const DeterministicPolicy& policy, int steps);

StochasticPolicy to_stochastic(const DeterministicPolicy& policy, int num_states);

Trajectory greedy_rollout(const GridWorld& world, const Plan& plan, StateIndex start);

/// Numerically stable log Σ exp(x_i).
double log_sum_exp(std::span<const double> xs);

}  // namespace cirl
