#pragma once

#include "cirl/game.hpp"

namespace cirl {

struct EvalResult {
  double regret = 0.0;
  double kl = 0.0;
  double reward_l2 = 0.0;
  RewardParams theta_gt;
  RewardParams theta_hat;
};

/// Mean over uniformly drawn start states of V*_gt(s) − V^π̂_gt(s), where π̂
/// is the greedy plan for theta_hat and both are scored under theta_gt.
double regret(const GridWorld& world, const RewardParams& theta_gt,
              const RewardParams& theta_hat, int deployment_steps);

/// KL(P_θ̂ ‖ P_θgt) between maximum-entropy trajectory distributions over
/// length-`steps` action sequences from the initial state, by the chain rule.
double kl_divergence(const GridWorld& world, const RewardParams& theta_hat,
                     const RewardParams& theta_gt, double lambda, int steps);

/// ‖Φ(θ̂ − θgt)‖₂ with Φ the state-feature matrix.
double reward_l2(const GridWorld& world, const RewardParams& theta_hat,
                 const RewardParams& theta_gt);

/// All three measures with the config's horizons: regret over the deployment
/// phase, KL over the learning phase.
EvalResult evaluate(const GridWorld& world, const RewardParams& theta_gt,
                    const RewardParams& theta_hat, double lambda);

}  // namespace cirl
