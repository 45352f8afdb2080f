#include "cirl/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "cirl/errors.hpp"
#include "cirl/planning.hpp"

namespace cirl {

double regret(const GridWorld& world, const RewardParams& theta_gt,
              const RewardParams& theta_hat, int deployment_steps) {
  // With no moves left every policy collects the same reward.
  if (deployment_steps == 0) return 0.0;
  const Plan optimal = value_iteration(world, theta_gt, deployment_steps);
  const Plan inferred = value_iteration(world, theta_hat, deployment_steps);
  const Vector achieved =
      evaluate_policy(world, theta_gt, inferred.greedy_policy, deployment_steps);
  const double gap = (optimal.values[0] - achieved).mean();
  // V* dominates every policy; only rounding can push the gap below zero.
  return std::max(0.0, gap);
}

double kl_divergence(const GridWorld& world, const RewardParams& theta_hat,
                     const RewardParams& theta_gt, double lambda, int steps) {
  if (!(lambda >= 0.0)) throw InputDomainError("lambda must be nonnegative");
  const SoftPlan p = soft_value_iteration(world, theta_hat, lambda, steps);
  const SoftPlan q = soft_value_iteration(world, theta_gt, lambda, steps);
  const Occupancy occ =
      occupancy_and_features(world, p.soft_policy, world.initial_state(), steps);
  double kl = 0.0;
  for (int t = 0; t < steps; ++t) {
    const Vector& d = occ.visitation[t];
    for (StateIndex s = 0; s < world.num_states(); ++s) {
      if (d[s] == 0.0) continue;
      double local = 0.0;
      for (int a = 0; a < kNumActions; ++a) {
        const double pa = p.soft_policy[t](s, a);
        if (pa > 0.0) local += pa * (std::log(pa) - std::log(q.soft_policy[t](s, a)));
      }
      kl += d[s] * local;
    }
  }
  return std::max(0.0, kl);
}

double reward_l2(const GridWorld& world, const RewardParams& theta_hat,
                 const RewardParams& theta_gt) {
  if (theta_hat.size() != theta_gt.size()) {
    throw InputDomainError("reward parameter vectors differ in length");
  }
  return world.state_rewards(RewardParams(theta_hat.theta - theta_gt.theta)).norm();
}

EvalResult evaluate(const GridWorld& world, const RewardParams& theta_gt,
                    const RewardParams& theta_hat, double lambda) {
  const GameConfig& c = world.config();
  EvalResult out;
  out.regret = regret(world, theta_gt, theta_hat, c.deployment_steps());
  out.kl = kl_divergence(world, theta_hat, theta_gt, lambda, c.learning_steps);
  out.reward_l2 = reward_l2(world, theta_hat, theta_gt);
  out.theta_gt = theta_gt;
  out.theta_hat = theta_hat;
  return out;
}

}  // namespace cirl
