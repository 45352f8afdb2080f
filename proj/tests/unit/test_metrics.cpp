#include <gtest/gtest.h>

#include <cmath>

#include "cirl/errors.hpp"
#include "cirl/metrics.hpp"
#include "cirl/planning.hpp"
#include "oracles.hpp"

using namespace cirl;

namespace {

// Regret by enumeration: the deployed robot picks, at every step, the first
// action whose best continuation under θ̂ is maximal.
double brute_regret(const GridWorld& w, const RewardParams& gt, const RewardParams& hat,
                    int steps) {
  const int g = w.grid_size();
  double total = 0.0;
  for (StateIndex s0 = 0; s0 < w.num_states(); ++s0) {
    std::vector<StateIndex> states = {s0};
    StateIndex s = s0;
    for (int t = 0; t < steps; ++t) {
      const int left = steps - t - 1;
      int best_a = 0;
      double best = -INFINITY;
      for (int a = 0; a < 5; ++a) {
        const Cell n = oracle::move(g, w.cell(s), a);
        const StateIndex ns = n.row * g + n.col;
        const double v = left == 0 ? oracle::state_reward(w, ns, hat)
                                   : oracle::best_return(w, ns, hat, left);
        if (v > best) {
          best = v;
          best_a = a;
        }
      }
      const Cell n = oracle::move(g, w.cell(s), best_a);
      s = n.row * g + n.col;
      states.push_back(s);
    }
    oracle::Path p;
    p.states = states;
    total += oracle::best_return(w, s0, gt, steps) - oracle::path_return(w, p, gt);
  }
  return total / w.num_states();
}

}  // namespace

TEST(Regret, MatchesEnumeratedDeployment) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const GridWorld w(oracle::small_config(3, 3, 2, seed));
    const RewardParams gt = oracle::random_theta(2, seed);
    const RewardParams hat = oracle::random_theta(2, seed + 50);
    EXPECT_NEAR(regret(w, gt, hat, 3), brute_regret(w, gt, hat, 3), 1e-10);
  }
}

TEST(Regret, ZeroForTheTruthAndNeverNegative) {
  const GridWorld w(oracle::small_config(5, 4, 3, 2));
  const RewardParams gt = oracle::random_theta(3, 1);
  EXPECT_EQ(regret(w, gt, gt, 4), 0.0);
  for (std::uint64_t s = 0; s < 20; ++s) {
    EXPECT_GE(regret(w, gt, oracle::random_theta(3, 200 + s), 4), 0.0);
  }
  EXPECT_EQ(regret(w, gt, RewardParams(-gt.theta), 0), 0.0);
}

TEST(Regret, InvariantToPositiveScalingOfTheEstimate) {
  const GridWorld w(oracle::small_config(5, 4, 3, 2));
  const RewardParams gt = oracle::random_theta(3, 1);
  const RewardParams hat = oracle::random_theta(3, 2);
  EXPECT_EQ(regret(w, gt, hat, 4), regret(w, gt, RewardParams(hat.theta * 7.0), 4));
}

TEST(Kl, MatchesEnumeration) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const GridWorld w(oracle::small_config(3, 4, 2, seed));
    const RewardParams p = oracle::random_theta(2, seed);
    const RewardParams q = oracle::random_theta(2, seed + 9);
    for (double lambda : {0.5, 4.0}) {
      EXPECT_NEAR(kl_divergence(w, p, q, lambda, 4), oracle::kl(w, p, q, lambda, 4), 1e-10);
    }
  }
}

TEST(Kl, ZeroOnlyForIdenticalModels) {
  const GridWorld w(oracle::small_config(4, 3, 2, 3));
  const RewardParams p = oracle::random_theta(2, 3);
  EXPECT_NEAR(kl_divergence(w, p, p, 4.0, 3), 0.0, 1e-14);
  EXPECT_GT(kl_divergence(w, p, RewardParams(-p.theta), 4.0, 3), 0.0);
  EXPECT_EQ(kl_divergence(w, p, RewardParams(-p.theta), 0.0, 3), 0.0);
}

TEST(RewardL2, IsTheNormOfThePerStateGap) {
  const GridWorld w(oracle::small_config(4, 2, 3, 3));
  const RewardParams a = oracle::random_theta(3, 1), b = oracle::random_theta(3, 2);
  double ss = 0.0;
  for (StateIndex s = 0; s < w.num_states(); ++s) {
    const double d = oracle::state_reward(w, s, a) - oracle::state_reward(w, s, b);
    ss += d * d;
  }
  EXPECT_NEAR(reward_l2(w, a, b), std::sqrt(ss), 1e-12);
  EXPECT_EQ(reward_l2(w, a, a), 0.0);
  EXPECT_THROW(reward_l2(w, a, RewardParams{1.0}), InputDomainError);
}

TEST(Evaluate, UsesThePhaseHorizons) {
  const GameConfig cfg = oracle::small_config(4, 3, 2, 3);
  const GridWorld w(cfg);
  const RewardParams gt = oracle::random_theta(2, 1), hat = oracle::random_theta(2, 2);
  const EvalResult r = evaluate(w, gt, hat, cfg.lambda);
  EXPECT_EQ(r.regret, regret(w, gt, hat, cfg.deployment_steps()));
  EXPECT_EQ(r.kl, kl_divergence(w, hat, gt, cfg.lambda, cfg.learning_steps));
  EXPECT_EQ(r.reward_l2, reward_l2(w, hat, gt));
  EXPECT_EQ(r.theta_hat, hat);
}
