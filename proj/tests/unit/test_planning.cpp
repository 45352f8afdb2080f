#include <gtest/gtest.h>

#include <cmath>

#include "cirl/errors.hpp"
#include "cirl/planning.hpp"
#include "oracles.hpp"

using namespace cirl;

namespace {

struct Case {
  int grid;
  int steps;
  int nf;
  double gamma;
};

}  // namespace

class PlanningOracle : public ::testing::TestWithParam<Case> {};

TEST_P(PlanningOracle, ValueIterationEqualsBestEnumeratedReturn) {
  const Case c = GetParam();
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    GameConfig cfg = oracle::small_config(c.grid, c.steps, c.nf, seed);
    cfg.gamma = c.gamma;
    const GridWorld w(cfg);
    const RewardParams theta = oracle::random_theta(c.nf, 100 + seed);
    const Plan plan = value_iteration(w, theta, c.steps);
    for (StateIndex s = 0; s < w.num_states(); ++s) {
      // Exact: max commutes with the monotone fold.
      EXPECT_EQ(plan.values[0][s], oracle::best_return(w, s, theta, c.steps));
    }
  }
}

TEST_P(PlanningOracle, GreedyPolicyAttainsItsValue) {
  const Case c = GetParam();
  GameConfig cfg = oracle::small_config(c.grid, c.steps, c.nf, 9);
  cfg.gamma = c.gamma;
  const GridWorld w(cfg);
  const RewardParams theta = oracle::random_theta(c.nf, 9);
  const Plan plan = value_iteration(w, theta, c.steps);
  EXPECT_EQ(evaluate_policy(w, theta, plan.greedy_policy, c.steps), plan.values[0]);
}

TEST_P(PlanningOracle, SoftPolicyReproducesTrajectoryDistribution) {
  const Case c = GetParam();
  const GridWorld w(oracle::small_config(c.grid, c.steps, c.nf, 5));
  const RewardParams theta = oracle::random_theta(c.nf, 55);
  for (double lambda : {0.5, 4.0}) {
    const SoftPlan plan = soft_value_iteration(w, theta, lambda, c.steps);
    const auto paths = oracle::enumerate(w, w.initial_state(), c.steps);
    const auto probs = oracle::trajectory_probabilities(w, theta, lambda, c.steps);
    for (std::size_t i = 0; i < paths.size(); ++i) {
      double p = 1.0;
      for (int t = 0; t < c.steps; ++t) p *= plan.soft_policy[t](paths[i].states[t], paths[i].actions[t]);
      EXPECT_NEAR(p, probs[i], 1e-10);
    }
    const double lz = oracle::log_z(w, theta, lambda, c.steps, w.initial_state());
    EXPECT_NEAR(plan.log_partition, lz, 1e-10 * std::max(1.0, std::abs(lz)));
    EXPECT_NEAR(log_partition(w, theta, lambda, c.steps, w.initial_state()), plan.log_partition,
                1e-12);
  }
}

TEST_P(PlanningOracle, ExpectedFeaturesMatchEnumeration) {
  const Case c = GetParam();
  const GridWorld w(oracle::small_config(c.grid, c.steps, c.nf, 6));
  const RewardParams theta = oracle::random_theta(c.nf, 66);
  const double lambda = 2.0;
  const SoftPlan plan = soft_value_iteration(w, theta, lambda, c.steps);
  const Occupancy occ = occupancy_and_features(w, plan.soft_policy, w.initial_state(), c.steps);
  const auto paths = oracle::enumerate(w, w.initial_state(), c.steps);
  const auto probs = oracle::trajectory_probabilities(w, theta, lambda, c.steps);
  Vector expected = Vector::Zero(c.nf);
  for (std::size_t i = 0; i < paths.size(); ++i) expected += probs[i] * paths[i].phi;
  EXPECT_LT((occ.expected_features - expected).cwiseAbs().maxCoeff(), 1e-10);
  for (const Vector& d : occ.visitation) EXPECT_NEAR(d.sum(), 1.0, 1e-12);
}

INSTANTIATE_TEST_SUITE_P(SmallWorlds, PlanningOracle,
                         ::testing::Values(Case{3, 1, 1, 1.0}, Case{3, 4, 2, 1.0},
                                           Case{4, 3, 3, 0.9}, Case{2, 4, 2, 0.5}));

TEST(ValueIteration, PositiveScalingKeepsTheGreedyPolicy) {
  const GridWorld w(oracle::small_config(5, 4, 3, 2));
  const RewardParams theta = oracle::random_theta(3, 8);
  const Plan a = value_iteration(w, theta, 4);
  const Plan b = value_iteration(w, RewardParams(theta.theta * 3.5), 4);
  EXPECT_EQ(a.greedy_policy, b.greedy_policy);
}

TEST(ValueIteration, TiesGoToTheFirstAction) {
  const GridWorld w(oracle::small_config(3, 2, 1, 2));
  const Plan plan = value_iteration(w, RewardParams{0.0}, 2);
  for (const auto& layer : plan.greedy_policy) {
    for (int a : layer) EXPECT_EQ(a, 0);
  }
}

TEST(ValueIteration, RejectsEmptyHorizon) {
  const GridWorld w(oracle::small_config(3, 2, 1, 2));
  EXPECT_THROW(value_iteration(w, RewardParams{1.0}, 0), InputDomainError);
  EXPECT_THROW(soft_value_iteration(w, RewardParams{1.0}, 1.0, 0), InputDomainError);
}

TEST(SoftValueIteration, ZeroLambdaIsUniform) {
  const GridWorld w(oracle::small_config(4, 3, 2, 2));
  const SoftPlan plan = soft_value_iteration(w, oracle::random_theta(2, 1), 0.0, 3);
  for (const Matrix& pi : plan.soft_policy) {
    EXPECT_LT((pi.array() - 0.2).abs().maxCoeff(), 1e-15);
  }
  EXPECT_NEAR(plan.log_partition, 3 * std::log(5.0), 1e-12);
}

TEST(SoftValueIteration, GradientIsLambdaTimesExpectedFeatures) {
  const GridWorld w(oracle::small_config(5, 5, 3, 21));
  const RewardParams theta = oracle::random_theta(3, 22);
  const double lambda = 3.0;
  const int steps = 5;
  const SoftPlan plan = soft_value_iteration(w, theta, lambda, steps);
  const Vector feats =
      occupancy_and_features(w, plan.soft_policy, w.initial_state(), steps).expected_features;
  const double h = 1e-5;
  for (int k = 0; k < 3; ++k) {
    RewardParams up = theta, down = theta;
    up.theta[k] += h;
    down.theta[k] -= h;
    const double fd = (log_partition(w, up, lambda, steps, w.initial_state()) -
                       log_partition(w, down, lambda, steps, w.initial_state())) /
                      (2 * h);
    EXPECT_NEAR(fd, lambda * feats[k], 1e-4 * std::abs(lambda * feats[k]));
  }
}

TEST(Occupancy, RejectsMalformedPolicies) {
  const GridWorld w(oracle::small_config(3, 2, 1, 2));
  StochasticPolicy bad(2, Matrix::Constant(9, kNumActions, 0.3));
  EXPECT_THROW(occupancy_and_features(w, bad, w.initial_state(), 2), InputDomainError);
  StochasticPolicy short_policy(1, Matrix::Constant(9, kNumActions, 0.2));
  EXPECT_THROW(occupancy_and_features(w, short_policy, w.initial_state(), 2), InputDomainError);
}

TEST(Occupancy, DeterministicPolicyVisitsItsRollout) {
  const GridWorld w(oracle::small_config(5, 4, 2, 2));
  const RewardParams theta = oracle::random_theta(2, 3);
  const Plan plan = value_iteration(w, theta, 4);
  const Trajectory t = greedy_rollout(w, plan, w.initial_state());
  const Occupancy occ =
      occupancy_and_features(w, to_stochastic(plan.greedy_policy, w.num_states()), w.initial_state(), 4);
  for (int i = 0; i <= 4; ++i) EXPECT_EQ(occ.visitation[i][t.states()[i]], 1.0);
  EXPECT_TRUE(occ.expected_features.isApprox(t.feature_sum(), 1e-14));
}

TEST(LogSumExp, StableForLargeInputs) {
  const std::vector<double> xs = {1000.0, 1000.0};
  EXPECT_NEAR(log_sum_exp(xs), 1000.0 + std::log(2.0), 1e-12);
}
