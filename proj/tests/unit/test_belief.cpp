#include <gtest/gtest.h>

#include <cmath>

#include "cirl/belief.hpp"
#include "cirl/errors.hpp"
#include "cirl/harness.hpp"
#include "oracles.hpp"

using namespace cirl;

namespace {

Trajectory path(const GridWorld& w, const std::string& moves) {
  std::vector<Action> acts;
  for (char c : moves) acts.push_back(action_from_symbol(c));
  return Trajectory::rollout(w, w.initial_state(), acts);
}

}  // namespace

TEST(BeliefUpdate, MatchesExhaustiveBayes) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const GameConfig cfg = oracle::small_config(3, 4, 2, seed);
    const GridWorld w(cfg);
    const Belief prior = prior_belief(cfg);
    for (const std::string moves : {"NNEE", "0000", "SWSW"}) {
      const Trajectory demo = path(w, moves);
      const Belief post = update(prior, w, demo, cfg.lambda);
      Vector phi = Vector::Zero(2);
      for (StateIndex s : demo.states()) phi += oracle::features(w, s);
      const auto expect = oracle::posterior(prior, w, phi, cfg.lambda, 4);
      const Vector got = post.weights();
      for (int i = 0; i < prior.size(); ++i) EXPECT_NEAR(got[i], expect[i], 1e-10);
    }
  }
}

TEST(BeliefUpdate, PosteriorOddsMatchLikelihoodRatio) {
  const GameConfig cfg = oracle::small_config(4, 4, 3, 8);
  const GridWorld w(cfg);
  const Belief prior = prior_belief(cfg);
  const Trajectory demo = path(w, "EENS");
  const Belief post = update(prior, w, demo, cfg.lambda);
  const Vector lw = post.log_weights();
  for (int i = 1; i < prior.size(); ++i) {
    const RewardParams a = prior.particle(0), b = prior.particle(i);
    const double oracle_log_odds =
        cfg.lambda * demo.feature_sum().dot(a.theta - b.theta) -
        (oracle::log_z(w, a, cfg.lambda, 4, w.initial_state()) -
         oracle::log_z(w, b, cfg.lambda, 4, w.initial_state()));
    EXPECT_NEAR(lw[0] - lw[i], oracle_log_odds, 1e-10);
  }
}

TEST(BeliefUpdate, ZeroLambdaLearnsNothing) {
  const GameConfig cfg = oracle::small_config(3, 2, 2, 4);
  const GridWorld w(cfg);
  const Belief prior = prior_belief(cfg);
  const Belief post = update(prior, w, path(w, "NE"), 0.0);
  EXPECT_EQ(post.weights(), prior.weights());
}

TEST(BeliefUpdate, CacheDoesNotChangeTheResult) {
  const GameConfig cfg = oracle::small_config(4, 3, 2, 4);
  const GridWorld w(cfg);
  LogPartitionCache cache(w);
  const Belief prior = prior_belief(cfg);
  const Trajectory demo = path(w, "WWN");
  const Belief a = update(prior, w, demo, cfg.lambda);
  const Belief b = update(prior, w, demo, cfg.lambda, &cache);
  const Belief c = update(prior, w, demo, cfg.lambda, &cache);
  EXPECT_EQ(a.log_weights(), b.log_weights());
  EXPECT_EQ(b.log_weights(), c.log_weights());
  EXPECT_EQ(cache.size(), static_cast<std::size_t>(prior.size()));
}

TEST(BeliefUpdate, ValidatesTheDemonstration) {
  const GameConfig cfg = oracle::small_config(3, 3, 1, 4);
  const GridWorld w(cfg);
  const Belief prior = prior_belief(cfg);
  EXPECT_THROW(update(prior, w, path(w, "NE"), 1.0), InputDomainError);
  const std::vector<Action> acts(3, Action::Noop);
  EXPECT_THROW(update(prior, w, Trajectory::rollout(w, 0, acts), 1.0), InputDomainError);
  EXPECT_THROW(update(prior, w, path(w, "NEN"), -1.0), InputDomainError);
  const Belief wrong_dim(std::vector<RewardParams>{RewardParams{1.0, 2.0}});
  EXPECT_THROW(update(wrong_dim, w, path(w, "NEN"), 1.0), InputDomainError);
}

TEST(BeliefUpdate, PrefixAtFullLengthEqualsBatch) {
  const GameConfig cfg = oracle::small_config(4, 4, 2, 5);
  const GridWorld w(cfg);
  const Belief prior = prior_belief(cfg);
  const Trajectory demo = path(w, "NNWE");
  EXPECT_EQ(update_prefix(prior, w, demo, cfg.lambda).log_weights(),
            update(prior, w, demo, cfg.lambda).log_weights());
  EXPECT_NO_THROW(update_prefix(prior, w, path(w, "NN"), cfg.lambda));
  EXPECT_THROW(update_prefix(prior, w, path(w, "NNNNN"), cfg.lambda), InputDomainError);
}

TEST(BeliefUpdate, PrefixUsesTruncatedLikelihood) {
  const GameConfig cfg = oracle::small_config(4, 4, 2, 5);
  const GridWorld w(cfg);
  const Belief prior = prior_belief(cfg);
  const Trajectory prefix = path(w, "NW");
  const Vector got = update_prefix(prior, w, prefix, cfg.lambda).weights();
  const auto expect = oracle::posterior(prior, w, prefix.feature_sum(), cfg.lambda, 2);
  for (int i = 0; i < prior.size(); ++i) EXPECT_NEAR(got[i], expect[i], 1e-10);
}

TEST(Belief, EstimatesNeedNormalizedWeights) {
  Belief b(std::vector<RewardParams>{RewardParams{1.0}, RewardParams{-1.0}});
  Vector ll(2);
  ll << 0.0, 1.0;
  b.add_log_likelihood(ll);
  EXPECT_FALSE(b.normalized());
  EXPECT_THROW(posterior_mean(b), StateError);
  EXPECT_THROW(map_index(b), StateError);
  b.normalize();
  EXPECT_EQ(map_index(b), 1);
  const double w1 = std::exp(1.0) / (1.0 + std::exp(1.0));
  EXPECT_NEAR(posterior_mean(b).theta[0], (1 - w1) - w1, 1e-15);
}

TEST(Belief, MapTiesGoToLowestIndex) {
  const Belief b(std::vector<RewardParams>{RewardParams{0.1}, RewardParams{0.2}, RewardParams{0.3}});
  EXPECT_EQ(map_index(b), 0);
  EXPECT_EQ(map_estimate(b), RewardParams{0.1});
}

TEST(Belief, InitIsSeededAndBounded) {
  GameConfig cfg;
  cfg.num_features = 4;
  cfg.belief_samples = 50;
  const Belief a = prior_belief(cfg);
  const Belief b = prior_belief(cfg);
  EXPECT_EQ(a.particles(), b.particles());
  EXPECT_EQ(a.size(), 50);
  EXPECT_LE(a.particles().cwiseAbs().maxCoeff(), 1.0);
  EXPECT_NEAR(a.weights().sum(), 1.0, 1e-12);
  EXPECT_THROW(Belief(std::vector<RewardParams>{}), InputDomainError);
}

TEST(Belief, JsonSnapshotCarriesEverything) {
  const GameConfig cfg = oracle::small_config(3, 2, 2, 1);
  const auto j = belief_to_json(prior_belief(cfg));
  EXPECT_EQ(j.at("particles").size(), 20u);
  EXPECT_EQ(j.at("weights").size(), 20u);
  EXPECT_EQ(j.at("posterior_mean").size(), 2u);
  EXPECT_EQ(j.at("map_index").get<int>(), 0);
}
