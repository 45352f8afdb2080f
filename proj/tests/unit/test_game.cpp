#include <gtest/gtest.h>

#include "cirl/errors.hpp"
#include "cirl/game.hpp"
#include "oracles.hpp"

using namespace cirl;

TEST(GameConfig, EmptyDocumentKeepsDefaults) {
  const GameConfig c = parse_game_config("# nothing here\n\n");
  const GameConfig d;
  EXPECT_EQ(c.grid_size, d.grid_size);
  EXPECT_EQ(c.learning_steps, d.learning_steps);
  EXPECT_EQ(c.lambda, d.lambda);
  EXPECT_FALSE(c.eta.has_value());
}

TEST(GameConfig, FormatRoundTrips) {
  GameConfig c;
  c.grid_size = 7;
  c.rbf_bandwidth = 1.3;
  c.eta = 0.3;
  c.seed = 99;
  const GameConfig back = parse_game_config(format_game_config(c));
  EXPECT_EQ(format_game_config(back), format_game_config(c));
  EXPECT_EQ(back.eta, c.eta);
}

TEST(GameConfig, GridSizeAloneSetsBandwidth) {
  EXPECT_DOUBLE_EQ(parse_game_config("grid_size = 8").rbf_bandwidth, 2.0);
  EXPECT_DOUBLE_EQ(parse_game_config("grid_size = 8\nrbf_bandwidth = 1").rbf_bandwidth, 1.0);
}

TEST(GameConfig, RejectsBadDocuments) {
  EXPECT_THROW(parse_game_config("colour = red"), InputDomainError);
  EXPECT_THROW(parse_game_config("seed = 1\nseed = 2"), InputDomainError);
  EXPECT_THROW(parse_game_config("grid_size = ten"), InputDomainError);
  EXPECT_THROW(parse_game_config("grid_size 10"), InputDomainError);
  EXPECT_THROW(parse_game_config("lambda = 0"), InputDomainError);
  EXPECT_THROW(parse_game_config("learning_steps = 30"), InputDomainError);
  EXPECT_THROW(parse_game_config("gamma = 1.5"), InputDomainError);
  EXPECT_THROW(load_game_config("/nonexistent/cfg"), IoError);
}

TEST(GridWorld, StartsInTheMiddle) {
  GameConfig c;
  const GridWorld w(c);
  EXPECT_EQ(w.cell(w.initial_state()), (Cell{5, 5}));
  c.grid_size = 3;
  c.rbf_bandwidth = 1;
  EXPECT_EQ(GridWorld(c).cell(GridWorld(c).initial_state()), (Cell{1, 1}));
}

TEST(GridWorld, TransitionsMatchCoordinateMoves) {
  const GridWorld w(oracle::small_config(4, 2, 2, 3));
  for (StateIndex s = 0; s < w.num_states(); ++s) {
    for (int a = 0; a < kNumActions; ++a) {
      const Cell n = oracle::move(4, w.cell(s), a);
      EXPECT_EQ(w.next_state(s, a), w.index(n));
      EXPECT_EQ(w.step(s, static_cast<Action>(a)), w.index(n));
    }
  }
}

TEST(GridWorld, FeaturesMatchRbfFormula) {
  const GridWorld w(oracle::small_config(5, 2, 3, 11));
  for (StateIndex s = 0; s < w.num_states(); ++s) {
    EXPECT_TRUE(feature_vector(w, s).isApprox(oracle::features(w, s), 1e-15));
  }
}

TEST(GridWorld, CentersAreDistinctAndSeeded) {
  const auto a = sample_centers(10, 10, 5);
  const auto b = sample_centers(10, 10, 5);
  EXPECT_EQ(a, b);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) EXPECT_FALSE(a[i] == a[j]);
  }
  EXPECT_NE(sample_centers(10, 10, 6), a);
}

TEST(GridWorld, RejectsOutOfRangeCells) {
  const GridWorld w(oracle::small_config(3, 2, 1, 1));
  EXPECT_THROW(w.index(Cell{3, 0}), InputDomainError);
  EXPECT_THROW(w.cell(9), InputDomainError);
  EXPECT_THROW(GridWorld(oracle::small_config(3, 2, 1, 1), {Cell{5, 5}}), InputDomainError);
}

TEST(Trajectory, NoopsStayPut) {
  const GridWorld w(oracle::small_config(5, 4, 2, 1));
  const std::vector<Action> acts(4, Action::Noop);
  const Trajectory t = Trajectory::rollout(w, w.initial_state(), acts);
  EXPECT_EQ(t.end(), w.initial_state());
  EXPECT_EQ(t.action_string(), "0000");
  EXPECT_TRUE(t.feature_sum().isApprox(5.0 * oracle::features(w, w.initial_state()), 1e-14));
}

TEST(Trajectory, WallsHoldTheAgent) {
  const GridWorld w(oracle::small_config(3, 4, 1, 1));
  const std::vector<Action> acts = {Action::North, Action::North, Action::West, Action::West};
  const Trajectory t = Trajectory::rollout(w, w.initial_state(), acts);
  EXPECT_EQ(w.cell(t.end()), (Cell{0, 0}));
  EXPECT_EQ(t.states()[2], t.states()[1]);
}

TEST(Trajectory, FromPathValidatesSteps) {
  const GridWorld w(oracle::small_config(3, 2, 1, 1));
  const StateIndex c = w.initial_state();
  EXPECT_NO_THROW(Trajectory::from_path(w, {c, c - 3}, {Action::North}));
  EXPECT_THROW(Trajectory::from_path(w, {c, c + 3}, {Action::North}), InputDomainError);
  EXPECT_THROW(Trajectory::from_path(w, {c, c}, {}), InputDomainError);
}

TEST(Trajectory, ExtendMatchesRollout) {
  const GridWorld w(oracle::small_config(5, 4, 2, 1));
  Trajectory t = Trajectory::rollout(w, w.initial_state(), {});
  const std::vector<Action> acts = {Action::East, Action::South, Action::Noop, Action::West};
  for (Action a : acts) t.extend(w, a);
  const Trajectory r = Trajectory::rollout(w, w.initial_state(), acts);
  EXPECT_EQ(t.states(), r.states());
  EXPECT_EQ(t.feature_sum(), r.feature_sum());
}

TEST(Actions, SymbolsRoundTrip) {
  for (Action a : kActionOrder) {
    EXPECT_EQ(action_from_symbol(action_symbol(a)), a);
    EXPECT_EQ(inverse(inverse(a)), a);
  }
  EXPECT_EQ(inverse(Action::North), Action::South);
  EXPECT_EQ(action_from_symbol('X'), Action::Noop);
  EXPECT_THROW(action_from_symbol('Q'), InputDomainError);
}

TEST(Paperclip, RewardIsAffineInTheta) {
  using G = PaperclipGame;
  EXPECT_DOUBLE_EQ(G::reward(G::kRobotActions[1], 0.3), 50.0);
  EXPECT_DOUBLE_EQ(G::reward(G::kHumanActions[0], 0.25), 1.5);
  EXPECT_DOUBLE_EQ(G::reward(G::kRobotActions[2], 1.0), 90.0);
}

TEST(Theta, SamplesLieInTheBox) {
  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    const RewardParams t = sample_theta(6, rng);
    EXPECT_EQ(t.size(), 6);
    EXPECT_LE(t.theta.cwiseAbs().maxCoeff(), 1.0);
  }
}
