#pragma once

// Brute-force reference implementations. They deliberately avoid the
// library's successor table, feature matrix, and dynamic programs: moves are
// recomputed from cell coordinates and features from the RBF formula.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "cirl/belief.hpp"
#include "cirl/game.hpp"

namespace oracle {

using cirl::Cell;
using cirl::GridWorld;
using cirl::RewardParams;
using cirl::StateIndex;
using cirl::Vector;

struct Path {
  std::vector<int> actions;
  std::vector<StateIndex> states;
  Vector phi;
};

inline Cell move(int g, Cell c, int a) {
  // N, S, E, W, stay; walls hold the agent in place.
  static const int dr[5] = {-1, 1, 0, 0, 0};
  static const int dc[5] = {0, 0, 1, -1, 0};
  Cell n{c.row + dr[a], c.col + dc[a]};
  if (n.row < 0 || n.row >= g || n.col < 0 || n.col >= g) return c;
  return n;
}

inline Vector features(const GridWorld& w, StateIndex s) {
  const int g = w.grid_size();
  const Cell c{s / g, s % g};
  const auto& centers = w.features().centers();
  const double bw = w.features().bandwidth();
  Vector out(static_cast<Eigen::Index>(centers.size()));
  for (std::size_t k = 0; k < centers.size(); ++k) {
    const double dr = c.row - centers[k].row, dc = c.col - centers[k].col;
    out[static_cast<Eigen::Index>(k)] = std::exp(-(dr * dr + dc * dc) / (2.0 * bw * bw));
  }
  return out;
}

/// Every action sequence of the given length from `start`, 5^steps of them.
inline std::vector<Path> enumerate(const GridWorld& w, StateIndex start, int steps) {
  const int g = w.grid_size();
  std::vector<Path> out;
  Path cur;
  cur.states.push_back(start);
  std::function<void()> rec = [&] {
    if (static_cast<int>(cur.actions.size()) == steps) {
      Path p = cur;
      p.phi = Vector::Zero(w.num_features());
      for (StateIndex s : p.states) p.phi += features(w, s);
      out.push_back(std::move(p));
      return;
    }
    const StateIndex s = cur.states.back();
    for (int a = 0; a < 5; ++a) {
      const Cell n = move(g, Cell{s / g, s % g}, a);
      cur.actions.push_back(a);
      cur.states.push_back(n.row * g + n.col);
      rec();
      cur.actions.pop_back();
      cur.states.pop_back();
    }
  };
  rec();
  return out;
}

inline double state_reward(const GridWorld& w, StateIndex s, const RewardParams& theta) {
  return features(w, s).dot(theta.theta);
}

/// Discounted return of a path, summed right to left.
inline double path_return(const GridWorld& w, const Path& p, const RewardParams& theta) {
  const double gamma = w.config().gamma;
  double v = state_reward(w, p.states.back(), theta);
  for (int t = static_cast<int>(p.states.size()) - 2; t >= 0; --t) {
    v = state_reward(w, p.states[t], theta) + gamma * v;
  }
  return v;
}

inline double best_return(const GridWorld& w, StateIndex start, const RewardParams& theta,
                          int steps) {
  double best = -std::numeric_limits<double>::infinity();
  for (const Path& p : enumerate(w, start, steps)) best = std::max(best, path_return(w, p, theta));
  return best;
}

inline double lse(const std::vector<double>& xs) {
  const double hi = *std::max_element(xs.begin(), xs.end());
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - hi);
  return hi + std::log(acc);
}

inline double log_z(const GridWorld& w, const RewardParams& theta, double lambda, int steps,
                    StateIndex start) {
  std::vector<double> scores;
  for (const Path& p : enumerate(w, start, steps)) scores.push_back(lambda * p.phi.dot(theta.theta));
  return lse(scores);
}

/// P(action sequence) under the maximum-entropy model, by normalizing over
/// the whole enumeration.
inline std::vector<double> trajectory_probabilities(const GridWorld& w, const RewardParams& theta,
                                                    double lambda, int steps) {
  const auto paths = enumerate(w, w.initial_state(), steps);
  std::vector<double> scores;
  for (const Path& p : paths) scores.push_back(lambda * p.phi.dot(theta.theta));
  const double z = lse(scores);
  std::vector<double> out;
  for (double s : scores) out.push_back(std::exp(s - z));
  return out;
}

/// KL(P_p ‖ P_q) summed over every action sequence.
inline double kl(const GridWorld& w, const RewardParams& p, const RewardParams& q, double lambda,
                 int steps) {
  const auto pp = trajectory_probabilities(w, p, lambda, steps);
  const auto qq = trajectory_probabilities(w, q, lambda, steps);
  double out = 0.0;
  for (std::size_t i = 0; i < pp.size(); ++i) {
    if (pp[i] > 0.0) out += pp[i] * (std::log(pp[i]) - std::log(qq[i]));
  }
  return out;
}

/// Posterior weights: prior weight × likelihood / evidence.
inline std::vector<double> posterior(const cirl::Belief& prior, const GridWorld& w,
                                     const Vector& phi_obs, double lambda, int steps) {
  const Vector pw = prior.weights();
  std::vector<double> unnorm;
  double evidence = 0.0;
  for (int i = 0; i < prior.size(); ++i) {
    const RewardParams th = prior.particle(i);
    const double like =
        std::exp(lambda * phi_obs.dot(th.theta) - log_z(w, th, lambda, steps, w.initial_state()));
    unnorm.push_back(pw[i] * like);
    evidence += pw[i] * like;
  }
  for (double& x : unnorm) x /= evidence;
  return unnorm;
}


/// Small worlds the enumerations can afford: 5^steps sequences.
inline cirl::GameConfig small_config(int grid, int steps, int nf, std::uint64_t seed) {
  cirl::GameConfig c;
  c.grid_size = grid;
  c.learning_steps = steps;
  c.horizon_total = 2 * steps;
  c.num_features = nf;
  c.rbf_bandwidth = grid / 3.0;
  c.belief_samples = 20;
  c.seed = seed;
  return c;
}

inline RewardParams random_theta(int nf, std::uint64_t seed) {
  cirl::Rng rng(seed);
  return cirl::sample_theta(nf, rng);
}

}  // namespace oracle
