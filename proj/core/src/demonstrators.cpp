#include "cirl/demonstrators.hpp"

#include <algorithm>
#include <array>
#include <limits>

#include "cirl/errors.hpp"
#include "cirl/metrics.hpp"
#include "cirl/planning.hpp"

namespace cirl {

double DemoObjective::score(const Vector& phi) const {
  return phi.dot(theta.theta) - eta * (target_features - phi).squaredNorm();
}

Trajectory expert_demo(const GridWorld& world, const RewardParams& theta) {
  const Plan plan = value_iteration(world, theta, world.config().learning_steps);
  return greedy_rollout(world, plan, world.initial_state());
}

Vector target_features(const GridWorld& world, const RewardParams& theta, double lambda) {
  const int steps = world.config().learning_steps;
  const SoftPlan plan = soft_value_iteration(world, theta, lambda, steps);
  return occupancy_and_features(world, plan.soft_policy, world.initial_state(), steps)
      .expected_features;
}

DemoObjective make_objective(const GridWorld& world, const RewardParams& theta,
                             double lambda, double eta) {
  if (!(eta >= 0.0)) throw InputDomainError("eta must be nonnegative");
  return DemoObjective{theta, target_features(world, theta, lambda), eta, lambda};
}

namespace {

struct Candidate {
  double score = -std::numeric_limits<double>::infinity();
  std::vector<int> actions;

  bool better_than(const Candidate& other) const {
    if (score != other.score) return score > other.score;
    return actions < other.actions;
  }
};

/// Distinct successor states of s in action order; later actions that land
/// on an already produced state are dropped (they yield identical paths).
int distinct_moves(const GridWorld& world, StateIndex s, std::array<int, kNumActions>& out) {
  int count = 0;
  for (int a = 0; a < kNumActions; ++a) {
    const StateIndex next = world.next_state(s, a);
    bool dup = false;
    for (int i = 0; i < count; ++i) dup |= world.next_state(s, out[i]) == next;
    if (!dup) out[count++] = a;
  }
  return count;
}

Trajectory to_trajectory(const GridWorld& world, const std::vector<int>& actions) {
  std::vector<Action> acts;
  acts.reserve(actions.size());
  for (int a : actions) acts.push_back(static_cast<Action>(a));
  return Trajectory::rollout(world, world.initial_state(), acts);
}

void exhaustive(const GridWorld& world, const DemoObjective& objective, int depth_left,
                StateIndex s, Vector& phi, std::vector<int>& actions, Candidate& best) {
  if (depth_left == 0) {
    const double value = objective.score(phi);
    if (value > best.score) {
      best.score = value;
      best.actions = actions;
    }
    return;
  }
  std::array<int, kNumActions> moves{};
  const int count = distinct_moves(world, s, moves);
  const auto& features = world.features().matrix();
  for (int i = 0; i < count; ++i) {
    const StateIndex next = world.next_state(s, moves[i]);
    const Vector saved = phi;
    phi += features.row(next).transpose();
    actions.push_back(moves[i]);
    exhaustive(world, objective, depth_left - 1, next, phi, actions, best);
    actions.pop_back();
    phi = saved;
  }
}

/// Per-timestep table of features still to be collected after (t, s).
using Completion = std::vector<Matrix>;

Completion greedy_completion(const GridWorld& world, const Plan& plan) {
  const Matrix& phi = world.features().matrix();
  Completion out(plan.steps + 1, Matrix::Zero(world.num_states(), world.num_features()));
  for (int t = plan.steps - 1; t >= 0; --t) {
    for (StateIndex s = 0; s < world.num_states(); ++s) {
      const StateIndex next = world.next_state(s, plan.greedy_policy[t][s]);
      out[t].row(s) = phi.row(next) + out[t + 1].row(next);
    }
  }
  return out;
}

Completion soft_completion(const GridWorld& world, const SoftPlan& plan) {
  const Matrix& phi = world.features().matrix();
  Completion out(plan.steps + 1, Matrix::Zero(world.num_states(), world.num_features()));
  for (int t = plan.steps - 1; t >= 0; --t) {
    for (StateIndex s = 0; s < world.num_states(); ++s) {
      for (int a = 0; a < kNumActions; ++a) {
        const StateIndex next = world.next_state(s, a);
        out[t].row(s) += plan.soft_policy[t](s, a) * (phi.row(next) + out[t + 1].row(next));
      }
    }
  }
  return out;
}

struct Node {
  StateIndex state;
  Vector phi;
  std::vector<int> actions;
  double key;
};

}  // namespace

Trajectory instructive_demo(const GridWorld& world, const DemoObjective& objective,
                            std::size_t search_width) {
  if (search_width < 1) throw InputDomainError("search width must be at least 1");
  if (objective.theta.size() != world.num_features() ||
      objective.target_features.size() != world.num_features()) {
    throw InputDomainError("objective dimension does not match the world's features");
  }
  const int steps = world.config().learning_steps;
  const Matrix& features = world.features().matrix();
  const StateIndex start = world.initial_state();

  if (search_width == kExhaustiveSearch) {
    Vector phi = features.row(start).transpose();
    std::vector<int> actions;
    Candidate best;
    exhaustive(world, objective, steps, start, phi, actions, best);
    return to_trajectory(world, best.actions);
  }

  const Plan plan = value_iteration(world, objective.theta, steps);
  const Completion greedy = greedy_completion(world, plan);
  const Completion soft =
      soft_completion(world, soft_value_iteration(world, objective.theta, objective.lambda, steps));

  // Best complete path seen so far: a beam prefix finished greedily.
  Candidate incumbent;
  auto consider_greedy_finish = [&](const Node& node, int depth, double estimate) {
    if (estimate < incumbent.score - 1e-9) return;
    std::vector<int> actions = node.actions;
    StateIndex s = node.state;
    for (int t = depth; t < steps; ++t) {
      const int a = plan.greedy_policy[t][s];
      actions.push_back(a);
      s = world.next_state(s, a);
    }
    Candidate c{objective.score(to_trajectory(world, actions).feature_sum()), std::move(actions)};
    if (c.better_than(incumbent)) incumbent = std::move(c);
  };

  std::vector<Node> beam{Node{start, features.row(start).transpose(), {}, 0.0}};
  consider_greedy_finish(beam.front(), 0, objective.score(beam.front().phi + greedy[0].row(start).transpose()));

  std::vector<Node> children;
  std::array<int, kNumActions> moves{};
  for (int depth = 0; depth < steps; ++depth) {
    children.clear();
    for (const Node& parent : beam) {
      const int count = distinct_moves(world, parent.state, moves);
      for (int i = 0; i < count; ++i) {
        const StateIndex next = world.next_state(parent.state, moves[i]);
        Node child{next, parent.phi + features.row(next).transpose(), parent.actions, 0.0};
        child.actions.push_back(moves[i]);
        const double via_greedy =
            objective.score(child.phi + greedy[depth + 1].row(next).transpose());
        const double via_soft = objective.score(child.phi + soft[depth + 1].row(next).transpose());
        child.key = std::max(via_greedy, via_soft);
        consider_greedy_finish(child, depth + 1, via_greedy);
        children.push_back(std::move(child));
      }
    }
    auto order = [](const Node& a, const Node& b) {
      if (a.key != b.key) return a.key > b.key;
      return a.actions < b.actions;
    };
    if (children.size() > search_width) {
      std::partial_sort(children.begin(),
                        children.begin() + static_cast<std::ptrdiff_t>(search_width),
                        children.end(), order);
      children.resize(search_width);
    } else {
      std::sort(children.begin(), children.end(), order);
    }
    std::swap(beam, children);
  }

  Candidate best = incumbent;
  for (const Node& node : beam) {
    Candidate c{objective.score(node.phi), node.actions};
    if (c.better_than(best)) best = std::move(c);
  }
  return to_trajectory(world, best.actions);
}

double instructive_pipeline_regret(const GridWorld& world, const Belief& prior, double eta,
                                   std::span<const std::uint64_t> seeds, double lambda,
                                   const CrossValidationOptions& options) {
  if (seeds.empty()) throw InputDomainError("pipeline needs at least one seed");
  double total = 0.0;
  for (std::uint64_t seed : seeds) {
    Rng rng(seed);
    const RewardParams theta = sample_theta(world.num_features(), rng);
    const Trajectory demo =
        instructive_demo(world, make_objective(world, theta, lambda, eta), options.search_width);
    const Belief posterior = update(prior, world, demo, lambda, options.cache);
    total += regret(world, theta, posterior_mean(posterior), world.config().deployment_steps());
  }
  return total / static_cast<double>(seeds.size());
}

double cross_validate_eta(const GridWorld& world, std::span<const double> candidate_etas,
                          std::span<const std::uint64_t> training_seeds, double lambda,
                          const Belief& prior, const CrossValidationOptions& options) {
  if (candidate_etas.empty()) throw InputDomainError("eta candidate list is empty");
  if (candidate_etas.size() == 1) return candidate_etas.front();
  std::vector<double> sorted(candidate_etas.begin(), candidate_etas.end());
  std::sort(sorted.begin(), sorted.end());
  double best_eta = sorted.front();
  double best_regret = std::numeric_limits<double>::infinity();
  for (double eta : sorted) {
    const double r =
        instructive_pipeline_regret(world, prior, eta, training_seeds, lambda, options);
    if (r < best_regret) {
      best_regret = r;
      best_eta = eta;
    }
  }
  return best_eta;
}

}  // namespace cirl
