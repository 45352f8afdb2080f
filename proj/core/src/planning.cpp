#include "cirl/planning.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "cirl/errors.hpp"

namespace cirl {

namespace {

void require_steps(int steps) {
  if (steps < 1) throw InputDomainError("planning horizon must be at least one step");
}

}  // namespace

double log_sum_exp(std::span<const double> xs) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double x : xs) hi = std::max(hi, x);
  if (!std::isfinite(hi)) return hi;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - hi);
  return hi + std::log(acc);
}

Plan value_iteration(const GridWorld& world, const RewardParams& theta, int steps) {
  require_steps(steps);
  const Vector r = world.state_rewards(theta);
  const double gamma = world.config().gamma;
  const int n = world.num_states();

  Plan plan;
  plan.steps = steps;
  plan.values.assign(steps + 1, Vector());
  plan.q_values.assign(steps, Matrix());
  plan.greedy_policy.assign(steps, std::vector<int>(n, 0));
  plan.values[steps] = r;

  for (int t = steps - 1; t >= 0; --t) {
    const Vector& next = plan.values[t + 1];
    Matrix& q = plan.q_values[t];
    q.resize(n, kNumActions);
    Vector& v = plan.values[t];
    v.resize(n);
    for (StateIndex s = 0; s < n; ++s) {
      int best = 0;
      for (int a = 0; a < kNumActions; ++a) {
        q(s, a) = r[s] + gamma * next[world.next_state(s, a)];
        if (q(s, a) > q(s, best)) best = a;
      }
      plan.greedy_policy[t][s] = best;
      v[s] = q(s, best);
    }
  }
  return plan;
}

SoftPlan soft_value_iteration(const GridWorld& world, const RewardParams& theta,
                              double lambda, int steps) {
  require_steps(steps);
  if (!(lambda >= 0.0)) throw InputDomainError("lambda must be nonnegative");
  const Vector r = lambda * world.state_rewards(theta);
  const int n = world.num_states();

  SoftPlan plan;
  plan.steps = steps;
  plan.lambda = lambda;
  plan.soft_values.assign(steps + 1, Vector());
  plan.soft_policy.assign(steps, Matrix());
  plan.soft_values[steps] = r;

  std::array<double, kNumActions> cont{};
  for (int t = steps - 1; t >= 0; --t) {
    const Vector& next = plan.soft_values[t + 1];
    Vector& v = plan.soft_values[t];
    Matrix& pi = plan.soft_policy[t];
    v.resize(n);
    pi.resize(n, kNumActions);
    for (StateIndex s = 0; s < n; ++s) {
      for (int a = 0; a < kNumActions; ++a) cont[a] = next[world.next_state(s, a)];
      const double lse = log_sum_exp(cont);
      v[s] = r[s] + lse;
      for (int a = 0; a < kNumActions; ++a) pi(s, a) = std::exp(cont[a] - lse);
    }
  }
  plan.log_partition = plan.soft_values[0][world.initial_state()];
  return plan;
}

double log_partition(const GridWorld& world, const RewardParams& theta, double lambda,
                     int steps, StateIndex start) {
  require_steps(steps);
  if (!(lambda >= 0.0)) throw InputDomainError("lambda must be nonnegative");
  world.cell(start);
  const Vector r = lambda * world.state_rewards(theta);
  const int n = world.num_states();
  Vector next = r;
  Vector cur(n);
  std::array<double, kNumActions> cont{};
  for (int t = steps - 1; t >= 0; --t) {
    for (StateIndex s = 0; s < n; ++s) {
      for (int a = 0; a < kNumActions; ++a) cont[a] = next[world.next_state(s, a)];
      cur[s] = r[s] + log_sum_exp(cont);
    }
    std::swap(cur, next);
  }
  return next[start];
}

Occupancy occupancy_and_features(const GridWorld& world, const StochasticPolicy& policy,
                                 StateIndex start_state, int steps) {
  require_steps(steps);
  world.cell(start_state);
  const int n = world.num_states();
  if (static_cast<int>(policy.size()) < steps) {
    throw InputDomainError("policy covers fewer timesteps than requested");
  }
  for (int t = 0; t < steps; ++t) {
    const Matrix& pi = policy[t];
    if (pi.rows() != n || pi.cols() != kNumActions) {
      throw InputDomainError("policy layer " + std::to_string(t) + " has the wrong shape");
    }
    for (StateIndex s = 0; s < n; ++s) {
      const double total = pi.row(s).sum();
      if (std::abs(total - 1.0) > 1e-9 || pi.row(s).minCoeff() < 0.0) {
        throw InputDomainError("policy row (t=" + std::to_string(t) + ", s=" +
                               std::to_string(s) + ") is not a distribution");
      }
    }
  }

  Occupancy occ;
  occ.visitation.assign(steps + 1, Vector::Zero(n));
  occ.visitation[0][start_state] = 1.0;
  for (int t = 0; t < steps; ++t) {
    const Vector& d = occ.visitation[t];
    Vector& out = occ.visitation[t + 1];
    for (StateIndex s = 0; s < n; ++s) {
      if (d[s] == 0.0) continue;
      for (int a = 0; a < kNumActions; ++a) {
        out[world.next_state(s, a)] += d[s] * policy[t](s, a);
      }
    }
  }
  Vector total = Vector::Zero(n);
  for (const Vector& d : occ.visitation) total += d;
  occ.expected_features = world.features().matrix().transpose() * total;
  return occ;
}

Vector evaluate_policy(const GridWorld& world, const RewardParams& theta,
                       const DeterministicPolicy& policy, int steps) {
  require_steps(steps);
  if (static_cast<int>(policy.size()) < steps) {
    throw InputDomainError("policy covers fewer timesteps than requested");
  }
  const Vector r = world.state_rewards(theta);
  const double gamma = world.config().gamma;
  const int n = world.num_states();
  Vector next = r;
  Vector cur(n);
  for (int t = steps - 1; t >= 0; --t) {
    for (StateIndex s = 0; s < n; ++s) {
      cur[s] = r[s] + gamma * next[world.next_state(s, policy[t][s])];
    }
    std::swap(cur, next);
  }
  return next;
}

StochasticPolicy to_stochastic(const DeterministicPolicy& policy, int num_states) {
  StochasticPolicy out;
  out.reserve(policy.size());
  for (const auto& layer : policy) {
    Matrix m = Matrix::Zero(num_states, kNumActions);
    for (int s = 0; s < num_states; ++s) m(s, layer[s]) = 1.0;
    out.push_back(std::move(m));
  }
  return out;
}

Trajectory greedy_rollout(const GridWorld& world, const Plan& plan, StateIndex start) {
  std::vector<Action> actions;
  actions.reserve(plan.steps);
  StateIndex s = start;
  for (int t = 0; t < plan.steps; ++t) {
    const int a = plan.greedy_policy[t][s];
    actions.push_back(static_cast<Action>(a));
    s = world.next_state(s, a);
  }
  return Trajectory::rollout(world, start, actions);
}

}  // namespace cirl
