#include "cirl/equilibrium.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <numeric>

#include "cirl/errors.hpp"

namespace cirl {

namespace {

using Game = PaperclipGame;

double two_round_reward(int human, int robot, double theta) {
  return Game::reward(Game::kHumanActions[human], theta) +
         Game::reward(Game::kRobotActions[robot], theta);
}

nlohmann::json supplies_json(Game::Supplies s) { return {s.paperclips, s.staples}; }

nlohmann::json robot_json(const RobotResponsePolicy& r) {
  nlohmann::json out = nlohmann::json::array();
  for (int m = 0; m < 3; ++m) {
    out.push_back({{"message", supplies_json(Game::kHumanActions[m])},
                   {"observed", r.observed[m]},
                   {"posterior_mean", r.posterior_means[m]},
                   {"response", supplies_json(Game::kRobotActions[r.response[m]])}});
  }
  return out;
}

nlohmann::json interval_json(const std::optional<std::array<double, 2>>& iv) {
  if (!iv) return nullptr;
  return {(*iv)[0], (*iv)[1]};
}

}  // namespace

DiscretizedTheta DiscretizedTheta::uniform(int k) {
  if (k < 3) throw InputDomainError("theta grid needs at least 3 points");
  DiscretizedTheta out;
  out.grid.resize(k);
  for (int i = 0; i < k; ++i) out.grid[i] = static_cast<double>(i) / (k - 1);
  out.prior.assign(k, 1.0 / k);
  return out;
}

double DiscretizedTheta::prior_mean() const {
  double w = 0.0, m = 0.0;
  for (int i = 0; i < size(); ++i) {
    w += prior[i];
    m += prior[i] * grid[i];
  }
  return m / w;
}

HumanMessagePolicy HumanMessagePolicy::expert(const DiscretizedTheta& thetas) {
  HumanMessagePolicy out;
  out.assignment.resize(thetas.grid.size());
  for (int i = 0; i < thetas.size(); ++i) {
    int best = 0;
    for (int h = 1; h < 3; ++h) {
      if (Game::reward(Game::kHumanActions[h], thetas.grid[i]) >
          Game::reward(Game::kHumanActions[best], thetas.grid[i])) {
        best = h;
      }
    }
    out.assignment[i] = static_cast<std::uint8_t>(best);
  }
  return out;
}

HumanMessagePolicy HumanMessagePolicy::thresholds(const DiscretizedTheta& thetas,
                                                  double lower, double upper) {
  HumanMessagePolicy out;
  out.assignment.resize(thetas.grid.size());
  for (int i = 0; i < thetas.size(); ++i) {
    const double t = thetas.grid[i];
    out.assignment[i] = t < lower ? 0 : (t <= upper ? 1 : 2);
  }
  return out;
}

HumanMessagePolicy HumanMessagePolicy::constant(const DiscretizedTheta& thetas, int action) {
  if (action < 0 || action > 2) throw InputDomainError("human action index out of range");
  return HumanMessagePolicy{std::vector<std::uint8_t>(thetas.grid.size(),
                                                      static_cast<std::uint8_t>(action))};
}

RobotResponsePolicy RobotResponsePolicy::constant(int action) {
  if (action < 0 || action > 2) throw InputDomainError("robot action index out of range");
  RobotResponsePolicy out;
  out.response = {action, action, action};
  out.posterior_means = {0.5, 0.5, 0.5};
  return out;
}

int best_robot_action(double theta) {
  int best = 0;
  for (int r = 1; r < 3; ++r) {
    if (Game::reward(Game::kRobotActions[r], theta) >
        Game::reward(Game::kRobotActions[best], theta)) {
      best = r;
    }
  }
  return best;
}

RobotResponsePolicy robot_best_response(const HumanMessagePolicy& pi_h,
                                        const DiscretizedTheta& thetas) {
  if (pi_h.assignment.size() != thetas.grid.size()) {
    throw InputDomainError("human policy does not cover the theta grid");
  }
  std::array<double, 3> mass{}, moment{};
  for (int i = 0; i < thetas.size(); ++i) {
    mass[pi_h.assignment[i]] += thetas.prior[i];
    moment[pi_h.assignment[i]] += thetas.prior[i] * thetas.grid[i];
  }
  RobotResponsePolicy out;
  const double fallback = thetas.prior_mean();
  for (int m = 0; m < 3; ++m) {
    out.observed[m] = mass[m] > 0.0;
    // Unseen messages carry no information: fall back to the prior.
    out.posterior_means[m] = out.observed[m] ? moment[m] / mass[m] : fallback;
    out.response[m] = best_robot_action(out.posterior_means[m]);
  }
  return out;
}

HumanMessagePolicy human_best_response(const RobotResponsePolicy& pi_r,
                                       const DiscretizedTheta& thetas) {
  HumanMessagePolicy out;
  out.assignment.resize(thetas.grid.size());
  for (int i = 0; i < thetas.size(); ++i) {
    const double t = thetas.grid[i];
    int best = 0;
    double best_value = two_round_reward(0, pi_r.response[0], t);
    for (int h = 1; h < 3; ++h) {
      const double v = two_round_reward(h, pi_r.response[h], t);
      if (v > best_value) {
        best_value = v;
        best = h;
      }
    }
    out.assignment[i] = static_cast<std::uint8_t>(best);
  }
  return out;
}

BestResponseResult iterate_best_response(const HumanMessagePolicy& start,
                                         const DiscretizedTheta& thetas, int max_iters) {
  if (max_iters < 1) throw InputDomainError("max_iters must be at least 1");
  BestResponseResult out;
  out.human = start;
  for (int it = 1; it <= max_iters; ++it) {
    out.robot = robot_best_response(out.human, thetas);
    HumanMessagePolicy next = human_best_response(out.robot, thetas);
    out.iterations = it;
    if (next == out.human) {
      out.converged = true;
      return out;
    }
    out.human = std::move(next);
  }
  out.robot = robot_best_response(out.human, thetas);
  return out;
}

double joint_value(const HumanMessagePolicy& pi_h, const RobotResponsePolicy& pi_r,
                   const DiscretizedTheta& thetas) {
  if (pi_h.assignment.size() != thetas.grid.size()) {
    throw InputDomainError("human policy does not cover the theta grid");
  }
  double total = 0.0, mass = 0.0;
  for (int i = 0; i < thetas.size(); ++i) {
    const int h = pi_h.assignment[i];
    total += thetas.prior[i] * two_round_reward(h, pi_r.response[h], thetas.grid[i]);
    mass += thetas.prior[i];
  }
  return total / mass;
}

JointSearchResult exhaustive_joint_search(const DiscretizedTheta& thetas) {
  const int k = thetas.size();
  // Prefix sums of prior mass and first moment: an interval's contribution
  // is affine in both.
  std::vector<double> mass(k + 1, 0.0), moment(k + 1, 0.0);
  for (int i = 0; i < k; ++i) {
    mass[i + 1] = mass[i] + thetas.prior[i];
    moment[i + 1] = moment[i] + thetas.prior[i] * thetas.grid[i];
  }
  auto interval_values = [&](int lo, int hi, std::array<double, 3>& out) {
    const double w = mass[hi] - mass[lo];
    if (!(w > 0.0)) {
      out = {0.0, 0.0, 0.0};
      return;
    }
    const double m = moment[hi] - moment[lo];
    const auto robot = Game::kRobotActions[best_robot_action(m / w)];
    for (int h = 0; h < 3; ++h) {
      const auto human = Game::kHumanActions[h];
      out[h] = (human.paperclips + robot.paperclips) * m +
               (human.staples + robot.staples) * (w - m);
    }
  };

  std::vector<std::array<double, 3>> head(k + 1), tail(k + 1);
  for (int i = 0; i <= k; ++i) {
    interval_values(0, i, head[i]);
    interval_values(i, k, tail[i]);
  }

  std::array<std::array<int, 3>, 6> perms{};
  {
    std::array<int, 3> p = {0, 1, 2};
    int n = 0;
    do {
      perms[n++] = p;
    } while (std::next_permutation(p.begin(), p.end()));
  }

  double best = -std::numeric_limits<double>::infinity();
  int best_lo = 0, best_hi = 0, best_perm = 0;
  std::array<double, 3> mid{};
  for (int lo = 0; lo <= k; ++lo) {
    for (int hi = lo; hi <= k; ++hi) {
      interval_values(lo, hi, mid);
      for (int p = 0; p < 6; ++p) {
        const auto& a = perms[p];
        const double v = head[lo][a[0]] + mid[a[1]] + tail[hi][a[2]];
        if (v > best) {
          best = v;
          best_lo = lo;
          best_hi = hi;
          best_perm = p;
        }
      }
    }
  }

  JointSearchResult out;
  out.lower_cut = best_lo;
  out.upper_cut = best_hi;
  out.interval_actions = perms[best_perm];
  out.human.assignment.resize(k);
  for (int i = 0; i < k; ++i) {
    const int part = i < best_lo ? 0 : (i < best_hi ? 1 : 2);
    out.human.assignment[i] = static_cast<std::uint8_t>(out.interval_actions[part]);
  }
  out.robot = robot_best_response(out.human, thetas);
  out.value = joint_value(out.human, out.robot, thetas);
  return out;
}

std::optional<std::array<double, 2>> action_interval(const HumanMessagePolicy& pi_h,
                                                     const DiscretizedTheta& thetas,
                                                     int action) {
  std::optional<std::array<double, 2>> out;
  for (int i = 0; i < thetas.size(); ++i) {
    if (pi_h.assignment[i] != action) continue;
    if (!out) out = std::array<double, 2>{thetas.grid[i], thetas.grid[i]};
    (*out)[1] = thetas.grid[i];
  }
  return out;
}

bool is_monotone(const HumanMessagePolicy& pi_h) {
  return std::is_sorted(pi_h.assignment.begin(), pi_h.assignment.end());
}

nlohmann::json paperclip_report(int k) {
  const auto started = std::chrono::steady_clock::now();
  const DiscretizedTheta thetas = DiscretizedTheta::uniform(k);
  const HumanMessagePolicy expert = HumanMessagePolicy::expert(thetas);
  const RobotResponsePolicy expert_robot = robot_best_response(expert, thetas);
  const HumanMessagePolicy expert_rebuttal = human_best_response(expert_robot, thetas);
  const BestResponseResult fixpoint = iterate_best_response(expert, thetas, 100);
  const JointSearchResult optimum = exhaustive_joint_search(thetas);
  const double expert_value = joint_value(expert, expert_robot, thetas);
  const double fixpoint_value = joint_value(fixpoint.human, fixpoint.robot, thetas);
  const auto elapsed = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - started)
                           .count();

  return {
      {"grid", k},
      {"analytic_middle_interval", {41.0 / 92.0, 51.0 / 92.0}},
      {"expert",
       {{"middle_interval", interval_json(action_interval(expert, thetas, 1))},
        {"robot", robot_json(expert_robot)},
        {"joint_value", expert_value}}},
      {"fixpoint",
       {{"converged", fixpoint.converged},
        {"iterations", fixpoint.iterations},
        {"middle_interval", interval_json(action_interval(fixpoint.human, thetas, 1))},
        {"monotone", is_monotone(fixpoint.human)},
        {"robot", robot_json(fixpoint.robot)},
        {"joint_value", fixpoint_value}}},
      {"optimum",
       {{"middle_interval", interval_json(action_interval(optimum.human, thetas, 1))},
        {"robot", robot_json(optimum.robot)},
        {"joint_value", optimum.value}}},
      {"expert_violation",
       {{"best_response_to_expert_differs", !(expert_rebuttal == expert)},
        {"rebuttal_middle_interval", interval_json(action_interval(expert_rebuttal, thetas, 1))},
        {"value_gain", fixpoint_value - expert_value}}},
      {"elapsed_ms", elapsed},
  };
}

}  // namespace cirl
