#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "cirl/game.hpp"

namespace cirl {

/// K equally spaced points on [0, 1] with a uniform prior.
struct DiscretizedTheta {
  std::vector<double> grid;
  std::vector<double> prior;

  static DiscretizedTheta uniform(int k);
  int size() const { return static_cast<int>(grid.size()); }
  double prior_mean() const;
};

/// Human's learning-phase message: an index into PaperclipGame::kHumanActions
/// for every grid point.
struct HumanMessagePolicy {
  std::vector<std::uint8_t> assignment;
  bool operator==(const HumanMessagePolicy&) const = default;

  /// Greedy immediate-reward policy; ties resolve to the first listed action.
  static HumanMessagePolicy expert(const DiscretizedTheta& thetas);
  /// (0,2) below `lower`, (1,1) on [lower, upper], (2,0) above.
  static HumanMessagePolicy thresholds(const DiscretizedTheta& thetas, double lower,
                                       double upper);
  static HumanMessagePolicy constant(const DiscretizedTheta& thetas, int action);
};

/// Robot's deployment action for each possible human message.
struct RobotResponsePolicy {
  std::array<int, 3> response{};
  std::array<double, 3> posterior_means{};
  std::array<bool, 3> observed{};
  bool operator==(const RobotResponsePolicy&) const = default;

  static RobotResponsePolicy constant(int action);
};

/// Index of the robot action with the highest reward at θ; ties → first.
int best_robot_action(double theta);

RobotResponsePolicy robot_best_response(const HumanMessagePolicy& pi_h,
                                        const DiscretizedTheta& thetas);
HumanMessagePolicy human_best_response(const RobotResponsePolicy& pi_r,
                                       const DiscretizedTheta& thetas);

struct BestResponseResult {
  HumanMessagePolicy human;
  RobotResponsePolicy robot;
  int iterations = 0;
  bool converged = false;
};

/// Alternates robot and human best responses until the human policy stops
/// changing or max_iters rounds have run.
BestResponseResult iterate_best_response(const HumanMessagePolicy& start,
                                         const DiscretizedTheta& thetas, int max_iters);

/// Prior-weighted mean of the two-round reward (no discount).
double joint_value(const HumanMessagePolicy& pi_h, const RobotResponsePolicy& pi_r,
                   const DiscretizedTheta& thetas);

struct JointSearchResult {
  HumanMessagePolicy human;
  RobotResponsePolicy robot;
  double value = 0.0;
  int lower_cut = 0;   // first grid index of the middle interval
  int upper_cut = 0;   // one past its last index
  std::array<int, 3> interval_actions{};
};

/// Best policy pair among human policies that split the grid into three
/// contiguous intervals mapped to distinct human actions, each paired with
/// its robot best response.
JointSearchResult exhaustive_joint_search(const DiscretizedTheta& thetas);

/// Grid points on which pi_h plays `action`, as [first, last] θ values.
std::optional<std::array<double, 2>> action_interval(const HumanMessagePolicy& pi_h,
                                                     const DiscretizedTheta& thetas,
                                                     int action);

/// Monotone: the action index never decreases along the grid.
bool is_monotone(const HumanMessagePolicy& pi_h);

/// Thresholds, joint values, and the expert-violation witness for a grid of
/// size k, as a structured document.
nlohmann::json paperclip_report(int k);

}  // namespace cirl
