#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cirl/belief.hpp"
#include "cirl/demonstrators.hpp"
#include "cirl/game.hpp"
#include "cirl/metrics.hpp"

namespace cirl {

enum class DemoPolicy { Expert, BestResponse };

/// "expert" or "br".
std::string to_string(DemoPolicy policy);
DemoPolicy parse_demo_policy(const std::string& label);

struct ExperimentSpec {
  GameConfig base;
  std::vector<DemoPolicy> policies = {DemoPolicy::Expert, DemoPolicy::BestResponse};
  std::vector<int> feature_levels = {3, 10};
  int num_samples = 100;
  std::vector<double> lambda_sweep;
  std::string output_path;

  /// θ draws used to select η when base.eta asks for cross-validation.
  int cv_samples = 20;
  std::vector<double> eta_candidates = kDefaultEtaCandidates;
  std::size_t search_width = kDefaultBeamWidth;
  /// 0 means one worker per hardware thread.
  int workers = 0;
  /// When false the wall_ms column is written as 0 so repeated runs are
  /// byte-identical.
  bool record_timing = true;
  /// θ indices per condition whose reward heatmaps are dumped.
  int heatmap_samples = 1;

  void validate() const;
};

/// Everything an episode needs that does not depend on θ_GT: the world, the
/// robot's prior particles, a shared partition-function cache, and η.
class EpisodeContext {
 public:
  EpisodeContext(GameConfig config, double eta,
                 std::size_t search_width = kDefaultBeamWidth);
  EpisodeContext(GameConfig config, double eta, Belief prior,
                 std::size_t search_width = kDefaultBeamWidth);
  /// Explicit feature centers instead of seeded ones.
  EpisodeContext(GameConfig config, std::vector<Cell> centers, double eta,
                 std::size_t search_width = kDefaultBeamWidth);

  const GridWorld& world() const { return *world_; }
  const Belief& prior() const { return prior_; }
  LogPartitionCache& cache() const { return *cache_; }
  double eta() const { return eta_; }
  double lambda() const { return world_->config().lambda; }
  std::size_t search_width() const { return search_width_; }

 private:
  std::unique_ptr<GridWorld> world_;
  Belief prior_;
  std::unique_ptr<LogPartitionCache> cache_;
  double eta_;
  std::size_t search_width_;
};

/// Seed for the robot's prior particles under a given config.
std::uint64_t belief_seed(const GameConfig& config);
Belief prior_belief(const GameConfig& config);

struct EpisodeOutcome {
  EvalResult eval;
  Trajectory demo;
  Belief posterior;
};

Trajectory demonstrate(const EpisodeContext& ctx, const RewardParams& theta_gt,
                       DemoPolicy policy);
/// Scores a given demonstration: belief update, posterior mean, metrics.
EpisodeOutcome score_demonstration(const EpisodeContext& ctx, const RewardParams& theta_gt,
                                   const Trajectory& demo);
EpisodeOutcome run_episode_detailed(const EpisodeContext& ctx, const RewardParams& theta_gt,
                                    DemoPolicy policy);
EvalResult run_episode(const EpisodeContext& ctx, const RewardParams& theta_gt,
                       DemoPolicy policy);
/// Builds a fresh context from the config; η is cross-validated when the
/// config asks for it.
EvalResult run_episode(const GameConfig& config, const RewardParams& theta_gt,
                       DemoPolicy policy);

struct RunRecord {
  std::string condition;
  DemoPolicy policy = DemoPolicy::Expert;
  int num_features = 0;
  double lambda = 0.0;
  double eta = 0.0;
  int theta_index = 0;
  std::uint64_t seed = 0;
  double regret = 0.0;
  double kl = 0.0;
  double reward_l2 = 0.0;
  double wall_ms = 0.0;
};

inline constexpr const char* kResultsHeader =
    "condition,policy,num_features,lambda,eta,theta_index,seed,regret,kl,reward_l2,wall_ms";

/// Seeds for evaluation θ and for η selection come from disjoint labels.
std::uint64_t evaluation_seed(std::uint64_t base, int num_features, int index);
std::uint64_t training_seed(std::uint64_t base, int num_features, int index);
RewardParams theta_from_seed(int num_features, std::uint64_t seed);

/// η from the config, or cross-validated on training seeds.
double select_eta(const ExperimentSpec& spec, const EpisodeContext& ctx);

struct PairedStats {
  int n = 0;
  int br_better = 0;
  int expert_better = 0;
  int ties = 0;
  double mean_expert = 0.0;
  double mean_br = 0.0;
  double mean_difference = 0.0;  // expert − br
  double t_statistic = 0.0;
  double t_p_value = 1.0;        // one-sided, H1: br lower
  double sign_p_value = 1.0;     // one-sided, H1: br lower
};

/// Paired one-sided comparison where lower values are better.
PairedStats paired_comparison(const std::vector<double>& expert, const std::vector<double>& br);

struct FactorialResult {
  std::vector<RunRecord> records;
  nlohmann::json summary;
};

/// Full policy × feature-level design. Writes the results table to
/// spec.output_path, the summary next to it (`.summary.json`) and the
/// heatmap dump (`.heatmaps.csv`). The output path is checked for
/// writability before any computation.
FactorialResult run_factorial(const ExperimentSpec& spec);

struct SweepRow {
  double lambda = 0.0;
  double eta = 0.0;
  double mean_regret = 0.0;
  double standard_error = 0.0;
  std::vector<double> regrets;  // per shared θ sample
};

struct SweepResult {
  std::vector<SweepRow> rows;
  /// Regret of deploying the prior mean, per θ sample.
  std::vector<double> prior_mean_regrets;
  nlohmann::json summary;
};

/// Mean regret of the instructive pipeline for each λ over one shared set of
/// θ samples, at the base config's feature count. λ drives inference, the
/// demonstrator's target features, and KL alike.
SweepResult run_lambda_sweep(const ExperimentSpec& spec);

/// Two reward bumps either side of the start cell, the west one slightly
/// higher. An expert walks to it and stays; a teacher has reason to show
/// both.
struct TwoBumpLayout {
  GameConfig config;
  std::vector<Cell> centers;
  RewardParams theta;
};
TwoBumpLayout two_bump_layout();

std::string format_record(const RunRecord& record);
std::string results_csv(const std::vector<RunRecord>& records);

}  // namespace cirl
