#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "cirl/belief.hpp"
#include "cirl/game.hpp"

namespace cirl {

/// Trade-off between demonstrated reward and matching the feature counts the
/// learner expects: score(τ) = φ(τ)ᵀθ − η·‖φ_θ − φ(τ)‖².
struct DemoObjective {
  RewardParams theta;
  Vector target_features;
  double eta = 0.0;
  /// Rationality of the model that induced target_features. Only steers the
  /// search heuristic; the score itself does not depend on it.
  double lambda = 0.0;

  double score(const Vector& phi) const;
};

inline constexpr std::size_t kExhaustiveSearch = std::numeric_limits<std::size_t>::max();
inline constexpr std::size_t kDefaultBeamWidth = 128;

/// Rollout of the finite-horizon optimal plan over the learning phase.
Trajectory expert_demo(const GridWorld& world, const RewardParams& theta);

/// Expected feature counts of the maximum-entropy policy for (θ, λ) over the
/// learning phase, starting from the initial state.
Vector target_features(const GridWorld& world, const RewardParams& theta, double lambda);

DemoObjective make_objective(const GridWorld& world, const RewardParams& theta,
                             double lambda, double eta);

/// Best learning-phase trajectory under the objective. Beam search keeps the
/// `search_width` best prefixes per depth; kExhaustiveSearch enumerates every
/// distinct state path. Ties go to the lexicographically first action
/// sequence in N, S, E, W, no-op order.
Trajectory instructive_demo(const GridWorld& world, const DemoObjective& objective,
                            std::size_t search_width = kDefaultBeamWidth);

inline const std::vector<double> kDefaultEtaCandidates = {0.0, 0.1, 0.3, 1.0, 3.0, 10.0};

struct CrossValidationOptions {
  std::size_t search_width = kDefaultBeamWidth;
  LogPartitionCache* cache = nullptr;
};

/// Mean deployment regret of the instructive pipeline for one η.
double instructive_pipeline_regret(const GridWorld& world, const Belief& prior, double eta,
                                   std::span<const std::uint64_t> seeds, double lambda,
                                   const CrossValidationOptions& options = {});

/// η minimizing the mean regret of the full learning + deployment pipeline
/// over θ drawn from `training_seeds`; ties go to the smallest η.
double cross_validate_eta(const GridWorld& world, std::span<const double> candidate_etas,
                          std::span<const std::uint64_t> training_seeds, double lambda,
                          const Belief& prior, const CrossValidationOptions& options = {});

}  // namespace cirl
