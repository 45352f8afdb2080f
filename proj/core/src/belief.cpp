#include "cirl/belief.hpp"

#include <cmath>
#include <mutex>
#include <span>

#include "cirl/errors.hpp"
#include "cirl/planning.hpp"

namespace cirl {

double LogPartitionCache::get(const RewardParams& theta, double lambda, int steps) {
  Key key{std::vector<double>(theta.theta.data(), theta.theta.data() + theta.size()),
          lambda, steps};
  {
    std::shared_lock lock(mutex_);
    if (auto it = table_.find(key); it != table_.end()) return it->second;
  }
  const double value =
      log_partition(*world_, theta, lambda, steps, world_->initial_state());
  std::unique_lock lock(mutex_);
  table_.emplace(std::move(key), value);
  return value;
}

std::size_t LogPartitionCache::size() const {
  std::shared_lock lock(mutex_);
  return table_.size();
}

Belief::Belief(std::vector<RewardParams> particles) {
  if (particles.empty()) throw InputDomainError("belief needs at least one particle");
  const int n = particles.front().size();
  particles_.resize(static_cast<Eigen::Index>(particles.size()), n);
  for (std::size_t i = 0; i < particles.size(); ++i) {
    if (particles[i].size() != n) {
      throw InputDomainError("belief particles must share one dimension");
    }
    particles_.row(static_cast<Eigen::Index>(i)) = particles[i].theta.transpose();
  }
  log_weights_ = Vector::Constant(particles_.rows(),
                                  -std::log(static_cast<double>(particles_.rows())));
}

Vector Belief::weights() const { return log_weights_.array().exp().matrix(); }

void Belief::add_log_likelihood(const Vector& log_likelihood) {
  if (log_likelihood.size() != log_weights_.size()) {
    throw InputDomainError("likelihood vector does not match the particle count");
  }
  log_weights_ += log_likelihood;
  normalized_ = false;
}

void Belief::normalize() {
  const double z = log_sum_exp(std::span<const double>(log_weights_.data(),
                                                       static_cast<std::size_t>(log_weights_.size())));
  if (!std::isfinite(z)) throw StateError("belief has no finite weight to normalize");
  log_weights_.array() -= z;
  normalized_ = true;
}

Belief init_belief(const GameConfig& config, Rng& rng) {
  if (config.belief_samples < 1) throw InputDomainError("belief_samples must be positive");
  std::vector<RewardParams> particles;
  particles.reserve(static_cast<std::size_t>(config.belief_samples));
  for (int i = 0; i < config.belief_samples; ++i) {
    particles.push_back(sample_theta(config, rng));
  }
  return Belief(std::move(particles));
}

namespace {

Belief condition(const Belief& belief, const GridWorld& world, const Trajectory& tau,
                 double lambda, LogPartitionCache* cache) {
  if (!(lambda >= 0.0)) throw InputDomainError("lambda must be nonnegative");
  if (belief.num_features() != world.num_features()) {
    throw InputDomainError("belief dimension does not match the world's features");
  }
  if (cache && &cache->world() != &world) {
    throw InputDomainError("log-partition cache belongs to a different world");
  }
  // Revalidates the path against the transition model.
  Trajectory checked = Trajectory::from_path(world, tau.states(), tau.actions());
  if (checked.start() != world.initial_state()) {
    throw InputDomainError("demonstration must start at the initial state");
  }
  // λ = 0 makes the likelihood independent of θ.
  if (lambda == 0.0 || tau.length() == 0) return belief;

  const int steps = tau.length();
  Vector loglik = lambda * (belief.particles() * checked.feature_sum());
  for (int i = 0; i < belief.size(); ++i) {
    const RewardParams theta = belief.particle(i);
    loglik[i] -= cache ? cache->get(theta, lambda, steps)
                       : log_partition(world, theta, lambda, steps, world.initial_state());
  }
  Belief out = belief;
  out.add_log_likelihood(loglik);
  out.normalize();
  return out;
}

}  // namespace

Belief update(const Belief& belief, const GridWorld& world, const Trajectory& tau_obs,
              double lambda, LogPartitionCache* cache) {
  if (tau_obs.length() != world.config().learning_steps) {
    throw InputDomainError("demonstration must have exactly learning_steps actions");
  }
  return condition(belief, world, tau_obs, lambda, cache);
}

Belief update_prefix(const Belief& belief, const GridWorld& world, const Trajectory& prefix,
                     double lambda, LogPartitionCache* cache) {
  if (prefix.length() > world.config().learning_steps) {
    throw InputDomainError("prefix is longer than the learning phase");
  }
  return condition(belief, world, prefix, lambda, cache);
}

RewardParams posterior_mean(const Belief& belief) {
  if (!belief.normalized()) throw StateError("posterior_mean needs a normalized belief");
  return RewardParams(belief.particles().transpose() * belief.weights());
}

int map_index(const Belief& belief) {
  if (!belief.normalized()) throw StateError("map_estimate needs a normalized belief");
  const Vector& lw = belief.log_weights();
  int best = 0;
  for (int i = 1; i < lw.size(); ++i) {
    if (lw[i] > lw[best]) best = i;
  }
  return best;
}

RewardParams map_estimate(const Belief& belief) { return belief.particle(map_index(belief)); }

nlohmann::json belief_to_json(const Belief& belief) {
  nlohmann::json particles = nlohmann::json::array();
  for (int i = 0; i < belief.size(); ++i) {
    const Vector row = belief.particles().row(i).transpose();
    particles.push_back(std::vector<double>(row.data(), row.data() + row.size()));
  }
  const Vector w = belief.weights();
  const Vector mean = posterior_mean(belief).theta;
  return {
      {"particles", particles},
      {"weights", std::vector<double>(w.data(), w.data() + w.size())},
      {"posterior_mean", std::vector<double>(mean.data(), mean.data() + mean.size())},
      {"map_index", map_index(belief)},
  };
}

}  // namespace cirl
