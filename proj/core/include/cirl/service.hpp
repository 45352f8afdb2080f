#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cirl/belief.hpp"
#include "cirl/errors.hpp"
#include "cirl/game.hpp"

namespace cirl {

/// Unknown session id. A StateError so callers that only distinguish
/// input from state problems still classify it correctly.
class SessionNotFound : public StateError {
 public:
  using StateError::StateError;
};

enum class Phase { Learning, Deployed, Closed };
std::string to_string(Phase phase);

/// Copies `base` and applies a JSON object of config fields on top. Field
/// names match the config file; unknown names and wrong types are rejected
/// with the field named in the message.
GameConfig apply_overrides(const GameConfig& base, const nlohmann::json& overrides);

/// One human teaching session. Not thread-safe on its own; SessionManager
/// serializes access.
class Session {
 public:
  Session(std::string id, GameConfig config, std::optional<std::vector<Cell>> centers,
          std::optional<RewardParams> theta_gt, std::optional<Belief> prior);

  const std::string& id() const { return id_; }
  const GridWorld& world() const { return *world_; }
  const RewardParams& theta_gt() const { return theta_gt_; }
  const Trajectory& demo() const { return demo_; }
  Phase phase() const { return phase_; }
  const Belief& prior() const { return prior_; }
  /// Set once the demonstration is complete.
  const std::optional<Belief>& committed() const { return committed_; }

  nlohmann::json descriptor() const;
  nlohmann::json step(Action a);
  /// Start state drawn from the session's own stream unless given.
  nlohmann::json deploy(std::optional<StateIndex> start = std::nullopt);
  nlohmann::json summary() const;

 private:
  nlohmann::json belief_summary(const Belief& belief, bool preview) const;

  std::string id_;
  std::unique_ptr<GridWorld> world_;
  RewardParams theta_gt_;
  Belief prior_;
  std::unique_ptr<LogPartitionCache> cache_;
  Trajectory demo_;
  Phase phase_ = Phase::Learning;
  std::optional<Belief> committed_;
  Rng deploy_rng_;
  nlohmann::json last_step_;
  nlohmann::json deployment_;
};

/// Session table plus idempotent request handling. All methods take and
/// return JSON documents and are safe to call concurrently.
class SessionManager {
 public:
  explicit SessionManager(GameConfig base = {});

  /// Body fields, all optional: config (object of overrides), theta,
  /// centers ([[row, col], ...]), prior_particles ([[...], ...]),
  /// idempotency_token.
  nlohmann::json create(const nlohmann::json& body);
  /// Body: {"action": "N"|"S"|"E"|"W"|"0", "idempotency_token"?}.
  nlohmann::json step(const std::string& id, const nlohmann::json& body);
  /// Body: {"start_state"?, "idempotency_token"?}.
  nlohmann::json deploy(const std::string& id, const nlohmann::json& body);
  nlohmann::json get(const std::string& id) const;
  std::size_t size() const;

 private:
  struct Entry {
    mutable std::shared_mutex mutex;
    std::unique_ptr<Session> session;
    std::map<std::string, nlohmann::json> replies;  // idempotency token → reply
  };
  std::shared_ptr<Entry> find(const std::string& id) const;

  GameConfig base_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::map<std::string, nlohmann::json> create_replies_;
  std::uint64_t counter_ = 0;
};

}  // namespace cirl
