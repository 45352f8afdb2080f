#include "cirl/service.hpp"

#include <algorithm>
#include <cstdio>
#include <mutex>
#include <numeric>
#include <random>

#include "cirl/harness.hpp"
#include "cirl/metrics.hpp"
#include "cirl/planning.hpp"

namespace cirl {

namespace {

using json = nlohmann::json;

constexpr int kTopParticles = 5;

json to_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json heatmap(const GridWorld& world, const RewardParams& theta) {
  return to_json(world.state_rewards(theta));
}

json cell_json(Cell c) { return {c.row, c.col}; }

json path_json(const Trajectory& tau) { return tau.states(); }

template <typename T>
T field(const json& obj, const std::string& key) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw InputDomainError("field '" + key + "' is missing or has the wrong type");
  }
}

Vector vector_from(const json& value, const std::string& name) {
  if (!value.is_array()) throw InputDomainError("field '" + name + "' must be an array");
  Vector out(static_cast<Eigen::Index>(value.size()));
  for (std::size_t i = 0; i < value.size(); ++i) {
    if (!value[i].is_number()) {
      throw InputDomainError("field '" + name + "' must contain only numbers");
    }
    out[static_cast<Eigen::Index>(i)] = value[i].get<double>();
  }
  return out;
}

std::string token_of(const json& body) {
  if (!body.contains("idempotency_token")) return {};
  if (!body["idempotency_token"].is_string()) {
    throw InputDomainError("field 'idempotency_token' must be a string");
  }
  return body["idempotency_token"].get<std::string>();
}

}  // namespace

std::string to_string(Phase phase) {
  switch (phase) {
    case Phase::Learning:
      return "learning";
    case Phase::Deployed:
      return "deployed";
    case Phase::Closed:
      return "closed";
  }
  return "closed";
}

GameConfig apply_overrides(const GameConfig& base, const json& overrides) {
  GameConfig c = base;
  if (overrides.is_null()) return c;
  if (!overrides.is_object()) throw InputDomainError("field 'config' must be an object");
  bool bandwidth_given = false;
  for (const auto& [key, value] : overrides.items()) {
    auto need_int = [&] {
      if (!value.is_number_integer()) {
        throw InputDomainError("config: field '" + key + "' must be an integer");
      }
      return value.get<long long>();
    };
    auto need_real = [&] {
      if (!value.is_number()) throw InputDomainError("config: field '" + key + "' must be a number");
      return value.get<double>();
    };
    if (key == "grid_size") {
      c.grid_size = static_cast<int>(need_int());
    } else if (key == "horizon_total") {
      c.horizon_total = static_cast<int>(need_int());
    } else if (key == "learning_steps") {
      c.learning_steps = static_cast<int>(need_int());
    } else if (key == "num_features") {
      c.num_features = static_cast<int>(need_int());
    } else if (key == "rbf_bandwidth") {
      c.rbf_bandwidth = need_real();
      bandwidth_given = true;
    } else if (key == "gamma") {
      c.gamma = need_real();
    } else if (key == "lambda") {
      c.lambda = need_real();
    } else if (key == "eta") {
      if (value.is_null()) {
        c.eta.reset();
      } else {
        c.eta = need_real();
      }
    } else if (key == "belief_samples") {
      c.belief_samples = static_cast<int>(need_int());
    } else if (key == "seed") {
      if (!value.is_number_unsigned() && !(value.is_number_integer() && value.get<long long>() >= 0)) {
        throw InputDomainError("config: field 'seed' must be a nonnegative integer");
      }
      c.seed = value.get<std::uint64_t>();
    } else {
      throw InputDomainError("config: unknown field '" + key + "'");
    }
  }
  // Same rule as the config file.
  if (overrides.contains("grid_size") && !bandwidth_given) c.rbf_bandwidth = c.grid_size / 4.0;
  c.validate();
  return c;
}

Session::Session(std::string id, GameConfig config, std::optional<std::vector<Cell>> centers,
                 std::optional<RewardParams> theta_gt, std::optional<Belief> prior)
    : id_(std::move(id)),
      world_(centers ? std::make_unique<GridWorld>(config, std::move(*centers))
                     : std::make_unique<GridWorld>(config)),
      theta_gt_(theta_gt ? std::move(*theta_gt)
                         : theta_from_seed(world_->num_features(),
                                           derive_seed(config.seed, "session-theta", 0))),
      prior_(prior ? std::move(*prior) : prior_belief(world_->config())),
      cache_(std::make_unique<LogPartitionCache>(*world_)),
      demo_(Trajectory::rollout(*world_, world_->initial_state(), {})),
      deploy_rng_(derive_seed(config.seed, "deploy-start", 0)) {
  if (theta_gt_.size() != world_->num_features()) {
    throw InputDomainError("field 'theta' must have " + std::to_string(world_->num_features()) +
                           " components");
  }
  if (prior_.num_features() != world_->num_features()) {
    throw InputDomainError("field 'prior_particles' rows must have " +
                           std::to_string(world_->num_features()) + " components");
  }
}

json Session::belief_summary(const Belief& belief, bool preview) const {
  const Vector w = belief.weights();
  std::vector<int> order(static_cast<std::size_t>(belief.size()));
  std::iota(order.begin(), order.end(), 0);
  const int top = std::min(kTopParticles, belief.size());
  std::partial_sort(order.begin(), order.begin() + top, order.end(),
                    [&](int a, int b) { return w[a] > w[b] || (w[a] == w[b] && a < b); });
  json particles = json::array();
  for (int i = 0; i < top; ++i) {
    particles.push_back({{"index", order[i]},
                         {"weight", w[order[i]]},
                         {"theta", to_json(belief.particles().row(order[i]).transpose())}});
  }
  const RewardParams mean = posterior_mean(belief);
  return {{"kind", preview ? "preview" : "committed"},
          {"steps_observed", demo_.length()},
          {"posterior_mean", to_json(mean.theta)},
          {"map_index", map_index(belief)},
          {"mean_heatmap", heatmap(*world_, mean)},
          {"map_heatmap", heatmap(*world_, map_estimate(belief))},
          {"top_particles", particles}};
}

json Session::descriptor() const {
  const GameConfig& c = world_->config();
  json centers = json::array();
  for (Cell cell : world_->features().centers()) centers.push_back(cell_json(cell));
  return {{"session_id", id_},
          {"config", format_game_config(c)},
          {"grid_size", c.grid_size},
          {"learning_steps", c.learning_steps},
          {"deployment_steps", c.deployment_steps()},
          {"lambda", c.lambda},
          {"rbf_bandwidth", world_->features().bandwidth()},
          {"centers", centers},
          {"theta_gt", to_json(theta_gt_.theta)},
          {"truth_heatmap", heatmap(*world_, theta_gt_)},
          {"initial_state", world_->initial_state()},
          {"initial_cell", cell_json(world_->cell(world_->initial_state()))},
          {"phase", to_string(phase_)}};
}

json Session::step(Action a) {
  if (phase_ != Phase::Learning) {
    throw StateError("session is in the " + to_string(phase_) + " phase; steps are closed");
  }
  const StateIndex s = demo_.extend(*world_, a);
  const int total = world_->config().learning_steps;
  const double lambda = world_->config().lambda;

  json report = {{"session_id", id_},
                 {"action", std::string(1, action_symbol(a))},
                 {"state", s},
                 {"cell", cell_json(world_->cell(s))},
                 {"steps_taken", demo_.length()},
                 {"steps_remaining", total - demo_.length()},
                 {"path", path_json(demo_)},
                 {"actions", demo_.action_string()},
                 {"preview", belief_summary(update_prefix(prior_, *world_, demo_, lambda,
                                                          cache_.get()),
                                            true)}};
  if (demo_.length() == total) {
    committed_ = update(prior_, *world_, demo_, lambda, cache_.get());
    phase_ = Phase::Deployed;
    report["committed"] = belief_summary(*committed_, false);
  }
  report["phase"] = to_string(phase_);
  last_step_ = report;
  return report;
}

json Session::deploy(std::optional<StateIndex> start) {
  if (phase_ != Phase::Deployed) {
    throw StateError("deploy needs the deployed phase; session is " + to_string(phase_));
  }
  StateIndex s0;
  if (start) {
    if (*start < 0 || *start >= world_->num_states()) {
      throw InputDomainError("field 'start_state' is outside the grid");
    }
    s0 = *start;
  } else {
    s0 = static_cast<StateIndex>(
        uniform_index(deploy_rng_, static_cast<std::uint64_t>(world_->num_states())));
  }
  const RewardParams theta_hat = posterior_mean(*committed_);
  const EvalResult eval = evaluate(*world_, theta_gt_, theta_hat, world_->config().lambda);
  const int horizon = world_->config().deployment_steps();
  const Trajectory rollout =
      horizon > 0 ? greedy_rollout(*world_, value_iteration(*world_, theta_hat, horizon), s0)
                  : Trajectory::rollout(*world_, s0, {});

  double realized = 0.0, discount = 1.0;
  const Vector r = world_->state_rewards(theta_gt_);
  for (StateIndex s : rollout.states()) {
    realized += discount * r[s];
    discount *= world_->config().gamma;
  }

  deployment_ = {{"session_id", id_},
                 {"start_state", s0},
                 {"start_cell", cell_json(world_->cell(s0))},
                 {"rollout", path_json(rollout)},
                 {"rollout_actions", rollout.action_string()},
                 {"rollout_reward", realized},
                 {"demo_actions", demo_.action_string()},
                 {"theta_hat", to_json(theta_hat.theta)},
                 {"theta_hat_heatmap", heatmap(*world_, theta_hat)},
                 {"regret", eval.regret},
                 {"kl", eval.kl},
                 {"reward_l2", eval.reward_l2}};
  phase_ = Phase::Closed;
  deployment_["phase"] = to_string(phase_);
  return deployment_;
}

json Session::summary() const {
  json out = descriptor();
  out["steps_taken"] = demo_.length();
  out["steps_remaining"] = world_->config().learning_steps - demo_.length();
  out["path"] = path_json(demo_);
  out["actions"] = demo_.action_string();
  out["last_step"] = last_step_;
  out["committed"] = committed_ ? belief_summary(*committed_, false) : json(nullptr);
  out["deployment"] = deployment_;
  return out;
}

SessionManager::SessionManager(GameConfig base) : base_(std::move(base)) { base_.validate(); }

json SessionManager::create(const json& body) {
  if (!body.is_object() && !body.is_null()) throw InputDomainError("request body must be an object");
  const std::string token = body.is_object() ? token_of(body) : std::string();
  if (!token.empty()) {
    std::shared_lock lock(mutex_);
    if (auto it = create_replies_.find(token); it != create_replies_.end()) return it->second;
  }

  const json none = json::object();
  const json& b = body.is_object() ? body : none;
  GameConfig config = apply_overrides(base_, b.value("config", json()));

  std::optional<std::vector<Cell>> centers;
  if (b.contains("centers")) {
    const json& cs = b["centers"];
    if (!cs.is_array()) throw InputDomainError("field 'centers' must be an array of [row, col]");
    centers.emplace();
    for (const json& c : cs) {
      if (!c.is_array() || c.size() != 2 || !c[0].is_number_integer() || !c[1].is_number_integer()) {
        throw InputDomainError("field 'centers' must be an array of [row, col]");
      }
      centers->push_back(Cell{c[0].get<int>(), c[1].get<int>()});
    }
    config.num_features = static_cast<int>(centers->size());
    config.validate();
  }
  std::optional<RewardParams> theta;
  if (b.contains("theta")) theta = RewardParams(vector_from(b["theta"], "theta"));
  std::optional<Belief> prior;
  if (b.contains("prior_particles")) {
    const json& ps = b["prior_particles"];
    if (!ps.is_array() || ps.empty()) {
      throw InputDomainError("field 'prior_particles' must be a non-empty array");
    }
    std::vector<RewardParams> particles;
    for (const json& p : ps) particles.emplace_back(vector_from(p, "prior_particles"));
    for (const RewardParams& p : particles) {
      if (p.size() != particles.front().size()) {
        throw InputDomainError("field 'prior_particles' rows differ in length");
      }
    }
    prior.emplace(std::move(particles));
  }

  std::unique_lock lock(mutex_);
  if (!token.empty()) {
    if (auto it = create_replies_.find(token); it != create_replies_.end()) return it->second;
  }
  char id[24];
  std::snprintf(id, sizeof id, "%016llx",
                static_cast<unsigned long long>(derive_seed(counter_++, "session-id", 0)));
  auto entry = std::make_shared<Entry>();
  entry->session = std::make_unique<Session>(id, config, std::move(centers), std::move(theta),
                                             std::move(prior));
  json reply = entry->session->descriptor();
  sessions_[id] = std::move(entry);
  if (!token.empty()) create_replies_[token] = reply;
  return reply;
}

std::shared_ptr<SessionManager::Entry> SessionManager::find(const std::string& id) const {
  std::shared_lock lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw SessionNotFound("no session with id '" + id + "'");
  return it->second;
}

json SessionManager::step(const std::string& id, const json& body) {
  auto entry = find(id);
  if (!body.is_object()) throw InputDomainError("request body must be an object");
  const std::string token = token_of(body);
  std::unique_lock lock(entry->mutex);
  if (!token.empty()) {
    if (auto it = entry->replies.find(token); it != entry->replies.end()) return it->second;
  }
  const std::string symbol = field<std::string>(body, "action");
  if (symbol.size() != 1) throw InputDomainError("field 'action' must be one of N, S, E, W, 0");
  Action a;
  try {
    a = action_from_symbol(symbol[0]);
  } catch (const InputDomainError&) {
    throw InputDomainError("field 'action' must be one of N, S, E, W, 0");
  }
  json reply = entry->session->step(a);
  if (!token.empty()) entry->replies[token] = reply;
  return reply;
}

json SessionManager::deploy(const std::string& id, const json& body) {
  auto entry = find(id);
  if (!body.is_object() && !body.is_null()) throw InputDomainError("request body must be an object");
  const json none = json::object();
  const json& b = body.is_object() ? body : none;
  const std::string token = token_of(b);
  std::unique_lock lock(entry->mutex);
  if (!token.empty()) {
    if (auto it = entry->replies.find(token); it != entry->replies.end()) return it->second;
  }
  std::optional<StateIndex> start;
  if (b.contains("start_state")) start = field<int>(b, "start_state");
  json reply = entry->session->deploy(start);
  if (!token.empty()) entry->replies[token] = reply;
  return reply;
}

json SessionManager::get(const std::string& id) const {
  auto entry = find(id);
  std::shared_lock lock(entry->mutex);
  return entry->session->summary();
}

std::size_t SessionManager::size() const {
  std::shared_lock lock(mutex_);
  return sessions_.size();
}

}  // namespace cirl
