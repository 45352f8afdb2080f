#include "cirl/game.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "cirl/errors.hpp"

namespace cirl {

namespace {

std::string trim(std::string_view s) {
  auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string_view::npos) return {};
  auto end = s.find_last_not_of(" \t\r");
  return std::string(s.substr(begin, end - begin + 1));
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto res = std::from_chars(first, last, out);
  if (res.ec != std::errc{} || res.ptr != last) {
    throw InputDomainError("config: field '" + key + "' has malformed value '" +
                           value + "'");
  }
  return out;
}

}  // namespace

void GameConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw InputDomainError("config: field '" + field + "' " + why);
  };
  if (grid_size < 1) fail("grid_size", "must be positive");
  if (horizon_total < 1) fail("horizon_total", "must be positive");
  if (learning_steps < 1) fail("learning_steps", "must be positive");
  if (learning_steps > horizon_total)
    fail("learning_steps", "must not exceed horizon_total");
  if (num_features < 1) fail("num_features", "must be at least 1");
  if (num_features > grid_size * grid_size)
    fail("num_features", "exceeds the number of grid cells");
  if (!(rbf_bandwidth > 0.0)) fail("rbf_bandwidth", "must be positive");
  if (!(gamma >= 0.0 && gamma <= 1.0)) fail("gamma", "must lie in [0, 1]");
  if (!(lambda > 0.0)) fail("lambda", "must be positive");
  if (eta && !(*eta >= 0.0)) fail("eta", "must be nonnegative");
  if (belief_samples < 1) fail("belief_samples", "must be positive");
}

GameConfig parse_game_config(const std::string& text) {
  GameConfig config;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::string body = trim(line);
    if (body.empty()) continue;
    auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw InputDomainError("config: line " + std::to_string(line_no) +
                             " is not of the form key = value");
    }
    std::string key = trim(std::string_view(body).substr(0, eq));
    std::string value = trim(std::string_view(body).substr(eq + 1));
    if (!seen.insert(key).second) {
      throw InputDomainError("config: field '" + key + "' given twice");
    }
    if (key == "grid_size") {
      config.grid_size = parse_number<int>(key, value);
    } else if (key == "horizon_total") {
      config.horizon_total = parse_number<int>(key, value);
    } else if (key == "learning_steps") {
      config.learning_steps = parse_number<int>(key, value);
    } else if (key == "num_features") {
      config.num_features = parse_number<int>(key, value);
    } else if (key == "rbf_bandwidth") {
      config.rbf_bandwidth = parse_number<double>(key, value);
    } else if (key == "gamma") {
      config.gamma = parse_number<double>(key, value);
    } else if (key == "lambda") {
      config.lambda = parse_number<double>(key, value);
    } else if (key == "eta") {
      if (value == "cross-validate") {
        config.eta.reset();
      } else {
        config.eta = parse_number<double>(key, value);
      }
    } else if (key == "belief_samples") {
      config.belief_samples = parse_number<int>(key, value);
    } else if (key == "seed") {
      config.seed = parse_number<std::uint64_t>(key, value);
    } else {
      throw InputDomainError("config: unknown field '" + key + "'");
    }
  }
  if (seen.count("grid_size") && !seen.count("rbf_bandwidth")) {
    config.rbf_bandwidth = config.grid_size / 4.0;
  }
  config.validate();
  return config;
}

GameConfig load_game_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_game_config(buf.str());
}

std::string format_game_config(const GameConfig& c) {
  std::ostringstream out;
  out.precision(17);
  out << "grid_size = " << c.grid_size << "\n"
      << "horizon_total = " << c.horizon_total << "\n"
      << "learning_steps = " << c.learning_steps << "\n"
      << "num_features = " << c.num_features << "\n"
      << "rbf_bandwidth = " << c.rbf_bandwidth << "\n"
      << "gamma = " << c.gamma << "\n"
      << "lambda = " << c.lambda << "\n";
  if (c.eta) {
    out << "eta = " << *c.eta << "\n";
  } else {
    out << "eta = cross-validate\n";
  }
  out << "belief_samples = " << c.belief_samples << "\n"
      << "seed = " << c.seed << "\n";
  return out.str();
}

RewardParams::RewardParams(std::initializer_list<double> values)
    : theta(static_cast<Eigen::Index>(values.size())) {
  Eigen::Index i = 0;
  for (double v : values) theta[i++] = v;
}

RewardParams sample_theta(int num_features, Rng& rng) {
  Vector theta(num_features);
  for (int k = 0; k < num_features; ++k) theta[k] = uniform_real(rng, -1.0, 1.0);
  return RewardParams(std::move(theta));
}

RewardParams sample_theta(const GameConfig& config, Rng& rng) {
  return sample_theta(config.num_features, rng);
}

char action_symbol(Action a) {
  switch (a) {
    case Action::North: return 'N';
    case Action::South: return 'S';
    case Action::East: return 'E';
    case Action::West: return 'W';
    case Action::Noop: return '0';
  }
  return '?';
}

Action action_from_symbol(char c) {
  switch (std::toupper(static_cast<unsigned char>(c))) {
    case 'N': return Action::North;
    case 'S': return Action::South;
    case 'E': return Action::East;
    case 'W': return Action::West;
    case '0':
    case 'X': return Action::Noop;
  }
  throw InputDomainError(std::string("unknown action symbol '") + c + "'");
}

Action inverse(Action a) {
  switch (a) {
    case Action::North: return Action::South;
    case Action::South: return Action::North;
    case Action::East: return Action::West;
    case Action::West: return Action::East;
    case Action::Noop: return Action::Noop;
  }
  return Action::Noop;
}

FeatureMap::FeatureMap(int grid_size, std::vector<Cell> centers, double bandwidth)
    : centers_(std::move(centers)), bandwidth_(bandwidth) {
  if (centers_.empty()) throw InputDomainError("feature map needs at least one center");
  if (!(bandwidth_ > 0.0)) throw InputDomainError("rbf bandwidth must be positive");
  const int n = grid_size * grid_size;
  matrix_.resize(n, num_features());
  const double inv = 1.0 / (2.0 * bandwidth_ * bandwidth_);
  for (int s = 0; s < n; ++s) {
    const int r = s / grid_size;
    const int c = s % grid_size;
    for (int k = 0; k < num_features(); ++k) {
      const double dr = r - centers_[k].row;
      const double dc = c - centers_[k].col;
      matrix_(s, k) = std::exp(-(dr * dr + dc * dc) * inv);
    }
  }
}

std::vector<Cell> sample_centers(int grid_size, int count, std::uint64_t seed) {
  const int n = grid_size * grid_size;
  if (count < 1 || count > n) {
    throw InputDomainError("cannot place " + std::to_string(count) +
                           " centers on a grid of " + std::to_string(n) + " cells");
  }
  // Partial Fisher-Yates over cell indices.
  std::vector<int> cells(n);
  std::iota(cells.begin(), cells.end(), 0);
  Rng rng(derive_seed(seed, "feature-centers", static_cast<std::uint64_t>(count)));
  std::vector<Cell> centers;
  centers.reserve(count);
  for (int i = 0; i < count; ++i) {
    auto j = i + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(n - i)));
    std::swap(cells[i], cells[j]);
    centers.push_back(Cell{cells[i] / grid_size, cells[i] % grid_size});
  }
  return centers;
}

GridWorld::GridWorld(GameConfig config)
    : GridWorld(config, sample_centers(config.grid_size, config.num_features, config.seed)) {}

GridWorld::GridWorld(GameConfig config, std::vector<Cell> centers)
    : config_(std::move(config)),
      features_(config_.grid_size, std::move(centers), config_.rbf_bandwidth) {
  config_.num_features = features_.num_features();
  config_.validate();
  for (const Cell& c : features_.centers()) {
    if (!contains(c)) throw InputDomainError("feature center lies outside the grid");
  }
  build();
}

void GridWorld::build() {
  const int g = config_.grid_size;
  initial_state_ = index(Cell{g / 2, g / 2});
  successors_.resize(static_cast<std::size_t>(num_states()) * kNumActions);
  for (StateIndex s = 0; s < num_states(); ++s) {
    for (int a = 0; a < kNumActions; ++a) {
      successors_[static_cast<std::size_t>(s) * kNumActions + a] =
          step(s, static_cast<Action>(a));
    }
  }
}

bool GridWorld::contains(Cell c) const {
  return c.row >= 0 && c.col >= 0 && c.row < grid_size() && c.col < grid_size();
}

StateIndex GridWorld::index(Cell c) const {
  if (!contains(c)) {
    throw InputDomainError("cell (" + std::to_string(c.row) + "," +
                           std::to_string(c.col) + ") is outside the grid");
  }
  return c.row * grid_size() + c.col;
}

Cell GridWorld::cell(StateIndex s) const {
  if (s < 0 || s >= num_states()) {
    throw InputDomainError("state index " + std::to_string(s) + " is outside the grid");
  }
  return Cell{s / grid_size(), s % grid_size()};
}

StateIndex GridWorld::step(StateIndex s, Action a) const {
  Cell c = cell(s);
  Cell next = c;
  switch (a) {
    case Action::North: --next.row; break;
    case Action::South: ++next.row; break;
    case Action::East: ++next.col; break;
    case Action::West: --next.col; break;
    case Action::Noop: break;
  }
  return contains(next) ? index(next) : s;
}

Vector GridWorld::state_rewards(const RewardParams& theta) const {
  if (theta.size() != num_features()) {
    throw InputDomainError("theta has " + std::to_string(theta.size()) +
                           " components but the world has " +
                           std::to_string(num_features()) + " features");
  }
  return features_.matrix() * theta.theta;
}

Vector feature_vector(const GridWorld& world, StateIndex state) {
  world.cell(state);  // bounds check
  return world.features().matrix().row(state).transpose();
}

Vector feature_vector(const GridWorld& world, Cell state) {
  return feature_vector(world, world.index(state));
}

double reward(const GridWorld& world, Cell state, const RewardParams& theta) {
  if (theta.size() != world.num_features()) {
    throw InputDomainError("theta length does not match the number of features");
  }
  return feature_vector(world, state).dot(theta.theta);
}

Trajectory Trajectory::rollout(const GridWorld& world, StateIndex start,
                               std::span<const Action> actions) {
  Trajectory tau;
  world.cell(start);
  tau.states_.push_back(start);
  tau.feature_sum_ = feature_vector(world, start);
  for (Action a : actions) tau.extend(world, a);
  return tau;
}

Trajectory Trajectory::from_path(const GridWorld& world, std::vector<StateIndex> states,
                                 std::vector<Action> actions) {
  if (states.empty()) throw InputDomainError("trajectory must contain a state");
  if (actions.size() + 1 != states.size()) {
    throw InputDomainError("trajectory needs exactly one fewer action than states");
  }
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (world.step(states[i], actions[i]) != states[i + 1]) {
      throw InputDomainError("trajectory step " + std::to_string(i) +
                             " is inconsistent with the transition model");
    }
  }
  return rollout(world, states.front(), actions);
}

StateIndex Trajectory::extend(const GridWorld& world, Action a) {
  StateIndex next = world.step(states_.back(), a);
  states_.push_back(next);
  actions_.push_back(a);
  feature_sum_ += world.features().matrix().row(next).transpose();
  return next;
}

std::string Trajectory::action_string() const {
  std::string out;
  out.reserve(actions_.size());
  for (Action a : actions_) out.push_back(action_symbol(a));
  return out;
}

Vector trajectory_features(const Trajectory& tau) { return tau.feature_sum(); }

}  // namespace cirl
