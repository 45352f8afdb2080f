#include "cirl/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "cirl/errors.hpp"
#include "cirl/parallel.hpp"
#include "cirl/planning.hpp"

namespace cirl {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string condition_id(DemoPolicy policy, int num_features) {
  return to_string(policy) + "/nf" + std::to_string(num_features);
}

GameConfig level_config(const GameConfig& base, int num_features) {
  GameConfig c = base;
  c.num_features = num_features;
  return c;
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write output file '" + path + "'");
  return out;
}

double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

double standard_error(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
}

nlohmann::json stats_json(const PairedStats& s) {
  return {{"n", s.n},
          {"br_better", s.br_better},
          {"expert_better", s.expert_better},
          {"ties", s.ties},
          {"mean_expert", s.mean_expert},
          {"mean_br", s.mean_br},
          {"mean_difference", s.mean_difference},
          {"t_statistic", s.t_statistic},
          {"t_p_value", s.t_p_value},
          {"sign_p_value", s.sign_p_value}};
}

}  // namespace

std::string to_string(DemoPolicy policy) {
  return policy == DemoPolicy::Expert ? "expert" : "br";
}

DemoPolicy parse_demo_policy(const std::string& label) {
  if (label == "expert") return DemoPolicy::Expert;
  if (label == "br") return DemoPolicy::BestResponse;
  throw InputDomainError("unknown demonstration policy '" + label + "'");
}

void ExperimentSpec::validate() const {
  base.validate();
  if (num_samples < 1) throw InputDomainError("num_samples must be at least 1");
  if (feature_levels.empty()) throw InputDomainError("feature_levels must not be empty");
  if (policies.empty()) throw InputDomainError("policies must not be empty");
  for (int n : feature_levels) {
    if (n < 1) throw InputDomainError("feature levels must be positive");
  }
  if (cv_samples < 1) throw InputDomainError("cv_samples must be at least 1");
  if (eta_candidates.empty()) throw InputDomainError("eta candidate list is empty");
  for (double l : lambda_sweep) {
    if (!(l >= 0.0)) throw InputDomainError("sweep lambdas must be nonnegative");
  }
}

std::uint64_t belief_seed(const GameConfig& config) {
  return derive_seed(config.seed, "belief-particles",
                     static_cast<std::uint64_t>(config.num_features));
}

Belief prior_belief(const GameConfig& config) {
  Rng rng(belief_seed(config));
  return init_belief(config, rng);
}

EpisodeContext::EpisodeContext(GameConfig config, double eta, std::size_t search_width)
    : EpisodeContext(config, eta, prior_belief(config), search_width) {}

EpisodeContext::EpisodeContext(GameConfig config, double eta, Belief prior,
                               std::size_t search_width)
    : world_(std::make_unique<GridWorld>(std::move(config))),
      prior_(std::move(prior)),
      cache_(std::make_unique<LogPartitionCache>(*world_)),
      eta_(eta),
      search_width_(search_width) {
  if (prior_.num_features() != world_->num_features()) {
    throw InputDomainError("prior dimension does not match the world's features");
  }
  if (!(eta_ >= 0.0)) throw InputDomainError("eta must be nonnegative");
}

EpisodeContext::EpisodeContext(GameConfig config, std::vector<Cell> centers, double eta,
                               std::size_t search_width)
    : world_(std::make_unique<GridWorld>(config, std::move(centers))),
      prior_(prior_belief(world_->config())),
      cache_(std::make_unique<LogPartitionCache>(*world_)),
      eta_(eta),
      search_width_(search_width) {
  if (!(eta_ >= 0.0)) throw InputDomainError("eta must be nonnegative");
}

Trajectory demonstrate(const EpisodeContext& ctx, const RewardParams& theta_gt,
                       DemoPolicy policy) {
  if (policy == DemoPolicy::Expert) return expert_demo(ctx.world(), theta_gt);
  return instructive_demo(ctx.world(),
                          make_objective(ctx.world(), theta_gt, ctx.lambda(), ctx.eta()),
                          ctx.search_width());
}

EpisodeOutcome score_demonstration(const EpisodeContext& ctx, const RewardParams& theta_gt,
                                   const Trajectory& demo) {
  Belief posterior = update(ctx.prior(), ctx.world(), demo, ctx.lambda(), &ctx.cache());
  EvalResult eval = evaluate(ctx.world(), theta_gt, posterior_mean(posterior), ctx.lambda());
  return EpisodeOutcome{std::move(eval), demo, std::move(posterior)};
}

EpisodeOutcome run_episode_detailed(const EpisodeContext& ctx, const RewardParams& theta_gt,
                                    DemoPolicy policy) {
  return score_demonstration(ctx, theta_gt, demonstrate(ctx, theta_gt, policy));
}

EvalResult run_episode(const EpisodeContext& ctx, const RewardParams& theta_gt,
                       DemoPolicy policy) {
  return run_episode_detailed(ctx, theta_gt, policy).eval;
}

EvalResult run_episode(const GameConfig& config, const RewardParams& theta_gt,
                       DemoPolicy policy) {
  if (config.eta) return run_episode(EpisodeContext(config, *config.eta), theta_gt, policy);
  EpisodeContext probe(config, 0.0);
  ExperimentSpec spec;
  spec.base = config;
  const double eta = select_eta(spec, probe);
  return run_episode(EpisodeContext(config, eta), theta_gt, policy);
}

std::uint64_t evaluation_seed(std::uint64_t base, int num_features, int index) {
  return derive_seed(base, "eval/nf" + std::to_string(num_features),
                     static_cast<std::uint64_t>(index));
}

std::uint64_t training_seed(std::uint64_t base, int num_features, int index) {
  return derive_seed(base, "train/nf" + std::to_string(num_features),
                     static_cast<std::uint64_t>(index));
}

RewardParams theta_from_seed(int num_features, std::uint64_t seed) {
  Rng rng(seed);
  return sample_theta(num_features, rng);
}

double select_eta(const ExperimentSpec& spec, const EpisodeContext& ctx) {
  if (spec.base.eta) return *spec.base.eta;
  const int nf = ctx.world().num_features();
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < spec.cv_samples; ++i) seeds.push_back(training_seed(spec.base.seed, nf, i));
  CrossValidationOptions options{spec.search_width, &ctx.cache()};
  return cross_validate_eta(ctx.world(), spec.eta_candidates, seeds, ctx.lambda(), ctx.prior(),
                            options);
}

PairedStats paired_comparison(const std::vector<double>& expert, const std::vector<double>& br) {
  if (expert.size() != br.size()) throw InputDomainError("paired samples differ in length");
  PairedStats s;
  s.n = static_cast<int>(expert.size());
  if (s.n == 0) return s;
  std::vector<double> d(expert.size());
  for (std::size_t i = 0; i < expert.size(); ++i) {
    d[i] = expert[i] - br[i];
    if (d[i] > 0.0) {
      ++s.br_better;
    } else if (d[i] < 0.0) {
      ++s.expert_better;
    } else {
      ++s.ties;
    }
  }
  s.mean_expert = mean_of(expert);
  s.mean_br = mean_of(br);
  s.mean_difference = mean_of(d);

  const int trials = s.br_better + s.expert_better;
  if (trials > 0) {
    boost::math::binomial_distribution<double> binom(trials, 0.5);
    s.sign_p_value = s.br_better == 0
                         ? 1.0
                         : boost::math::cdf(boost::math::complement(binom, s.br_better - 1));
  }
  if (s.n >= 2) {
    const double se = standard_error(d);
    if (se > 0.0) {
      s.t_statistic = s.mean_difference / se;
      boost::math::students_t dist(s.n - 1);
      s.t_p_value = boost::math::cdf(boost::math::complement(dist, s.t_statistic));
    } else {
      s.t_statistic = 0.0;
      s.t_p_value = s.mean_difference > 0.0 ? 0.0 : 1.0;
    }
  }
  return s;
}

TwoBumpLayout two_bump_layout() {
  TwoBumpLayout out;
  out.config.num_features = 2;
  out.config.rbf_bandwidth = 1.5;
  out.config.eta = 1.0;
  const int mid = out.config.grid_size / 2;
  out.centers = {{mid, mid - 2}, {mid, mid + 2}};
  out.theta = RewardParams{1.0, 0.98};
  return out;
}

std::string format_record(const RunRecord& r) {
  std::string out;
  out += r.condition + ",";
  out += to_string(r.policy) + ",";
  out += std::to_string(r.num_features) + ",";
  out += fmt_double(r.lambda) + ",";
  out += fmt_double(r.eta) + ",";
  out += std::to_string(r.theta_index) + ",";
  out += std::to_string(r.seed) + ",";
  out += fmt_double(r.regret) + ",";
  out += fmt_double(r.kl) + ",";
  out += fmt_double(r.reward_l2) + ",";
  out += fmt_double(r.wall_ms);
  return out;
}

std::string results_csv(const std::vector<RunRecord>& records) {
  std::string out = std::string(kResultsHeader) + "\n";
  for (const RunRecord& r : records) out += format_record(r) + "\n";
  return out;
}

FactorialResult run_factorial(const ExperimentSpec& spec) {
  spec.validate();
  if (spec.output_path.empty()) throw IoError("experiment needs an output path");
  std::ofstream results = open_for_write(spec.output_path);
  std::ofstream summary_file = open_for_write(spec.output_path + ".summary.json");
  std::ofstream heatmap_file = open_for_write(spec.output_path + ".heatmaps.csv");

  const int levels = static_cast<int>(spec.feature_levels.size());
  const int policies = static_cast<int>(spec.policies.size());
  const int per_level = policies * spec.num_samples;

  std::vector<std::unique_ptr<EpisodeContext>> contexts;
  std::vector<double> etas;
  for (int nf : spec.feature_levels) {
    auto probe = std::make_unique<EpisodeContext>(level_config(spec.base, nf), 0.0,
                                                  spec.search_width);
    const double eta = select_eta(spec, *probe);
    etas.push_back(eta);
    contexts.push_back(std::make_unique<EpisodeContext>(
        level_config(spec.base, nf), eta, probe->prior(), spec.search_width));
  }

  struct Heatmap {
    std::vector<double> gt, map, mean;
  };
  std::vector<RunRecord> records(static_cast<std::size_t>(levels * per_level));
  std::vector<Heatmap> heatmaps(records.size());

  parallel_for(records.size(), spec.workers, [&](std::size_t job) {
    const int level = static_cast<int>(job) / per_level;
    const int rest = static_cast<int>(job) % per_level;
    const DemoPolicy policy = spec.policies[rest / spec.num_samples];
    const int index = rest % spec.num_samples;
    const EpisodeContext& ctx = *contexts[level];
    const int nf = spec.feature_levels[level];
    const std::uint64_t seed = evaluation_seed(spec.base.seed, nf, index);
    const RewardParams theta = theta_from_seed(nf, seed);

    const auto started = std::chrono::steady_clock::now();
    const EpisodeOutcome outcome = run_episode_detailed(ctx, theta, policy);
    const double elapsed = std::chrono::duration<double, std::milli>(
                               std::chrono::steady_clock::now() - started)
                               .count();

    RunRecord& r = records[job];
    r.condition = condition_id(policy, nf);
    r.policy = policy;
    r.num_features = nf;
    r.lambda = ctx.lambda();
    r.eta = ctx.eta();
    r.theta_index = index;
    r.seed = seed;
    r.regret = outcome.eval.regret;
    r.kl = outcome.eval.kl;
    r.reward_l2 = outcome.eval.reward_l2;
    r.wall_ms = spec.record_timing ? elapsed : 0.0;

    if (index < spec.heatmap_samples) {
      const GridWorld& w = ctx.world();
      auto to_std = [](const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
      heatmaps[job] = Heatmap{to_std(w.state_rewards(theta)),
                              to_std(w.state_rewards(map_estimate(outcome.posterior))),
                              to_std(w.state_rewards(outcome.eval.theta_hat))};
    }
  });

  results << results_csv(records);

  heatmap_file << "condition,policy,num_features,theta_index,state,row,col,gt_reward,map_reward,"
                  "mean_reward\n";
  for (std::size_t job = 0; job < records.size(); ++job) {
    const RunRecord& r = records[job];
    if (r.theta_index >= spec.heatmap_samples) continue;
    const int g = spec.base.grid_size;
    for (std::size_t s = 0; s < heatmaps[job].gt.size(); ++s) {
      heatmap_file << r.condition << "," << to_string(r.policy) << "," << r.num_features << ","
                   << r.theta_index << "," << s << "," << s / g << "," << s % g << ","
                   << fmt_double(heatmaps[job].gt[s]) << "," << fmt_double(heatmaps[job].map[s])
                   << "," << fmt_double(heatmaps[job].mean[s]) << "\n";
    }
  }

  nlohmann::json conditions = nlohmann::json::array();
  nlohmann::json paired = nlohmann::json::array();
  for (int level = 0; level < levels; ++level) {
    const int nf = spec.feature_levels[level];
    std::map<DemoPolicy, std::array<std::vector<double>, 3>> measures;
    for (int p = 0; p < policies; ++p) {
      auto& m = measures[spec.policies[p]];
      for (int i = 0; i < spec.num_samples; ++i) {
        const RunRecord& r =
            records[static_cast<std::size_t>(level * per_level + p * spec.num_samples + i)];
        m[0].push_back(r.regret);
        m[1].push_back(r.kl);
        m[2].push_back(r.reward_l2);
      }
      conditions.push_back({{"condition", condition_id(spec.policies[p], nf)},
                            {"policy", to_string(spec.policies[p])},
                            {"num_features", nf},
                            {"lambda", spec.base.lambda},
                            {"eta", etas[level]},
                            {"n", spec.num_samples},
                            {"mean_regret", mean_of(m[0])},
                            {"mean_kl", mean_of(m[1])},
                            {"mean_reward_l2", mean_of(m[2])}});
    }
    if (measures.count(DemoPolicy::Expert) && measures.count(DemoPolicy::BestResponse)) {
      const char* names[3] = {"regret", "kl", "reward_l2"};
      for (int k = 0; k < 3; ++k) {
        nlohmann::json entry = stats_json(paired_comparison(
            measures[DemoPolicy::Expert][k], measures[DemoPolicy::BestResponse][k]));
        entry["num_features"] = nf;
        entry["measure"] = names[k];
        paired.push_back(std::move(entry));
      }
    }
  }

  FactorialResult out;
  out.records = std::move(records);
  out.summary = {{"config", format_game_config(spec.base)},
                 {"num_samples", spec.num_samples},
                 {"cv_samples", spec.cv_samples},
                 {"search_width", spec.search_width},
                 {"conditions", conditions},
                 {"paired", paired}};
  summary_file << out.summary.dump(2) << "\n";
  return out;
}

SweepResult run_lambda_sweep(const ExperimentSpec& spec) {
  spec.validate();
  if (spec.lambda_sweep.empty()) throw InputDomainError("lambda sweep list is empty");
  std::ofstream table;
  std::ofstream summary_file;
  if (!spec.output_path.empty()) {
    table = open_for_write(spec.output_path);
    summary_file = open_for_write(spec.output_path + ".summary.json");
  }

  const int nf = spec.base.num_features;
  std::vector<RewardParams> thetas;
  for (int i = 0; i < spec.num_samples; ++i) {
    thetas.push_back(theta_from_seed(nf, evaluation_seed(spec.base.seed, nf, i)));
  }

  SweepResult out;
  {
    const GridWorld world(spec.base);
    const RewardParams prior_mean = posterior_mean(prior_belief(spec.base));
    for (const RewardParams& theta : thetas) {
      out.prior_mean_regrets.push_back(
          regret(world, theta, prior_mean, spec.base.deployment_steps()));
    }
  }

  for (double lambda : spec.lambda_sweep) {
    GameConfig config = spec.base;
    config.lambda = lambda;
    // The config validator insists on λ > 0; λ = 0 is still a legal sweep point.
    EpisodeContext probe(config.lambda > 0.0 ? config : spec.base, 0.0, spec.search_width);
    SweepRow row;
    row.lambda = lambda;
    if (lambda > 0.0) {
      row.eta = select_eta(spec, probe);
      const EpisodeContext ctx(config, row.eta, probe.prior(), spec.search_width);
      row.regrets.resize(thetas.size());
      parallel_for(thetas.size(), spec.workers, [&](std::size_t i) {
        row.regrets[i] = run_episode(ctx, thetas[i], DemoPolicy::BestResponse).regret;
      });
    } else {
      row.eta = spec.base.eta.value_or(0.0);
      row.regrets = out.prior_mean_regrets;
    }
    row.mean_regret = mean_of(row.regrets);
    row.standard_error = standard_error(row.regrets);
    out.rows.push_back(std::move(row));
  }

  nlohmann::json rows = nlohmann::json::array();
  for (const SweepRow& r : out.rows) {
    rows.push_back({{"lambda", r.lambda},
                    {"eta", r.eta},
                    {"mean_regret", r.mean_regret},
                    {"standard_error", r.standard_error},
                    {"n", r.regrets.size()}});
  }
  out.summary = {{"config", format_game_config(spec.base)},
                 {"num_features", nf},
                 {"num_samples", spec.num_samples},
                 {"prior_mean_regret", mean_of(out.prior_mean_regrets)},
                 {"rows", rows}};
  if (table.is_open()) {
    table << "lambda,eta,mean_regret,standard_error,n\n";
    for (const SweepRow& r : out.rows) {
      table << fmt_double(r.lambda) << "," << fmt_double(r.eta) << ","
            << fmt_double(r.mean_regret) << "," << fmt_double(r.standard_error) << ","
            << r.regrets.size() << "\n";
    }
    summary_file << out.summary.dump(2) << "\n";
  }
  return out;
}

}  // namespace cirl
