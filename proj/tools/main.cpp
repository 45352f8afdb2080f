// Command-line entry point: experiments, the paperclip equilibrium, and the
// teaching-session server.

#include <CLI11.hpp>

#include <csignal>
#include <iostream>

#include "cirl/equilibrium.hpp"
#include "cirl/errors.hpp"
#include "cirl/harness.hpp"
#include "cirl/http_server.hpp"

namespace {

cirl::HttpServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperative inverse reinforcement learning toolkit"};
  app.require_subcommand(1);

  auto* experiment = app.add_subcommand("experiment", "Gridworld teaching experiments");
  experiment->require_subcommand(1);

  std::string config_path;
  int samples = 0;
  int workers = 0;
  std::string out_path = "results.csv";
  bool no_timing = false;
  auto* run = experiment->add_subcommand("run", "Expert vs instructive demonstration factorial");
  run->add_option("--config", config_path, "Game config file")->required()->check(CLI::ExistingFile);
  run->add_option("--samples", samples, "Evaluation θ samples per condition (default 100)")
      ->check(CLI::PositiveNumber);
  run->add_option("--out", out_path, "Results table path")->capture_default_str();
  run->add_option("--workers", workers, "Worker threads, 0 = all cores");
  run->add_flag("--no-timing", no_timing, "Write wall_ms as 0 for byte-identical reruns");

  std::vector<double> lambdas;
  std::string sweep_out;
  int sweep_samples = 50;
  auto* sweep = experiment->add_subcommand("lambda-sweep", "Instructive-pipeline regret per λ");
  sweep->add_option("--config", config_path, "Game config file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--lambdas", lambdas, "Comma-separated λ values")->required()->delimiter(',');
  sweep->add_option("--samples", sweep_samples, "Shared θ samples")->capture_default_str()->check(CLI::PositiveNumber);
  sweep->add_option("--out", sweep_out, "Optional table path");
  sweep->add_option("--workers", workers, "Worker threads, 0 = all cores");

  auto* equilibrium = app.add_subcommand("equilibrium", "Apprenticeship game equilibria");
  equilibrium->require_subcommand(1);
  int grid = 10001;
  auto* paperclip = equilibrium->add_subcommand("paperclip", "Paperclip/staple game thresholds");
  paperclip->add_option("--grid", grid, "θ grid size")->capture_default_str()->check(CLI::Range(3, 100000000));

  int port = 8080;
  std::string host = "127.0.0.1";
  std::string serve_config;
  auto* serve = app.add_subcommand("serve", "Run the teaching-session HTTP service");
  serve->add_option("--port", port, "TCP port")->capture_default_str()->check(CLI::Range(0, 65535));
  serve->add_option("--host", host, "Bind address")->capture_default_str();
  serve->add_option("--config", serve_config, "Base config for new sessions")
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      cirl::ExperimentSpec spec;
      spec.base = cirl::load_game_config(config_path);
      if (samples > 0) spec.num_samples = samples;
      spec.output_path = out_path;
      spec.workers = workers;
      spec.record_timing = !no_timing;
      const auto result = cirl::run_factorial(spec);
      std::cout << result.summary.dump(2) << "\n";
    } else if (sweep->parsed()) {
      cirl::ExperimentSpec spec;
      spec.base = cirl::load_game_config(config_path);
      spec.num_samples = sweep_samples;
      spec.lambda_sweep = lambdas;
      spec.output_path = sweep_out;
      spec.workers = workers;
      const auto result = cirl::run_lambda_sweep(spec);
      std::cout << result.summary.dump(2) << "\n";
    } else if (paperclip->parsed()) {
      std::cout << cirl::paperclip_report(grid).dump(2) << "\n";
    } else if (serve->parsed()) {
      cirl::GameConfig base;
      if (!serve_config.empty()) base = cirl::load_game_config(serve_config);
      cirl::SessionManager sessions(base);
      cirl::HttpServer server(sessions);
      const int bound = server.bind(host, port);
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "listening on http://" << host << ":" << bound << "\n";
      server.listen();
      g_server = nullptr;
    }
  } catch (const cirl::InputDomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
