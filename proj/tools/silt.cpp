// silt: command-line front end.
//
//   silt simulate|solve-discrete|solve-continuum|embed|scaling|verify [options]
//
// Exit codes: 0 success, 2 invalid configuration, 3 failed verification,
// 1 anything else.

#include <cstdio>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "silt/experiment.hpp"

namespace {

constexpr int kValidationError = 2;
constexpr int kVerificationFailure = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Self-intersection local times: simulation, variational solvers, embeddings"};
  app.set_version_flag("--version", std::string(silt::code_version()));

  std::string command;
  std::string config_path;
  std::optional<int> d, R, replicas;
  std::optional<double> p, theta, t;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out, format;
  bool force = false;

  app.add_option("command", command, "simulate, solve-discrete, solve-continuum, embed, scaling or verify")
      ->required();
  app.add_option("--config", config_path, "key=value config file; flags override it");
  app.add_option("--d", d, "lattice dimension");
  app.add_option("--p", p, "norm exponent");
  app.add_option("--theta", theta, "tilt parameter");
  app.add_option("--R", R, "box radius");
  app.add_option("--t", t, "time horizon (step count for the discrete clock)");
  app.add_option("--replicas", replicas, "Monte Carlo replicas");
  app.add_option("--seed", seed, "master seed");
  app.add_option("--out", out, "output path; stdout when absent");
  app.add_option("--format", format, "csv or json");
  app.add_flag("--force", force, "overwrite existing output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kValidationError;
  }

  silt::ResultSet rs;
  silt::ExperimentConfig cfg;
  try {
    if (!config_path.empty()) cfg = silt::load_config_file(config_path);
    cfg.command = silt::parse_command(command);
    if (d) cfg.d = *d;
    if (p) cfg.p = *p;
    if (theta) cfg.theta = *theta;
    if (R) cfg.R = *R;
    if (t) cfg.t = *t;
    if (replicas) cfg.replicas = *replicas;
    if (seed) cfg.seed = *seed;
    if (out) cfg.out = *out;
    if (format) cfg.format = *format;
    if (force) cfg.force = true;
    cfg.validate();
  } catch (const std::exception& e) {
    std::cerr << "silt: invalid configuration: " << e.what() << "\n";
    return kValidationError;
  }

  try {
    rs = silt::run_experiment(cfg);
    if (cfg.out.empty()) {
      std::cout << (cfg.format == "csv" ? silt::format_csv(rs) : silt::format_json(rs));
    } else {
      silt::emit_results(rs, cfg.out, cfg.format, cfg.force);
    }
  } catch (const silt::ConfigError& e) {
    std::cerr << "silt: invalid configuration: " << e.what() << "\n";
    return kValidationError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "silt: " << e.what() << "\n";
    return kValidationError;
  } catch (const std::exception& e) {
    std::cerr << "silt: " << e.what() << "\n";
    return 1;
  }

  if (rs.verification_failed) {
    std::cerr << "silt: verification failed\n";
    return kVerificationFailure;
  }
  return 0;
}
