#pragma once

// Experiment configuration, dispatch and result persistence for the `silt` tool.
//
// Configs are plain key=value lines ('#' starts a comment). Command-line flags
// override file values. Every stochastic quantity derives from the single
// master seed through derive_seed.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "silt/discrete_variational.hpp"
#include "silt/walk.hpp"

namespace silt {

enum class Command { simulate, solve_discrete, solve_continuum, embed, scaling, verify };

std::string_view command_name(Command c);
Command parse_command(std::string_view name);

/// A validation failure tied to one config field.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& message);
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct ExperimentConfig {
  Command command = Command::simulate;
  int d = 1;
  double p = 2.0;
  double theta = 1.0;
  int R = 4;
  /// Time horizon, or step count for the discrete clock.
  double t = 100.0;
  int replicas = 100;
  std::optional<std::uint64_t> seed;
  Clock clock = Clock::continuous;
  Boundary boundary = Boundary::free;
  /// Radial grid for continuum solves; r_max = 0 picks the scale automatically.
  double r_max = 0.0;
  int n_points = 3000;
  double epsilon = 0.5;
  int refinement = 8;
  double box_multiplier = 6.0;
  std::vector<double> thetas{0.2, 0.1, 0.05, 0.02};
  std::string out;
  std::string format = "csv";
  bool force = false;

  /// Throws ConfigError naming the first offending field.
  void validate() const;
};

/// Sets one field from its textual value.
void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value);
/// Applies every key=value line of `text` on top of `cfg`.
ExperimentConfig parse_config_text(std::string_view text, ExperimentConfig cfg = {});
ExperimentConfig load_config_file(const std::filesystem::path& path, ExperimentConfig cfg = {});
/// Canonical key=value pairs; feeding them back through apply_setting
/// reproduces the config exactly.
std::vector<std::pair<std::string, std::string>> config_echo(const ExperimentConfig& cfg);

struct ResultRow {
  std::string key;
  double value = 0.0;
  std::optional<double> std_error;
  /// How the value was obtained: mc, solver, closed-form, identity or check.
  std::string tag;
};

struct Manifest {
  std::vector<std::pair<std::string, std::string>> config;
  std::string code_version;
  double wall_seconds = 0.0;
  std::string started_utc;
};

struct ResultSet {
  std::vector<ResultRow> rows;
  Manifest manifest;
  /// Set by `verify` when any check failed.
  bool verification_failed = false;

  const ResultRow* find(std::string_view key) const;
};

std::string_view code_version();

ResultSet run_experiment(const ExperimentConfig& cfg);

/// Rows of the invariant suite; sets verification_failed on any failure.
ResultSet run_verification(const ExperimentConfig& cfg);

/// Header key,value,std_error,tag; values as %.16e.
std::string format_csv(const ResultSet& rs);
std::string format_json(const ResultSet& rs);
std::string format_manifest(const ResultSet& rs);
std::vector<ResultRow> parse_csv(std::string_view text);

/// Writes `path` in the requested format and `path`.manifest.json next to it.
/// Refuses to replace either file unless `force` is set.
void emit_results(const ResultSet& rs, const std::filesystem::path& path, std::string_view format, bool force);

}  // namespace silt
