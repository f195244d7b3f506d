#include "silt/experiment.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "silt/asymptotics.hpp"
#include "silt/continuum_variational.hpp"
#include "silt/fem_bridge.hpp"
#include "silt/random.hpp"

#ifndef SILT_VERSION
#define SILT_VERSION "unknown"
#endif

namespace silt {

namespace {

constexpr std::pair<Command, std::string_view> kCommands[] = {
    {Command::simulate, "simulate"},     {Command::solve_discrete, "solve-discrete"},
    {Command::solve_continuum, "solve-continuum"}, {Command::embed, "embed"},
    {Command::scaling, "scaling"},       {Command::verify, "verify"},
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(std::string_view field, std::string_view text) {
  text = trim(text);
  T v{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(std::string(field), "cannot parse '" + std::string(text) + "'");
  }
  return v;
}

bool parse_bool(std::string_view field, std::string_view text) {
  text = trim(text);
  if (text == "1" || text == "true" || text == "yes") return true;
  if (text == "0" || text == "false" || text == "no") return false;
  throw ConfigError(std::string(field), "expected true or false, got '" + std::string(text) + "'");
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_value(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void require(bool ok, const char* field, const std::string& message) {
  if (!ok) throw ConfigError(field, message);
}

struct RowSink {
  std::vector<ResultRow>& rows;
  void add(std::string key, double value, std::string tag) { rows.push_back({std::move(key), value, std::nullopt, std::move(tag)}); }
  void add(std::string key, double value, double se, std::string tag) { rows.push_back({std::move(key), value, se, std::move(tag)}); }
};

std::string indexed(std::string_view name, std::size_t i) { return std::string(name) + "[" + std::to_string(i) + "]"; }

// Mean and standard error of per-replica values, in replica order.
std::pair<double, double> mean_and_error(const std::vector<double>& xs) {
  double mean = 0.0;
  double m2 = 0.0;
  double n = 0.0;
  for (double x : xs) {
    n += 1.0;
    const double delta = x - mean;
    mean += delta / n;
    m2 += delta * (x - mean);
  }
  return {mean, std::sqrt(m2 / (n - 1.0) / n)};
}

void run_simulate(const ExperimentConfig& cfg, RowSink& out) {
  WalkConfig base{cfg.d, cfg.t, cfg.clock, *cfg.seed};
  base.validate();
  struct PathStats {
    double pnorm = 0.0, power = 0.0, periodized = 0.0, mass = 0.0, sites = 0.0;
  };
  const auto stats = run_indexed<PathStats>(static_cast<std::size_t>(cfg.replicas), [&](std::size_t i) {
    WalkConfig c = base;
    c.seed = derive_seed(*cfg.seed, i);
    const LocalTimeField field = simulate_walk(c);
    return PathStats{local_time_pnorm(field, cfg.p), local_time_pnorm_power(field, cfg.p),
                     periodized_pnorm(periodize(field, cfg.R), cfg.p), local_time_mass(field),
                     static_cast<double>(field.entries.size())};
  });
  auto column = [&](double PathStats::*member) {
    std::vector<double> xs;
    xs.reserve(stats.size());
    for (const auto& s : stats) xs.push_back(s.*member);
    return mean_and_error(xs);
  };
  for (auto [name, member] : {std::pair{"pnorm", &PathStats::pnorm}, {"pnorm_power", &PathStats::power},
                              {"periodized_pnorm", &PathStats::periodized}, {"mass", &PathStats::mass},
                              {"sites_visited", &PathStats::sites}}) {
    const auto [m, se] = column(member);
    out.add(name, m, se, "mc");
  }
  const MonteCarloEstimate em = estimate_exp_moment(base, cfg.p, cfg.theta, cfg.replicas);
  out.add("exp_moment_rate", em.mean, em.std_error, "mc");
  if (cfg.clock == Clock::discrete && cfg.d >= 2 && cfg.t >= 2.0) {
    const double gamma = cfg.d >= 3 ? escape_probability(cfg.d) : 0.0;
    const double c = typical_constant(cfg.d, cfg.p, gamma, step_covariance_det(cfg.d));
    const double scale = c * typical_scale(cfg.d, cfg.p, cfg.t);
    const auto [m, se] = column(&PathStats::power);
    out.add("typical_constant", c, "closed-form");
    out.add("moment_over_typical", m / scale, se / scale, "mc");
  }
}

void run_solve_discrete(const ExperimentConfig& cfg, RowSink& out) {
  const DiscreteSolveReport rep = solve_rho_discrete(cfg.theta, cfg.R, cfg.d, cfg.p, cfg.boundary);
  out.add("rho_discrete", rep.value, "solver");
  out.add("rate_J", dv_rate(rep.maximizer, cfg.boundary), "solver");
  out.add("maximizer_pnorm", measure_pnorm(rep.maximizer, cfg.p), "solver");
  double top = 0.0;
  for (double w : rep.maximizer.weights) top = std::max(top, w);
  out.add("maximizer_peak", top, "solver");
  out.add("iterations", rep.iterations, "solver");
  out.add("residual", rep.residual, "solver");
  out.add("converged", rep.converged ? 1.0 : 0.0, "solver");
  out.add("restart_index", rep.restart_index, "solver");
}

ContinuumSolveReport continuum_rho(const ExperimentConfig& cfg, double theta) {
  if (cfg.r_max > 0.0) return solve_rho_continuum(theta, cfg.d, cfg.p, RadialGrid{cfg.d, cfg.r_max, cfg.n_points});
  return solve_rho_continuum(theta, cfg.d, cfg.p);
}

void run_solve_continuum(const ExperimentConfig& cfg, RowSink& out) {
  const double lambda = lambda_exponent(cfg.d, cfg.p);
  const ContinuumSolveReport rho = continuum_rho(cfg, cfg.theta);
  const ContinuumSolveReport chi = solve_chi_direct(cfg.d, cfg.p, RadialGrid{cfg.d, 30.0, cfg.n_points});
  const double rho1 = rho.value * std::pow(cfg.theta, -1.0 / lambda);
  out.add("lambda", lambda, "closed-form");
  out.add("rho_continuum", rho.value, "solver");
  out.add("rho_continuum_converged", rho.converged ? 1.0 : 0.0, "solver");
  out.add("rho_continuum_iterations", rho.iterations, "solver");
  out.add("chi_direct", chi.value, "solver");
  out.add("chi_direct_converged", chi.converged ? 1.0 : 0.0, "solver");
  out.add("chi_from_rho", chi_from_rho(rho1, cfg.d, cfg.p), "identity");
  out.add("rho_from_chi", rho_c_formula(cfg.theta, chi.value, cfg.d, cfg.p), "identity");
  out.add("beta_star", beta_star(cfg.theta, chi.profile, cfg.d, cfg.p), "identity");
  out.add("gn_constant", gn_constant(chi.value, cfg.d, cfg.p), "closed-form");
  out.add("maximizer_nonincreasing", is_radially_nonincreasing(rho.profile) ? 1.0 : 0.0, "check");
}

void run_embed(const ExperimentConfig& cfg, RowSink& out) {
  const double lambda = lambda_exponent(cfg.d, cfg.p);
  const DiscreteSolveReport rep = solve_rho_discrete(cfg.theta, cfg.R, cfg.d, cfg.p, Boundary::free);
  Interpolant itp{rep.maximizer, std::pow(cfg.theta, -1.0 / (2.0 * lambda)), {}};
  const double energy = interpolant_energy(itp);
  const double periodic = itp.alpha * itp.alpha * dv_rate_periodic(itp.measure);
  const double l2 = interpolant_l2_norm(itp);
  out.add("rho_discrete", rep.value, "solver");
  out.add("compensated", rep.value * std::pow(cfg.theta, -1.0 / lambda), "solver");
  out.add("alpha", itp.alpha, "closed-form");
  out.add("interpolant_energy", energy, "identity");
  out.add("alpha2_periodic_rate", periodic, "identity");
  out.add("energy_identity_gap", std::abs(energy - periodic) / std::max(std::abs(periodic), 1e-300), "check");
  out.add("interpolant_l2_norm", l2, "identity");
  out.add("l2_deviation", std::abs(l2 - 1.0), "check");
  out.add("l2_deviation_bound", cfg.d * std::sqrt(2.0 * energy) / itp.alpha, "check");

  const ShiftSelection shift = select_shift(itp, cfg.epsilon, cfg.p, cfg.refinement);
  for (int i = 0; i < cfg.d; ++i) itp.shift[static_cast<std::size_t>(i)] += shift.shift[static_cast<std::size_t>(i)];
  out.add("shift_annulus_mass", shift.annulus_mass, "check");
  out.add("shift_bound", shift.bound, "check");
  const QuadratureField h = normalize_embed(itp, torus_cutoff(itp, cfg.epsilon), cfg.refinement);
  const double embedded = field_objective(h, 1.0, cfg.p);
  out.add("embedded_objective", embedded, "solver");
  const ContinuumSolveReport rho1 = continuum_rho(cfg, 1.0);
  out.add("rho_continuum_1", rho1.value, "solver");
  out.add("embedded_ratio", embedded / rho1.value, "check");
}

void run_scaling(const ExperimentConfig& cfg, RowSink& out) {
  const auto points = rho_scaling_sweep(cfg.thetas, cfg.d, cfg.p, BoxRule{cfg.box_multiplier, 1});
  for (std::size_t i = 0; i < points.size(); ++i) {
    out.add(indexed("theta", i), points[i].theta, "closed-form");
    out.add(indexed("radius", i), points[i].radius, "closed-form");
    out.add(indexed("rho_discrete", i), points[i].value, "solver");
    out.add(indexed("compensated", i), points[i].compensated, "solver");
    out.add(indexed("converged", i), points[i].converged ? 1.0 : 0.0, "solver");
  }
  const ContinuumSolveReport rho1 = continuum_rho(cfg, 1.0);
  out.add("rho_continuum_1", rho1.value, "solver");
  if (!points.empty()) {
    out.add("final_relative_gap", std::abs(points.back().compensated - rho1.value) / rho1.value, "check");
  }
}

}  // namespace

std::string_view command_name(Command c) {
  for (const auto& [cmd, name] : kCommands) {
    if (cmd == c) return name;
  }
  return "?";
}

Command parse_command(std::string_view name) {
  for (const auto& [cmd, n] : kCommands) {
    if (n == name) return cmd;
  }
  throw ConfigError("command", "unknown command '" + std::string(name) + "'");
}

ConfigError::ConfigError(std::string field, const std::string& message)
    : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

void ExperimentConfig::validate() const {
  require(d >= 1 && d <= kMaxDim, "d", "must lie in [1, " + std::to_string(kMaxDim) + "]");
  if (command == Command::simulate) {
    require(p > 0.0, "p", "must be positive");
  } else {
    require(p > 1.0, "p", "must exceed 1");
  }
  require(theta > 0.0 && std::isfinite(theta), "theta", "must be positive");
  require(R >= 0, "R", "must be nonnegative");
  require(t > 0.0 && std::isfinite(t), "t", "must be positive");
  require(replicas >= 1, "replicas", "must be at least 1");
  require(n_points >= 100, "n_points", "must be at least 100");
  require(r_max >= 0.0 && std::isfinite(r_max), "r_max", "must be nonnegative (0 = automatic)");
  require(epsilon > 0.0 && epsilon < 1.0, "epsilon", "must lie in (0, 1)");
  require(refinement >= 1, "refinement", "must be at least 1");
  require(box_multiplier > 0.0, "box_multiplier", "must be positive");
  require(format == "csv" || format == "json", "format", "must be csv or json");
  for (double th : thetas) require(th > 0.0 && th <= 1.0, "thetas", "entries must lie in (0, 1]");

  const bool stochastic = command == Command::simulate || command == Command::verify;
  require(!stochastic || seed.has_value(), "seed", "required for " + std::string(command_name(command)));
  if (command == Command::simulate) {
    require(R >= 1, "R", "periodization needs R >= 1");
    require(replicas >= 2, "replicas", "standard errors need at least 2 replicas");
    if (clock == Clock::discrete) require(std::floor(t) == t, "t", "the discrete clock needs an integer step count");
  }
  if (command == Command::solve_continuum || command == Command::embed || command == Command::scaling) {
    require(classify_regime(d, p).subcritical, "p", "needs d(p-1) < 2p");
  }
  if (command == Command::scaling) require(!thetas.empty(), "thetas", "must not be empty");
}

void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "command") {
    cfg.command = parse_command(value);
  } else if (key == "d") {
    cfg.d = parse_number<int>(key, value);
  } else if (key == "p") {
    cfg.p = parse_number<double>(key, value);
  } else if (key == "theta") {
    cfg.theta = parse_number<double>(key, value);
  } else if (key == "R") {
    cfg.R = parse_number<int>(key, value);
  } else if (key == "t" || key == "n") {
    cfg.t = parse_number<double>("t", value);
  } else if (key == "replicas") {
    cfg.replicas = parse_number<int>(key, value);
  } else if (key == "seed") {
    if (value.empty()) {
      cfg.seed.reset();
    } else {
      cfg.seed = parse_number<std::uint64_t>(key, value);
    }
  } else if (key == "clock") {
    if (value == "continuous") {
      cfg.clock = Clock::continuous;
    } else if (value == "discrete") {
      cfg.clock = Clock::discrete;
    } else {
      throw ConfigError("clock", "expected continuous or discrete");
    }
  } else if (key == "boundary") {
    if (value == "free") {
      cfg.boundary = Boundary::free;
    } else if (value == "periodic") {
      cfg.boundary = Boundary::periodic;
    } else {
      throw ConfigError("boundary", "expected free or periodic");
    }
  } else if (key == "r_max") {
    cfg.r_max = parse_number<double>(key, value);
  } else if (key == "n_points") {
    cfg.n_points = parse_number<int>(key, value);
  } else if (key == "epsilon") {
    cfg.epsilon = parse_number<double>(key, value);
  } else if (key == "refinement") {
    cfg.refinement = parse_number<int>(key, value);
  } else if (key == "box_multiplier") {
    cfg.box_multiplier = parse_number<double>(key, value);
  } else if (key == "thetas") {
    cfg.thetas.clear();
    std::string_view rest = value;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      cfg.thetas.push_back(parse_number<double>("thetas", rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
  } else if (key == "out") {
    cfg.out = std::string(value);
  } else if (key == "format") {
    cfg.format = std::string(value);
  } else if (key == "force") {
    cfg.force = parse_bool(key, value);
  } else {
    throw ConfigError(std::string(key), "unknown key");
  }
}

ExperimentConfig parse_config_text(std::string_view text, ExperimentConfig cfg) {
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no), "expected key=value");
    }
    apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
  }
  return cfg;
}

ExperimentConfig load_config_file(const std::filesystem::path& path, ExperimentConfig cfg) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), std::move(cfg));
}

std::vector<std::pair<std::string, std::string>> config_echo(const ExperimentConfig& cfg) {
  std::string thetas;
  for (std::size_t i = 0; i < cfg.thetas.size(); ++i) {
    if (i > 0) thetas += ",";
    thetas += format_double(cfg.thetas[i]);
  }
  return {
      {"command", std::string(command_name(cfg.command))},
      {"d", std::to_string(cfg.d)},
      {"p", format_double(cfg.p)},
      {"theta", format_double(cfg.theta)},
      {"R", std::to_string(cfg.R)},
      {"t", format_double(cfg.t)},
      {"replicas", std::to_string(cfg.replicas)},
      {"seed", cfg.seed ? std::to_string(*cfg.seed) : std::string()},
      {"clock", cfg.clock == Clock::continuous ? "continuous" : "discrete"},
      {"boundary", cfg.boundary == Boundary::free ? "free" : "periodic"},
      {"r_max", format_double(cfg.r_max)},
      {"n_points", std::to_string(cfg.n_points)},
      {"epsilon", format_double(cfg.epsilon)},
      {"refinement", std::to_string(cfg.refinement)},
      {"box_multiplier", format_double(cfg.box_multiplier)},
      {"thetas", thetas},
      {"out", cfg.out},
      {"format", cfg.format},
      {"force", cfg.force ? "true" : "false"},
  };
}

const ResultRow* ResultSet::find(std::string_view key) const {
  for (const auto& r : rows) {
    if (r.key == key) return &r;
  }
  return nullptr;
}

std::string_view code_version() { return SILT_VERSION; }

ResultSet run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::string started = utc_now();
  ResultSet rs;
  if (cfg.command == Command::verify) {
    rs = run_verification(cfg);
  } else {
    RowSink out{rs.rows};
    try {
      switch (cfg.command) {
        case Command::simulate: run_simulate(cfg, out); break;
        case Command::solve_discrete: run_solve_discrete(cfg, out); break;
        case Command::solve_continuum: run_solve_continuum(cfg, out); break;
        case Command::embed: run_embed(cfg, out); break;
        case Command::scaling: run_scaling(cfg, out); break;
        case Command::verify: break;
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(std::string(command_name(cfg.command)) + ": " + e.what());
    } catch (const std::exception& e) {
      throw std::runtime_error(std::string(command_name(cfg.command)) + ": " + e.what());
    }
  }
  rs.manifest.config = config_echo(cfg);
  rs.manifest.code_version = std::string(code_version());
  rs.manifest.started_utc = started;
  rs.manifest.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rs;
}

std::string format_csv(const ResultSet& rs) {
  std::string s = "key,value,std_error,tag\n";
  for (const auto& r : rs.rows) {
    s += r.key;
    s += ',';
    s += format_value(r.value);
    s += ',';
    if (r.std_error) s += format_value(*r.std_error);
    s += ',';
    s += r.tag;
    s += '\n';
  }
  return s;
}

std::string format_json(const ResultSet& rs) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& r : rs.rows) {
    nlohmann::ordered_json row;
    row["key"] = r.key;
    row["value"] = r.value;
    row["std_error"] = r.std_error ? nlohmann::ordered_json(*r.std_error) : nlohmann::ordered_json(nullptr);
    row["tag"] = r.tag;
    rows.push_back(std::move(row));
  }
  nlohmann::ordered_json doc;
  doc["rows"] = std::move(rows);
  return doc.dump(2) + "\n";
}

std::string format_manifest(const ResultSet& rs) {
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  for (const auto& [k, v] : rs.manifest.config) config[k] = v;
  nlohmann::ordered_json doc;
  doc["config"] = std::move(config);
  doc["code_version"] = rs.manifest.code_version;
  doc["started_utc"] = rs.manifest.started_utc;
  doc["wall_seconds"] = rs.manifest.wall_seconds;
  doc["row_count"] = rs.rows.size();
  return doc.dump(2) + "\n";
}

std::vector<ResultRow> parse_csv(std::string_view text) {
  std::vector<ResultRow> rows;
  bool header = true;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (header) {
      if (line != "key,value,std_error,tag") throw std::runtime_error("unexpected CSV header");
      header = false;
      continue;
    }
    std::string_view fields[4];
    for (int i = 0; i < 3; ++i) {
      const auto comma = line.find(',');
      if (comma == std::string_view::npos) throw std::runtime_error("malformed CSV row");
      fields[i] = line.substr(0, comma);
      line = line.substr(comma + 1);
    }
    fields[3] = line;
    ResultRow r;
    r.key = std::string(fields[0]);
    r.value = std::strtod(std::string(fields[1]).c_str(), nullptr);
    if (!fields[2].empty()) r.std_error = std::strtod(std::string(fields[2]).c_str(), nullptr);
    r.tag = std::string(fields[3]);
    rows.push_back(std::move(r));
  }
  return rows;
}

void emit_results(const ResultSet& rs, const std::filesystem::path& path, std::string_view format, bool force) {
  if (format != "csv" && format != "json") throw std::invalid_argument("format must be csv or json");
  const std::filesystem::path manifest = path.string() + ".manifest.json";
  if (!force) {
    for (const auto& p : {path, manifest}) {
      if (std::filesystem::exists(p)) throw std::runtime_error(p.string() + " exists; pass --force to overwrite");
    }
  }
  auto write = [](const std::filesystem::path& p, const std::string& body) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + p.string() + " for writing");
    out << body;
    if (!out) throw std::runtime_error("write to " + p.string() + " failed");
  };
  write(path, format == "csv" ? format_csv(rs) : format_json(rs));
  write(manifest, format_manifest(rs));
}

}  // namespace silt
