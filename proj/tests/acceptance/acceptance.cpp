// Acceptance criteria, one per invocation: silt_acceptance <n> [path-to-silt].
// Prints "criterion <n>: PASS|FAIL <detail>" and exits 0 on PASS.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "silt/asymptotics.hpp"
#include "silt/continuum_variational.hpp"
#include "silt/discrete_variational.hpp"
#include "silt/experiment.hpp"
#include "silt/fem_bridge.hpp"
#include "silt/random.hpp"
#include "silt/walk.hpp"

using namespace silt;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

LatticeMeasure random_measure(int dim, int radius, std::mt19937_64& rng) {
  const Box box(dim, radius);
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(box.size());
  for (double& x : w) x = expo(rng);
  return LatticeMeasure::from_weights(dim, radius, std::move(w));
}

double lambda_of(int d, double p) { return lambda_exponent(d, p); }

Outcome energy_identity() {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> radius(1, 4);
  double worst = 0.0;
  for (int d = 1; d <= 3; ++d) {
    for (int k = 0; k < 100; ++k) {
      const LatticeMeasure mu = random_measure(d, radius(rng), rng);
      const double j = dv_rate_periodic(mu);
      for (double alpha : {1.0, 2.0}) {
        const Interpolant itp{mu, alpha, {}};
        const double gap = std::abs(interpolant_energy(itp) - alpha * alpha * j) / std::max(1.0, alpha * alpha * j);
        worst = std::max(worst, gap);
      }
    }
  }
  return {worst <= 1e-9, fmt("max relative gap %.3e", worst)};
}

Outcome solver_vs_grid() {
  std::string detail;
  bool ok = true;
  for (double theta : {0.5, 1.0, 2.0}) {
    const double v = solve_rho_discrete(theta, 1, 1, 2.0).value;
    const double g = brute_force_rho(theta, 1, 1, 2.0, 0.01);
    ok = ok && v >= g - 1e-3 && v > 0.0 && v <= theta;
    detail += fmt("theta=%g solver=%.6f grid=%.6f; ", theta, v, g);
  }
  return {ok, detail};
}

Outcome continuum_scaling() {
  std::string detail;
  bool ok = true;
  for (auto [d, p] : {std::pair{1, 2.0}, {2, 2.0}, {3, 2.0}, {2, 3.0}}) {
    const double lambda = lambda_of(d, p);
    const double r1 = solve_rho_continuum(1.0, d, p).value;
    for (double theta : {0.5, 2.0}) {
      const double r = solve_rho_continuum(theta, d, p).value;
      const double err = std::abs(r / (std::pow(theta, 1.0 / lambda) * r1) - 1.0);
      ok = ok && err <= 0.01;
      detail += fmt("(%d,%g) theta=%g err=%.2e; ", d, p, theta, err);
    }
    if (d == 1) {
      ok = ok && r1 >= 0.3847;
      detail += fmt("rho(1)=%.6f; ", r1);
    }
  }
  return {ok, detail};
}

Outcome chi_checks() {
  std::string detail;
  bool ok = true;
  for (auto [d, p] : {std::pair{1, 2.0}, {2, 2.0}}) {
    const double direct = solve_chi_direct(d, p).value;
    const double via = chi_from_rho(solve_rho_continuum(1.0, d, p).value, d, p);
    const double rel = std::abs(direct - via) / via;
    ok = ok && rel <= 0.02;
    detail += fmt("(%d,%g) direct=%.6f via_rho=%.6f; ", d, p, direct, via);
    if (d == 1) ok = ok && direct <= 1.852;
    const double k = gn_constant(direct, d, p);
    std::mt19937_64 rng(404 + d);
    std::uniform_real_distribution<double> u(0.2, 3.0);
    int violations = 0;
    for (int i = 0; i < 50; ++i) {
      const double a = u(rng), b = u(rng), c = u(rng);
      const RadialProfile psi = RadialProfile::sample(RadialGrid{d, 30.0, 3000}, [&](double r) {
        return std::exp(-r * r / (a * a)) + c * std::exp(-(r - b) * (r - b));
      });
      if (gn_ratio(psi, p) > k) ++violations;
    }
    ok = ok && violations == 0;
    detail += fmt("GN violations=%d; ", violations);
  }
  return {ok, detail};
}

Outcome gamma_limit() {
  const std::vector<double> thetas{0.2, 0.1, 0.05, 0.02};
  const auto sweep = rho_scaling_sweep(thetas, 1, 2.0);
  const double target = solve_rho_continuum(1.0, 1, 2.0).value;
  std::string detail;
  bool monotone = true;
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    detail += fmt("%.6f ", sweep[i].compensated);
    if (i > 0) {
      const double prev = std::abs(sweep[i - 1].compensated - target);
      monotone = monotone && std::abs(sweep[i].compensated - target) <= prev;
    }
  }
  const double gap = std::abs(sweep.back().compensated - target) / target;
  detail += fmt("target=%.6f final_gap=%.2e", target, gap);
  return {monotone && gap <= 0.10, detail};
}

Outcome typical_moments() {
  const double gamma = escape_probability(3);
  WalkConfig c3{3, 2e4, Clock::discrete, 606};
  const MonteCarloEstimate m3 = estimate_moment(c3, 2.0, 2000);
  const double expected = typical_constant(3, 2.0, gamma, step_covariance_det(3));
  const double rel3 = std::abs(m3.mean / 2e4 / expected - 1.0);

  WalkConfig c2{2, 1e4, Clock::discrete, 607};
  const MonteCarloEstimate small = estimate_moment(c2, 2.0, 2000);
  c2.time_horizon = 4e4;
  const MonteCarloEstimate large = estimate_moment(c2, 2.0, 2000);
  const double predicted = 4.0 * std::log(4e4) / std::log(1e4);
  const double ratio = large.mean / small.mean;
  const double rel_ratio = std::abs(ratio / predicted - 1.0);
  const double c = 2.0 / std::numbers::pi;
  const double norm_small = small.mean / (1e4 * std::log(1e4));
  const double norm_large = large.mean / (4e4 * std::log(4e4));
  const double rel_c = std::max(std::abs(norm_small / c - 1.0), std::abs(norm_large / c - 1.0));
  return {rel3 <= 0.05 && rel_ratio <= 0.10 && rel_c <= 0.10,
          fmt("d=3 ratio to (2-g)/g %.4f (expected %.4f); d=2 ratio %.4f vs %.4f, E/(n log n) %.4f %.4f vs %.4f",
              m3.mean / 2e4, expected, ratio, predicted, norm_small, norm_large, c)};
}

Outcome pathwise() {
  int violations = 0;
  double worst_mass = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const int d = 1 + i % 3;
    const WalkConfig cfg{d, 100.0, i % 2 == 0 ? Clock::continuous : Clock::discrete, derive_seed(707, static_cast<std::uint64_t>(i))};
    const LocalTimeField f = simulate_walk(cfg);
    worst_mass = std::max(worst_mass, std::abs(local_time_mass(f) - 100.0) / 100.0);
    for (int r : {2, 4, 8}) {
      const PeriodizedField pf = periodize(f, r);
      double folded = 0.0;
      for (double x : pf.entries) folded += x;
      worst_mass = std::max(worst_mass, std::abs(folded - 100.0) / 100.0);
      for (double p : {1.5, 2.0, 3.0}) {
        if (periodized_pnorm(pf, p) < local_time_pnorm(f, p) * (1.0 - 1e-12)) ++violations;
      }
    }
  }
  return {violations == 0 && worst_mass <= 1e-9, fmt("violations=%d max mass error %.2e", violations, worst_mass)};
}

Outcome pointwise() {
  std::mt19937_64 rng(808);
  std::uniform_int_distribution<int> radius(1, 4);
  int violations = 0;
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const int d = 1 + k % 3;
    const Interpolant itp{random_measure(d, radius(rng), rng), 1.0, {}};
    const PointwiseBoundReport r = pointwise_2p_bound_check(itp, 100, 2.0, derive_seed(809, static_cast<std::uint64_t>(k)));
    violations += r.violations;
    worst = std::max(worst, r.max_ratio);
  }
  return {violations == 0, fmt("samples=10000 violations=%d max ratio %.6f", violations, worst)};
}

Outcome exp_moment() {
  const WalkConfig early{1, 25.0, Clock::continuous, 909};
  const WalkConfig late{1, 50.0, Clock::continuous, 909};
  const MonteCarloEstimate a = estimate_exp_moment(early, 2.0, 1.0, 10000);
  const MonteCarloEstimate b = estimate_exp_moment(late, 2.0, 1.0, 10000);
  const bool in_range = b.mean > 0.0 && b.mean <= 1.0;
  return {in_range && b.mean >= a.mean,
          fmt("t=25: %.4f +- %.4f, t=50: %.4f +- %.4f", a.mean, a.std_error, b.mean, b.std_error)};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome reproducibility(const std::string& cli) {
  const std::vector<std::pair<std::string, std::string>> runs{
      {"simulate", "--d 2 --t 50 --replicas 50"},
      {"solve-discrete", "--R 3"},
      {"solve-continuum", "--d 1"},
      {"embed", "--theta 0.2 --R 18"},
      {"scaling", "--d 1"},
      {"verify", ""},
  };
  const auto dir = std::filesystem::temp_directory_path() / ("silt_accept_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  std::string detail;
  bool ok = true;
  for (const auto& [cmd, args] : runs) {
    std::string out[2];
    for (int k = 0; k < 2; ++k) {
      const auto path = dir / (cmd + std::to_string(k) + ".csv");
      const std::string line = "'" + cli + "' " + cmd + " " + args + " --seed 1234 --out '" + path.string() + "' > /dev/null";
      const int rc = std::system(line.c_str());
      if (rc != 0) {
        ok = false;
        detail += cmd + " exit " + std::to_string(rc) + "; ";
      }
      out[k] = slurp(path);
    }
    const bool same = !out[0].empty() && out[0] == out[1];
    ok = ok && same;
    detail += cmd + (same ? " identical; " : " DIFFERS; ");
  }
  std::filesystem::remove_all(dir);

  ExperimentConfig cfg;
  cfg.command = Command::simulate;
  cfg.d = 3;
  cfg.t = 40.0;
  cfg.replicas = 30;
  cfg.seed = 99;
  const bool lib_same = format_csv(run_experiment(cfg)) == format_csv(run_experiment(cfg));
  detail += lib_same ? "library identical" : "library DIFFERS";
  return {ok && lib_same, detail};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: %s <criterion 1-10> [silt executable]\n", argv[0]);
    return 2;
  }
  const int n = std::atoi(argv[1]);
  const std::string cli = argc > 2 ? argv[2] : "silt";
  struct Criterion {
    std::function<Outcome()> run;
    double budget_seconds;
  };
  const std::vector<Criterion> criteria{
      {energy_identity, 10},  {solver_vs_grid, 30}, {continuum_scaling, 60}, {chi_checks, 120},
      {gamma_limit, 300},     {typical_moments, 600}, {pathwise, 120},        {pointwise, 60},
      {exp_moment, 300},      {[&] { return reproducibility(cli); }, 300},
  };
  if (n < 1 || n > static_cast<int>(criteria.size())) {
    std::fprintf(stderr, "unknown criterion %d\n", n);
    return 2;
  }
  const Criterion& c = criteria[static_cast<std::size_t>(n - 1)];
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = c.run();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool within = secs <= c.budget_seconds;
  const bool pass = o.pass && within;
  std::printf("criterion %d: %s %s [%.1fs of %.0fs budget%s]\n", n, pass ? "PASS" : "FAIL", o.detail.c_str(), secs,
              c.budget_seconds, within ? "" : ", over budget");
  return pass ? 0 : 1;
}
