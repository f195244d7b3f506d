// The `verify` command: a quick pass over the cross-module invariants.

#include <algorithm>
#include <cmath>
#include <random>

#include "silt/asymptotics.hpp"
#include "silt/continuum_variational.hpp"
#include "silt/experiment.hpp"
#include "silt/fem_bridge.hpp"
#include "silt/random.hpp"

namespace silt {

namespace {

struct Checker {
  ResultSet& rs;

  // metric <= limit passes.
  void check(const std::string& name, double metric, double limit) {
    const bool ok = metric <= limit;
    rs.rows.push_back({name, metric, std::nullopt, "check"});
    rs.rows.push_back({name + ".pass", ok ? 1.0 : 0.0, std::nullopt, "check"});
    if (!ok) rs.verification_failed = true;
  }
};

LatticeMeasure random_measure(int dim, int radius, std::mt19937_64& rng) {
  const Box box(dim, radius);
  std::exponential_distribution<double> expo(1.0);
  std::bernoulli_distribution sparse(0.3);
  std::vector<double> w(box.size());
  for (double& x : w) x = sparse(rng) ? 0.0 : expo(rng);
  w[box.index(Site{})] += 1e-3;
  return LatticeMeasure::from_weights(dim, radius, std::move(w));
}

}  // namespace

ResultSet run_verification(const ExperimentConfig& cfg) {
  ResultSet rs;
  Checker c{rs};
  const std::uint64_t seed = cfg.seed.value_or(0);

  {
    double worst_mass = 0.0;
    double violations = 0.0;
    for (int d = 1; d <= 3; ++d) {
      for (std::uint64_t i = 0; i < 50; ++i) {
        const WalkConfig wc{d, 50.0, Clock::continuous, derive_seed(seed, 100 * d + i)};
        const LocalTimeField f = simulate_walk(wc);
        worst_mass = std::max(worst_mass, std::abs(local_time_mass(f) - wc.time_horizon) / wc.time_horizon);
        for (int r : {2, 4}) {
          const PeriodizedField pf = periodize(f, r);
          for (double p : {1.5, 2.0, 3.0}) {
            if (local_time_pnorm(f, p) > periodized_pnorm(pf, p) * (1.0 + 1e-12)) violations += 1.0;
          }
        }
      }
    }
    c.check("walk_mass_identity", worst_mass, 1e-9);
    c.check("periodization_monotone_violations", violations, 0.0);
  }

  {
    std::mt19937_64 rng(derive_seed(seed, 1000));
    double worst_gap = 0.0;
    double bound_violations = 0.0;
    double worst_l2_excess = 0.0;
    for (int d = 1; d <= 3; ++d) {
      for (int k = 0; k < 10; ++k) {
        const int radius = 1 + k % 3;
        const Interpolant itp{random_measure(d, radius, rng), 1.0 + k % 2, {}};
        const double e = interpolant_energy(itp);
        const double j = itp.alpha * itp.alpha * dv_rate_periodic(itp.measure);
        worst_gap = std::max(worst_gap, std::abs(e - j) / std::max(j, 1e-300));
        const auto rep = pointwise_2p_bound_check(itp, 200, 2.0, rng());
        bound_violations += rep.violations;
        const double dev = std::abs(interpolant_l2_norm(itp) - 1.0);
        worst_l2_excess = std::max(worst_l2_excess, dev - d * std::sqrt(2.0 * e) / itp.alpha);
      }
    }
    c.check("energy_identity_gap", worst_gap, 1e-9);
    c.check("pointwise_bound_violations", bound_violations, 0.0);
    c.check("l2_deviation_excess", worst_l2_excess, 0.0);
  }

  {
    double shortfall = 0.0;
    for (double theta : {0.5, 1.0, 2.0}) {
      const double solved = solve_rho_discrete(theta, 1, 1, 2.0).value;
      const double brute = brute_force_rho(theta, 1, 1, 2.0, 0.02);
      shortfall = std::max(shortfall, brute - 1e-3 - solved);
      shortfall = std::max(shortfall, solved - theta);
    }
    c.check("discrete_vs_grid_shortfall", shortfall, 0.0);
  }

  {
    const double lambda = lambda_exponent(1, 2.0);
    const double r1 = solve_rho_continuum(1.0, 1, 2.0).value;
    const double r2 = solve_rho_continuum(2.0, 1, 2.0).value;
    c.check("continuum_scaling_error", std::abs(r2 / r1 / std::pow(2.0, 1.0 / lambda) - 1.0), 0.01);
  }

  {
    double mismatches = 0.0;
    for (int d = 1; d <= 4; ++d) {
      for (int p = 2; p <= 4; ++p) {
        if (!classify_regime(d, p).subcritical) continue;
        const auto e = squeezing_scale_exponents(Rational(d), Rational(p), Rational(1, 10));
        if (!(e.tilted_speed == e.squeezing_speed)) mismatches += 1.0;
      }
    }
    c.check("scale_exponent_mismatches", mismatches, 0.0);
  }
  return rs;
}

}  // namespace silt
