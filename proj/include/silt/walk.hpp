#pragma once

// Simple random walks on Z^d and their local times.
//
// The continuous-time walk has generator (1/2) * discrete Laplacian: each of the
// 2d directed edges fires at rate 1/2, so the walker holds for an Exp(d) time
// and then jumps to a uniformly chosen neighbour. The discrete-time walk makes
// one uniform nearest-neighbour step per unit of time; its local time at z
// counts the visits S_k = z for 0 <= k < n.

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "silt/lattice.hpp"

namespace silt {

enum class Clock { continuous, discrete };

struct WalkConfig {
  int dim = 1;
  /// Time horizon t for the continuous clock, step count n for the discrete one.
  double time_horizon = 1.0;
  Clock clock = Clock::continuous;
  std::uint64_t seed = 0;

  void validate() const;
  /// Step count of a discrete-clock configuration.
  std::int64_t steps() const;
};

/// Sparse occupation times. `total` is the elapsed time (or step count).
struct LocalTimeField {
  int dim = 1;
  std::unordered_map<Site, double, SiteHash> entries;
  double total = 0.0;
};

/// Local times folded onto the torus Q_R with period 2R+1 per coordinate.
struct PeriodizedField {
  Box box;
  std::vector<double> entries;
  double total = 0.0;
};

/// L_t(x) = (alpha^d / t) * l_t(floor(alpha x)): a step density on cells of side 1/alpha.
struct RescaledProfile {
  int dim = 1;
  double alpha = 1.0;
  std::unordered_map<Site, double, SiteHash> heights;

  double evaluate(std::span<const double> x) const;
  double integral() const;
};

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

LocalTimeField simulate_walk(const WalkConfig& cfg);

/// (sum_z l(z)^p)^(1/p). Rejects p <= 0.
double local_time_pnorm(const LocalTimeField& field, double p);
/// sum_z l(z)^p, the self-intersection functional for integer p.
double local_time_pnorm_power(const LocalTimeField& field, double p);
/// Compensated sum of all entries.
double local_time_mass(const LocalTimeField& field);

PeriodizedField periodize(const LocalTimeField& field, int radius);
double periodized_pnorm(const PeriodizedField& field, double p);

RescaledProfile rescaled_profile(const LocalTimeField& field, double alpha);

/// Monte Carlo mean of ||l||_p^p; replica i uses derive_seed(cfg.seed, i).
MonteCarloEstimate estimate_moment(const WalkConfig& cfg, double p, int replicas);

/// (1/t) log of the sample mean of exp(theta ||l_t||_p), accumulated in
/// log-sum-exp form; std_error by the delta method.
MonteCarloEstimate estimate_exp_moment(const WalkConfig& cfg, double p, double theta, int replicas);

/// Number of visits to the origin of a discrete-clock walk during its n steps
/// (the start counts as one visit). Needs no occupation map.
std::int64_t count_origin_visits(const WalkConfig& cfg);

}  // namespace silt
