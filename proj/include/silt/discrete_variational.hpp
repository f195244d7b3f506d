#pragma once

// The discrete variational formula
//
//   rho(theta) = sup { theta ||mu||_p - J(mu) : mu a probability measure },
//   J(mu)      = 1/2 sum over unordered nearest-neighbour pairs (sqrt mu(x) - sqrt mu(y))^2,
//
// restricted to the box Q_R, with either free boundary (mu = 0 outside Q_R, so
// the edges leaving the box count) or periodic boundary (torus edges of Q_R).

#include <vector>

#include "silt/lattice.hpp"

namespace silt {

enum class Boundary { free, periodic };

struct LatticeMeasure {
  Box box;
  std::vector<double> weights;

  /// Throws unless weights are nonnegative and sum to 1 within 1e-12.
  void validate() const;
  static LatticeMeasure point_mass(int dim, int radius, const Site& at = {});
  static LatticeMeasure uniform(int dim, int radius);
  /// Normalizes arbitrary nonnegative weights.
  static LatticeMeasure from_weights(int dim, int radius, std::vector<double> weights);
};

struct DiscreteSolveReport {
  double value = 0.0;
  LatticeMeasure maximizer{Box(1, 0), {1.0}};
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  /// 0 = point mass, 1 = uniform, 2 = Gaussian start.
  int restart_index = 0;
};

double dv_rate_free(const LatticeMeasure& mu);
double dv_rate_periodic(const LatticeMeasure& mu);
double dv_rate(const LatticeMeasure& mu, Boundary boundary);

/// (sum mu(z)^p)^(1/p). Rejects p <= 1.
double measure_pnorm(const LatticeMeasure& mu, double p);

/// theta ||mu||_p - J(mu).
double discrete_objective(const LatticeMeasure& mu, double theta, double p, Boundary boundary);

DiscreteSolveReport solve_rho_discrete(double theta, int radius, int dim, double p,
                                       Boundary boundary = Boundary::free);

/// Exhaustive maximum over the simplex grid {k * grid_step} on Q_R. Independent
/// of the solver; refuses boxes whose grid exceeds 10^7 points.
double brute_force_rho(double theta, int radius, int dim, double p, double grid_step,
                       Boundary boundary = Boundary::free);

struct BoxRule {
  /// Box radius = max(min_radius, ceil(multiplier * theta^(-1/(2 lambda)))).
  double multiplier = 6.0;
  int min_radius = 1;

  int radius_for(double theta, double lambda) const;
};

struct ScalingPoint {
  double theta = 0.0;
  int radius = 0;
  double value = 0.0;
  /// value * theta^(-1/lambda).
  double compensated = 0.0;
  bool converged = false;
};

std::vector<ScalingPoint> rho_scaling_sweep(const std::vector<double>& thetas, int dim, double p,
                                            const BoxRule& rule = {});

}  // namespace silt
