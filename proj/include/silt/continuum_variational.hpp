#pragma once

// Continuum variational problems on radial profiles g(|x|) in R^d:
//
//   rho_c(theta) = sup { theta |||g^2|||_p - 1/2 |||grad g|||_2^2 : |||g|||_2 = 1 },
//   chi          = inf { 1/2 |||grad g|||_2^2 : |||g|||_2 = 1 = |||g|||_{2p} },
//
// together with the dilation identities linking them.
//
// Discretization: nodes r_i = i h, i = 0..n, with g(r_n) = 0. Integrals use the
// trapezoidal rule with surface factor omega_d r^(d-1); the origin node carries
// the volume of the ball of radius h/2 so that the mass matrix stays positive
// definite in every dimension. The gradient term is a midpoint sum of squared
// forward differences.

#include <limits>
#include <span>
#include <vector>

#include "silt/sphere_ascent.hpp"

namespace silt {

struct RadialGrid {
  int dim = 1;
  double r_max = 30.0;
  int n_points = 3000;

  double spacing() const { return r_max / n_points; }
  double node(int i) const { return i * spacing(); }
  void validate() const;
};

struct RadialProfile {
  RadialGrid grid;
  /// n_points + 1 nodal values.
  std::vector<double> values;

  static RadialProfile sample(const RadialGrid& grid, auto&& fn) {
    RadialProfile g{grid, std::vector<double>(static_cast<std::size_t>(grid.n_points) + 1)};
    for (int i = 0; i <= grid.n_points; ++i) g.values[static_cast<std::size_t>(i)] = fn(grid.node(i));
    return g;
  }
};

struct ContinuumSolveReport {
  double value = 0.0;
  RadialProfile profile;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  /// Index into the Gaussian start widths {0.5, 1, 2, 4}.
  int start_index = 0;
  /// Largest deviation of the two norm constraints (chi solve only).
  double constraint_violation = 0.0;
};

/// Surface measure of the unit sphere in R^d (2 for d = 1).
double sphere_surface(int dim);

std::vector<double> radial_weights(const RadialGrid& grid);

double radial_l2_norm(const RadialProfile& g);
/// int |g|^q.
double radial_power_integral(const RadialProfile& g, double q);
/// 1/2 int |g'|^2 omega_d r^(d-1) dr.
double radial_energy(const RadialProfile& g);

/// I(f) = radial_energy(sqrt f) for a normalized radial density f. Returns
/// +infinity when halving the spacing nearly doubles the energy (sqrt f has a
/// jump). Rejects densities whose integral is off by more than 1e-6.
double evaluate_rate_I(const RadialProfile& f);

/// theta |||g^2|||_p - 1/2 |||grad g|||^2 at an arbitrary profile.
double continuum_objective(const RadialProfile& g, double theta, double p);

/// g -> beta^(d/2) g(beta .), applied exactly by rescaling the grid spacing.
RadialProfile dilate(const RadialProfile& g, double beta);

/// Objective of the dilated profile, theta beta^(d(p-1)/p) |||g^2|||_p - 1/2 beta^2 |||grad g|||^2.
double dilation_objective(const RadialProfile& g, double theta, double p, double beta);

ContinuumSolveReport solve_rho_continuum(double theta, int dim, double p, const RadialGrid& grid);
ContinuumSolveReport solve_rho_continuum(double theta, int dim, double p);

/// Minimizes the dilation-invariant quotient 1/2 |||grad g|||^2 / |||g|||_{2p}^(4p/(d(p-1)))
/// on the L2 sphere, then dilates the minimizer onto |||g|||_{2p} = 1.
ContinuumSolveReport solve_chi_direct(int dim, double p, const RadialGrid& grid);
ContinuumSolveReport solve_chi_direct(int dim, double p);

/// Inverts rho_c(1) = lambda (2p chi / (d(p-1)))^((lambda-1)/lambda).
double chi_from_rho(double rho1, int dim, double p);
/// theta^(1/lambda) lambda (2p chi / (d(p-1)))^((lambda-1)/lambda).
double rho_c_formula(double theta, double chi, int dim, double p);

/// K = chi^(-d/(4q)) with q = p/(p-1). The remark this comes from assumes
/// d >= 2; d = 1 is accepted and uses the same formula.
double gn_constant(double chi, int dim, double p);

/// |||psi|||_{2p} / (|||grad psi|||_2^a |||psi|||_2^(1-a)) with a = d(p-1)/(2p).
double gn_ratio(const RadialProfile& psi, double p);

/// (theta (d(p-1)/p) |||g^2|||_p / |||grad g|||_2^2)^(1/(2 lambda)).
double beta_star(double theta, const RadialProfile& g, int dim, double p);

bool is_radially_nonincreasing(const RadialProfile& g, double tolerance = 1e-9);

/// The ascent objective for rho_c on the interior nodes 0..n-1, exposed for
/// gradient checks. The metric is W + K (mass plus stiffness).
class RadialRhoObjective final : public SphereObjective {
 public:
  RadialRhoObjective(const RadialGrid& grid, double theta, double p);

  std::size_t size() const override;
  double value(std::span<const double> g) const override;
  void gradient(std::span<const double> g, std::span<double> out) const override;
  std::span<const double> weights() const override { return weights_; }
  void precondition(std::span<double> v) const override;

 private:
  RadialGrid grid_;
  double theta_;
  double p_;
  std::vector<double> weights_;
  std::vector<double> stiffness_;
};

}  // namespace silt
