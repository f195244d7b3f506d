#pragma once

// Piecewise-linear embedding of lattice measures into R^d.
//
// sqrt(mu), extended periodically from Q_L, is interpolated linearly on the
// Kuhn triangulation of the unit grid: the cell k + [0,1]^d splits into d!
// simplices T_sigma(k) = {k + u : u_sigma(1) >= ... >= u_sigma(d)}. Rescaling
// gives g(x) = alpha^(d/2) u(alpha x + shift), a function on the torus
// [-L/alpha, (L+1)/alpha)^d centred at 1/(2 alpha) with half-width
// R = (2L+1)/(2 alpha).
//
// Permutations are 0-based here: sigma[0] is the axis with the largest
// fractional part.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "silt/discrete_variational.hpp"
#include "silt/lattice.hpp"

namespace silt {

using Permutation = std::array<int, kMaxDim>;

struct SimplexId {
  Site base{};
  Permutation sigma{};
};

/// Axes ordered by decreasing fractional part of y; ties keep the smaller axis first.
Permutation simplex_permutation(std::span<const double> y);
SimplexId locate_simplex(std::span<const double> y);

struct Interpolant {
  LatticeMeasure measure;
  double alpha = 1.0;
  /// Offset in lattice units, applied as alpha x + shift.
  std::array<double, kMaxDim> shift{};

  int dim() const { return measure.box.dim(); }
  /// Half-width (2L+1)/(2 alpha) of the torus.
  double torus_radius() const;
  /// Centre 1/(2 alpha) of the torus in every coordinate.
  double torus_center() const;
  void validate() const;
};

/// alpha x + shift.
std::vector<double> lattice_coordinates(const Interpolant& itp, std::span<const double> x);

double interpolant_eval(const Interpolant& itp, std::span<const double> x);
/// Evaluates the linear piece of `simplex` at the lattice-space point y, which
/// should lie in its closure. Used to compare adjacent simplices on shared faces.
double interpolant_eval_simplex(const Interpolant& itp, const SimplexId& simplex, std::span<const double> y);
/// Gradient in x of the piece containing x.
void interpolant_gradient(const Interpolant& itp, std::span<const double> x, std::span<double> out);

/// 1/2 |||grad g|||_2^2 over the torus, summed simplex by simplex in closed form.
double interpolant_energy(const Interpolant& itp);
/// |||g|||_2 over the torus, exact for piecewise-linear functions.
double interpolant_l2_norm(const Interpolant& itp);

class CutoffProfile {
 public:
  /// Product of trapezoids: 1 on [-R + R^eps, R - R^eps], 0 beyond R, linear between.
  CutoffProfile(double radius, double epsilon, double center = 0.0);

  double radius() const { return radius_; }
  double ramp() const { return ramp_; }
  double center() const { return center_; }

  /// One-dimensional factor at coordinate s.
  double factor(double s) const;
  double factor_slope(double s) const;
  double value(std::span<const double> x) const;
  void gradient(std::span<const double> x, std::span<double> out) const;

 private:
  double radius_;
  double epsilon_;
  double ramp_;
  double center_;
};

/// Cutoff matching the torus of `itp` with ramp width R^eps.
CutoffProfile torus_cutoff(const Interpolant& itp, double epsilon = 0.5);

/// A function sampled at the centroids of a refined Kuhn triangulation of the
/// torus. All weights are equal and sum to the torus volume.
struct QuadratureField {
  int dim = 1;
  std::vector<double> positions;  // dim per point
  std::vector<double> values;
  std::vector<double> gradients;  // dim per point
  std::vector<double> weights;
  /// Fine-grid spacing in x, the unit of torus shifts.
  double fine_step = 1.0;

  std::size_t size() const { return values.size(); }
};

/// Each unit lattice cell is split into refinement^d subcubes and each subcube
/// into d! simplices; g is linear on every one of them.
QuadratureField sample_interpolant(const Interpolant& itp, int refinement);
QuadratureField apply_cutoff(const QuadratureField& field, const CutoffProfile& cut);

double field_l2_norm(const QuadratureField& field);
double field_energy(const QuadratureField& field);
double field_power_integral(const QuadratureField& field, double q);
/// theta |||h^2|||_p - 1/2 |||grad h|||^2.
double field_objective(const QuadratureField& field, double theta, double p);

/// g Psi / |||g Psi|||_2 on the quadrature points. Rejects a vanishing product.
QuadratureField normalize_embed(const Interpolant& itp, const CutoffProfile& cut, int refinement);

struct ShiftSelection {
  /// Shift in lattice units; add it to Interpolant::shift.
  std::array<double, kMaxDim> shift{};
  double annulus_mass = 0.0;
  double bound = 0.0;
  double total_mass = 0.0;
  int candidates_tried = 0;
  bool used_full_scan = false;
};

/// Finds a torus shift after which the mass of g^(2p) in the annulus
/// {R - R^eps < max_i |x_i - c| <= R} is at most its volume share of the total.
/// Candidates are multiples of R^eps/2 per axis, then every fine-grid shift.
ShiftSelection select_shift(const Interpolant& itp, double epsilon, double p, int refinement);

struct PointwiseBoundReport {
  int samples = 0;
  int violations = 0;
  /// max |sum_i diff_i frac_sigma(i)|^(2p) / (d^(2p) sum_i diff_i^2).
  double max_ratio = 0.0;
};

/// Samples lattice points y uniformly on the torus and checks
/// |sum_i diff_i frac_sigma(i)|^(2p) <= d^(2p) sum_i diff_i^2.
PointwiseBoundReport pointwise_2p_bound_check(const Interpolant& itp, int samples, double p, std::uint64_t seed);

}  // namespace silt
