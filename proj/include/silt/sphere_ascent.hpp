#pragma once

#include <span>
#include <vector>

namespace silt {

/// A smooth objective on the weighted unit sphere {g : sum_i w_i g_i^2 = 1}.
///
/// Ascent directions are Riemannian gradients with respect to a metric H that
/// the objective supplies through `precondition` (which must apply H^{-1} in
/// place). The default metric is the diagonal mass matrix W itself.
class SphereObjective {
 public:
  virtual ~SphereObjective() = default;

  virtual std::size_t size() const = 0;
  virtual double value(std::span<const double> g) const = 0;
  /// Euclidean gradient of `value`.
  virtual void gradient(std::span<const double> g, std::span<double> out) const = 0;
  /// Diagonal of W. Empty means the identity.
  virtual std::span<const double> weights() const { return {}; }
  virtual void precondition(std::span<double> v) const;
};

struct SphereAscentOptions {
  int max_iterations = 100000;
  /// Stop once the objective moved by less than `stall_tolerance` (relative)
  /// over the last `stall_window` iterations.
  int stall_window = 50;
  double stall_tolerance = 1e-10;
  double armijo = 1e-4;
  double initial_step = 1.0;
  double max_step = 1e8;
  double min_step = 1e-20;
};

struct SphereAscentResult {
  std::vector<double> point;
  double value = 0.0;
  int iterations = 0;
  /// H-norm of the Riemannian gradient at the returned point.
  double residual = 0.0;
  bool converged = false;
};

double weighted_norm(std::span<const double> g, std::span<const double> w);

/// Projected gradient ascent with sphere retraction and Armijo backtracking.
SphereAscentResult maximize_on_sphere(const SphereObjective& objective, std::vector<double> start,
                                      const SphereAscentOptions& options = {});

}  // namespace silt
