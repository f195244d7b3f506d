#include "silt/sphere_ascent.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>

namespace silt {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void normalize(std::vector<double>& g, std::span<const double> w) {
  const double n = weighted_norm(g, w);
  if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument("cannot normalize a zero or non-finite vector");
  for (double& x : g) x /= n;
}

}  // namespace

void SphereObjective::precondition(std::span<double> v) const {
  const auto w = weights();
  if (w.empty()) return;
  for (std::size_t i = 0; i < v.size(); ++i) v[i] /= w[i];
}

double weighted_norm(std::span<const double> g, std::span<const double> w) {
  double s = 0.0;
  if (w.empty()) {
    for (double x : g) s += x * x;
  } else {
    for (std::size_t i = 0; i < g.size(); ++i) s += w[i] * g[i] * g[i];
  }
  return std::sqrt(s);
}

SphereAscentResult maximize_on_sphere(const SphereObjective& objective, std::vector<double> start,
                                      const SphereAscentOptions& options) {
  const std::size_t n = objective.size();
  if (start.size() != n) throw std::invalid_argument("start point has the wrong size");
  const auto w = objective.weights();

  SphereAscentResult result;
  std::vector<double> g = std::move(start);
  normalize(g, w);
  double f = objective.value(g);

  std::vector<double> grad(n), dir(n), wg(n), hwg(n), trial(n);
  std::deque<double> history{f};
  double step = options.initial_step;

  for (int it = 0; it < options.max_iterations; ++it) {
    objective.gradient(g, grad);
    for (std::size_t i = 0; i < n; ++i) wg[i] = w.empty() ? g[i] : w[i] * g[i];
    dir = grad;
    objective.precondition(dir);
    hwg = wg;
    objective.precondition(hwg);
    const double c = dot(wg, dir) / dot(wg, hwg);
    for (std::size_t i = 0; i < n; ++i) dir[i] -= c * hwg[i];
    const double slope = dot(grad, dir);
    result.residual = std::sqrt(std::max(slope, 0.0));
    result.iterations = it;

    if (!(slope > 0.0)) {
      result.converged = true;
      break;
    }

    bool accepted = false;
    double f_trial = f;
    while (step >= options.min_step) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = g[i] + step * dir[i];
      normalize(trial, w);
      f_trial = objective.value(trial);
      if (f_trial >= f + options.armijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // No representable ascent left along the gradient: the point is
      // stationary to working precision.
      result.converged = slope <= 1e-8 * std::max(std::abs(f), 1e-300) || slope < 1e-24;
      break;
    }
    g.swap(trial);
    f = f_trial;
    step = std::min(2.0 * step, options.max_step);

    history.push_back(f);
    if (static_cast<int>(history.size()) > options.stall_window + 1) history.pop_front();
    if (static_cast<int>(history.size()) == options.stall_window + 1 &&
        std::abs(f - history.front()) <= options.stall_tolerance * std::abs(f)) {
      result.iterations = it + 1;
      result.converged = true;
      break;
    }
    result.iterations = it + 1;
  }

  result.point = std::move(g);
  result.value = f;
  return result;
}

}  // namespace silt
