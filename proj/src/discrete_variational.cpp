#include "silt/discrete_variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>

#include "silt/asymptotics.hpp"
#include "silt/sphere_ascent.hpp"

namespace silt {

namespace {

// J evaluated on amplitudes g = sqrt(mu) (or any real vector).
double rate_from_amplitudes(const Box& box, std::span<const double> g, Boundary boundary) {
  const int d = box.dim();
  double s = 0.0;
  if (boundary == Boundary::periodic) {
    if (box.side() == 1) return 0.0;
    for (std::size_t i = 0; i < box.size(); ++i) {
      for (int a = 0; a < d; ++a) {
        const double diff = g[i] - g[box.periodic_neighbor(i, a, +1)];
        s += diff * diff;
      }
    }
    return 0.5 * s;
  }
  const int r = box.radius();
  for (std::size_t i = 0; i < box.size(); ++i) {
    const Site z = box.site(i);
    for (int a = 0; a < d; ++a) {
      const auto c = z[static_cast<std::size_t>(a)];
      if (c < r) {
        const double diff = g[i] - g[box.periodic_neighbor(i, a, +1)];
        s += diff * diff;
      } else {
        s += g[i] * g[i];
      }
      if (c == -r) s += g[i] * g[i];
    }
  }
  return 0.5 * s;
}

// (L g)_z = d/dg_z of the edge sum above.
void rate_gradient(const Box& box, std::span<const double> g, Boundary boundary, std::span<double> out) {
  const int d = box.dim();
  const int r = box.radius();
  for (std::size_t i = 0; i < box.size(); ++i) {
    double acc = 0.0;
    if (boundary == Boundary::periodic) {
      if (box.side() > 1) {
        for (int a = 0; a < d; ++a) {
          acc += 2.0 * g[i] - g[box.periodic_neighbor(i, a, +1)] - g[box.periodic_neighbor(i, a, -1)];
        }
      }
    } else {
      const Site z = box.site(i);
      for (int a = 0; a < d; ++a) {
        const auto c = z[static_cast<std::size_t>(a)];
        acc += 2.0 * g[i];
        if (c < r) acc -= g[box.periodic_neighbor(i, a, +1)];
        if (c > -r) acc -= g[box.periodic_neighbor(i, a, -1)];
      }
    }
    out[i] = acc;
  }
}

double pnorm_of(const std::vector<double>& mu, double p) {
  double s = 0.0;
  for (double m : mu) {
    if (m > 0.0) s += std::pow(m, p);
  }
  return std::pow(s, 1.0 / p);
}

std::vector<double> amplitudes(const LatticeMeasure& mu) {
  std::vector<double> g(mu.weights.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = std::sqrt(mu.weights[i]);
  return g;
}

class DiscreteObjective final : public SphereObjective {
 public:
  DiscreteObjective(Box box, double theta, double p, Boundary boundary)
      : box_(box), theta_(theta), p_(p), boundary_(boundary) {}

  std::size_t size() const override { return box_.size(); }

  double value(std::span<const double> g) const override {
    double s = 0.0;
    for (double x : g) s += std::pow(std::abs(x), 2.0 * p_);
    return theta_ * std::pow(s, 1.0 / p_) - rate_from_amplitudes(box_, g, boundary_);
  }

  void gradient(std::span<const double> g, std::span<double> out) const override {
    double s = 0.0;
    for (double x : g) s += std::pow(std::abs(x), 2.0 * p_);
    rate_gradient(box_, g, boundary_, out);
    const double scale = 2.0 * theta_ * std::pow(s, 1.0 / p_ - 1.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
      out[i] = scale * std::pow(std::abs(g[i]), 2.0 * p_ - 2.0) * g[i] - out[i];
    }
  }

 private:
  Box box_;
  double theta_;
  double p_;
  Boundary boundary_;
};

void check_p(double p) {
  if (!(p > 1.0)) throw std::invalid_argument("p must exceed 1, got " + std::to_string(p));
}

}  // namespace

void LatticeMeasure::validate() const {
  if (weights.size() != box.size()) throw std::invalid_argument("measure size does not match its box");
  double s = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("measure weights must be nonnegative");
    s += w;
  }
  if (std::abs(s - 1.0) > 1e-12) throw std::invalid_argument("measure weights must sum to 1");
}

LatticeMeasure LatticeMeasure::point_mass(int dim, int radius, const Site& at) {
  LatticeMeasure mu{Box(dim, radius), {}};
  if (!mu.box.contains(at)) throw std::invalid_argument("point mass outside the box");
  mu.weights.assign(mu.box.size(), 0.0);
  mu.weights[mu.box.index(at)] = 1.0;
  return mu;
}

LatticeMeasure LatticeMeasure::uniform(int dim, int radius) {
  LatticeMeasure mu{Box(dim, radius), {}};
  mu.weights.assign(mu.box.size(), 1.0 / static_cast<double>(mu.box.size()));
  return mu;
}

LatticeMeasure LatticeMeasure::from_weights(int dim, int radius, std::vector<double> weights) {
  LatticeMeasure mu{Box(dim, radius), std::move(weights)};
  if (mu.weights.size() != mu.box.size()) throw std::invalid_argument("weight count does not match the box");
  double s = 0.0;
  for (double w : mu.weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("weights must be nonnegative");
    s += w;
  }
  if (!(s > 0.0)) throw std::invalid_argument("weights must not all vanish");
  for (double& w : mu.weights) w /= s;
  return mu;
}

double dv_rate_free(const LatticeMeasure& mu) { return rate_from_amplitudes(mu.box, amplitudes(mu), Boundary::free); }

double dv_rate_periodic(const LatticeMeasure& mu) {
  return rate_from_amplitudes(mu.box, amplitudes(mu), Boundary::periodic);
}

double dv_rate(const LatticeMeasure& mu, Boundary boundary) {
  return boundary == Boundary::free ? dv_rate_free(mu) : dv_rate_periodic(mu);
}

double measure_pnorm(const LatticeMeasure& mu, double p) {
  check_p(p);
  return pnorm_of(mu.weights, p);
}

double discrete_objective(const LatticeMeasure& mu, double theta, double p, Boundary boundary) {
  return theta * measure_pnorm(mu, p) - dv_rate(mu, boundary);
}

DiscreteSolveReport solve_rho_discrete(double theta, int radius, int dim, double p, Boundary boundary) {
  if (!(theta > 0.0)) throw std::invalid_argument("theta must be positive");
  check_p(p);
  const Box box(dim, radius);
  const DiscreteObjective objective(box, theta, p, boundary);

  std::vector<std::vector<double>> starts;
  {
    std::vector<double> delta(box.size(), 0.0);
    delta[box.index(Site{})] = 1.0;
    starts.push_back(std::move(delta));
    starts.emplace_back(box.size(), 1.0);
    const double width = std::max(0.5 * radius, 0.5);
    std::vector<double> gauss(box.size());
    for (std::size_t i = 0; i < box.size(); ++i) {
      const Site z = box.site(i);
      double r2 = 0.0;
      for (int a = 0; a < dim; ++a) r2 += double(z[static_cast<std::size_t>(a)]) * z[static_cast<std::size_t>(a)];
      // amplitude of a Gaussian measure with standard deviation `width`
      gauss[i] = std::exp(-r2 / (4.0 * width * width));
    }
    starts.push_back(std::move(gauss));
  }

  DiscreteSolveReport best;
  bool have_best = false;
  for (std::size_t k = 0; k < starts.size(); ++k) {
    SphereAscentResult run = maximize_on_sphere(objective, starts[k]);
    std::vector<double> mu(run.point.size());
    for (std::size_t i = 0; i < mu.size(); ++i) mu[i] = run.point[i] * run.point[i];
    LatticeMeasure measure = LatticeMeasure::from_weights(dim, radius, std::move(mu));
    const double value = discrete_objective(measure, theta, p, boundary);
    const bool better = !have_best || value > best.value ||
                        (value == best.value && run.iterations < best.iterations);
    if (better) {
      best.value = value;
      best.maximizer = std::move(measure);
      best.iterations = run.iterations;
      best.residual = run.residual;
      best.converged = run.converged;
      best.restart_index = static_cast<int>(k);
      have_best = true;
    }
  }
  if (best.value > theta * (1.0 + 1e-12)) {
    throw std::logic_error("discrete solve exceeded the a-priori bound theta");
  }
  return best;
}

double brute_force_rho(double theta, int radius, int dim, double p, double grid_step, Boundary boundary) {
  check_p(p);
  if (!(grid_step > 0.0) || grid_step > 1.0) throw std::invalid_argument("grid step must lie in (0, 1]");
  const double units_real = 1.0 / grid_step;
  const auto units = static_cast<int>(std::lround(units_real));
  if (std::abs(units_real - units) > 1e-9 * units_real) {
    throw std::invalid_argument("grid step must divide 1");
  }
  const Box box(dim, radius);
  const std::size_t m = box.size();
  // C(units + m - 1, m - 1) grid points.
  double count = 1.0;
  for (std::size_t j = 1; j < m; ++j) {
    count *= static_cast<double>(units + j) / static_cast<double>(j);
    if (count > 1e7) throw std::invalid_argument("simplex grid exceeds 10^7 points; box too large");
  }

  std::vector<int> parts(m, 0);
  std::vector<double> g(m, 0.0);
  std::vector<double> mu(m, 0.0);
  double best = -std::numeric_limits<double>::infinity();
  auto evaluate = [&] {
    for (std::size_t i = 0; i < m; ++i) {
      mu[i] = parts[i] * grid_step;
      g[i] = std::sqrt(mu[i]);
    }
    const double v = theta * pnorm_of(mu, p) - rate_from_amplitudes(box, g, boundary);
    best = std::max(best, v);
  };
  // Enumerate compositions of `units` into m nonnegative parts.
  auto recurse = [&](auto&& self, std::size_t pos, int left) -> void {
    if (pos + 1 == m) {
      parts[pos] = left;
      evaluate();
      return;
    }
    for (int k = 0; k <= left; ++k) {
      parts[pos] = k;
      self(self, pos + 1, left - k);
    }
  };
  recurse(recurse, 0, units);
  return best;
}

int BoxRule::radius_for(double theta, double lambda) const {
  const double alpha = std::pow(theta, -1.0 / (2.0 * lambda));
  return std::max(min_radius, static_cast<int>(std::ceil(multiplier * alpha - 1e-9)));
}

std::vector<ScalingPoint> rho_scaling_sweep(const std::vector<double>& thetas, int dim, double p,
                                            const BoxRule& rule) {
  const Regime regime = classify_regime(dim, p);
  if (!regime.subcritical) throw std::invalid_argument("scaling sweep needs d(p-1) < 2p");
  std::vector<ScalingPoint> out;
  out.reserve(thetas.size());
  for (double theta : thetas) {
    if (!(theta > 0.0) || theta > 1.0) throw std::invalid_argument("sweep thetas must lie in (0, 1]");
    ScalingPoint pt;
    pt.theta = theta;
    pt.radius = rule.radius_for(theta, regime.lambda);
    const DiscreteSolveReport rep = solve_rho_discrete(theta, pt.radius, dim, p, Boundary::free);
    pt.value = rep.value;
    pt.compensated = rep.value * std::pow(theta, -1.0 / regime.lambda);
    pt.converged = rep.converged;
    out.push_back(pt);
  }
  return out;
}

}  // namespace silt
