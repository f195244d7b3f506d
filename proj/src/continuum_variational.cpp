#include "silt/continuum_variational.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "silt/asymptotics.hpp"
#include "silt/lattice.hpp"

namespace silt {

namespace {

constexpr std::array<double, 4> kStartWidths{0.5, 1.0, 2.0, 4.0};

void check_p(double p) {
  if (!(p > 1.0)) throw std::invalid_argument("p must exceed 1, got " + std::to_string(p));
}

void check_profile(const RadialProfile& g) {
  g.grid.validate();
  if (g.values.size() != static_cast<std::size_t>(g.grid.n_points) + 1) {
    throw std::invalid_argument("profile needs n_points + 1 values");
  }
}

// omega_d r_{i+1/2}^(d-1) / h for edge (i, i+1).
std::vector<double> edge_coefficients(const RadialGrid& grid) {
  const double h = grid.spacing();
  const double omega = sphere_surface(grid.dim);
  std::vector<double> c(static_cast<std::size_t>(grid.n_points));
  for (int i = 0; i < grid.n_points; ++i) {
    c[static_cast<std::size_t>(i)] = omega * std::pow((i + 0.5) * h, grid.dim - 1) / h;
  }
  return c;
}

double power_sum(std::span<const double> g, std::span<const double> w, double q) {
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += w[i] * std::pow(std::abs(g[i]), q);
  return s;
}

// 1/2 sum_i c_i (g_{i+1} - g_i)^2 with g beyond the span taken as 0.
double edge_energy(std::span<const double> g, std::span<const double> c) {
  double s = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double next = i + 1 < g.size() ? g[i + 1] : 0.0;
    const double diff = next - g[i];
    s += c[i] * diff * diff;
  }
  return 0.5 * s;
}

// out = K g for the stiffness matrix of edge_energy.
void apply_stiffness(std::span<const double> g, std::span<const double> c, std::span<double> out) {
  const std::size_t n = g.size();
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    if (i > 0) acc += c[i - 1] * (g[i] - g[i - 1]);
    const double next = i + 1 < n ? g[i + 1] : 0.0;
    acc += c[i] * (g[i] - next);
    out[i] = acc;
  }
}

// Solves (W + K) x = v in place (Thomas algorithm).
void solve_metric(std::span<const double> w, std::span<const double> c, std::span<double> v) {
  const std::size_t n = v.size();
  std::vector<double> cp(n);
  double prev_c = 0.0;
  double prev_cp = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double diag = w[i] + c[i] + (i > 0 ? c[i - 1] : 0.0);
    const double lower = i > 0 ? -prev_c : 0.0;
    const double denom = diag - lower * prev_cp;
    const double upper = i + 1 < n ? -c[i] : 0.0;
    cp[i] = upper / denom;
    v[i] = (v[i] - lower * (i > 0 ? v[i - 1] : 0.0)) / denom;
    prev_c = c[i];
    prev_cp = cp[i];
  }
  for (std::size_t i = n - 1; i-- > 0;) v[i] -= cp[i] * v[i + 1];
}

// Minus the dilation-invariant quotient E / ||g||_{2p}^(4p/(d(p-1))), plus a
// penalty (log ||g||_{2p}^{2p})^2 that pins the scale. Without it the grid
// version drifts towards node-scale spikes.
class RadialChiObjective final : public SphereObjective {
 public:
  RadialChiObjective(const RadialGrid& grid, double p)
      : p_(p), exponent_(2.0 / (grid.dim * (p - 1.0))) {
    auto all = radial_weights(grid);
    weights_.assign(all.begin(), all.end() - 1);
    stiffness_ = edge_coefficients(grid);
  }

  std::size_t size() const override { return weights_.size(); }

  double value(std::span<const double> g) const override {
    const double s = power_sum(g, weights_, 2.0 * p_);
    const double l = std::log(s);
    return -edge_energy(g, stiffness_) * std::pow(s, -exponent_) - l * l;
  }

  void gradient(std::span<const double> g, std::span<double> out) const override {
    const double s = power_sum(g, weights_, 2.0 * p_);
    const double e = edge_energy(g, stiffness_);
    apply_stiffness(g, stiffness_, out);
    const double a = std::pow(s, -exponent_);
    const double b = (exponent_ * e * std::pow(s, -exponent_ - 1.0) - 2.0 * std::log(s) / s) * 2.0 * p_;
    for (std::size_t i = 0; i < g.size(); ++i) {
      out[i] = -(a * out[i] - b * weights_[i] * std::pow(std::abs(g[i]), 2.0 * p_ - 2.0) * g[i]);
    }
  }

  std::span<const double> weights() const override { return weights_; }
  void precondition(std::span<double> v) const override { solve_metric(weights_, stiffness_, v); }

 private:
  double p_;
  double exponent_;
  std::vector<double> weights_;
  std::vector<double> stiffness_;
};

RadialProfile profile_from_interior(const RadialGrid& grid, std::span<const double> g) {
  RadialProfile out{grid, std::vector<double>(g.size() + 1, 0.0)};
  for (std::size_t i = 0; i < g.size(); ++i) out.values[i] = std::abs(g[i]);
  return out;
}

std::vector<double> gaussian_start(const RadialGrid& grid, double width) {
  std::vector<double> g(static_cast<std::size_t>(grid.n_points));
  for (int i = 0; i < grid.n_points; ++i) {
    const double r = grid.node(i);
    g[static_cast<std::size_t>(i)] = std::exp(-r * r / (2.0 * width * width));
  }
  return g;
}

double sphere_norm_squared(const RadialProfile& g) { return radial_power_integral(g, 2.0); }

}  // namespace

void RadialGrid::validate() const {
  check_dimension(dim);
  if (!(r_max > 0.0) || !std::isfinite(r_max)) throw std::invalid_argument("r_max must be positive");
  if (n_points < 100) throw std::invalid_argument("radial grid needs at least 100 intervals");
}

double sphere_surface(int dim) {
  check_dimension(dim);
  return 2.0 * std::pow(std::numbers::pi, 0.5 * dim) / std::tgamma(0.5 * dim);
}

std::vector<double> radial_weights(const RadialGrid& grid) {
  grid.validate();
  const double h = grid.spacing();
  const double omega = sphere_surface(grid.dim);
  std::vector<double> w(static_cast<std::size_t>(grid.n_points) + 1);
  w[0] = omega * std::pow(0.5 * h, grid.dim) / grid.dim;
  for (int i = 1; i <= grid.n_points; ++i) w[static_cast<std::size_t>(i)] = omega * std::pow(i * h, grid.dim - 1) * h;
  w.back() *= 0.5;
  return w;
}

double radial_power_integral(const RadialProfile& g, double q) {
  check_profile(g);
  if (!(q > 0.0)) throw std::invalid_argument("power must be positive");
  return power_sum(g.values, radial_weights(g.grid), q);
}

double radial_l2_norm(const RadialProfile& g) { return std::sqrt(radial_power_integral(g, 2.0)); }

double radial_energy(const RadialProfile& g) {
  check_profile(g);
  return edge_energy(g.values, edge_coefficients(g.grid));
}

double evaluate_rate_I(const RadialProfile& f) {
  check_profile(f);
  for (double x : f.values) {
    if (!(x >= 0.0)) throw std::invalid_argument("density must be nonnegative");
  }
  const double mass = power_sum(f.values, radial_weights(f.grid), 1.0);
  if (std::abs(mass - 1.0) > 1e-6) throw std::invalid_argument("density must integrate to 1");
  RadialProfile root = f;
  for (double& x : root.values) x = std::sqrt(x);
  const double fine = radial_energy(root);

  const int half = f.grid.n_points / 2;
  if (half >= 100) {
    RadialGrid coarse_grid{f.grid.dim, 2.0 * half * f.grid.spacing(), half};
    RadialProfile coarse{coarse_grid, std::vector<double>(static_cast<std::size_t>(half) + 1)};
    for (int i = 0; i <= half; ++i) coarse.values[static_cast<std::size_t>(i)] = root.values[2 * static_cast<std::size_t>(i)];
    const double rough = radial_energy(coarse);
    if (rough > 0.0 && fine / rough > 1.5) return std::numeric_limits<double>::infinity();
  }
  return fine;
}

double continuum_objective(const RadialProfile& g, double theta, double p) {
  check_p(p);
  const double s = radial_power_integral(g, 2.0 * p);
  return theta * std::pow(s, 1.0 / p) - radial_energy(g);
}

RadialProfile dilate(const RadialProfile& g, double beta) {
  check_profile(g);
  if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("dilation must be positive");
  RadialProfile out = g;
  out.grid.r_max = g.grid.r_max / beta;
  const double amp = std::pow(beta, 0.5 * g.grid.dim);
  for (double& x : out.values) x *= amp;
  return out;
}

double dilation_objective(const RadialProfile& g, double theta, double p, double beta) {
  check_p(p);
  const int d = g.grid.dim;
  const double a = std::pow(radial_power_integral(g, 2.0 * p), 1.0 / p);
  const double b = 2.0 * radial_energy(g);
  return theta * std::pow(beta, d * (p - 1.0) / p) * a - 0.5 * beta * beta * b;
}

RadialRhoObjective::RadialRhoObjective(const RadialGrid& grid, double theta, double p)
    : grid_(grid), theta_(theta), p_(p) {
  auto all = radial_weights(grid);
  weights_.assign(all.begin(), all.end() - 1);
  stiffness_ = edge_coefficients(grid);
}

std::size_t RadialRhoObjective::size() const { return weights_.size(); }

double RadialRhoObjective::value(std::span<const double> g) const {
  const double s = power_sum(g, weights_, 2.0 * p_);
  return theta_ * std::pow(s, 1.0 / p_) - edge_energy(g, stiffness_);
}

void RadialRhoObjective::gradient(std::span<const double> g, std::span<double> out) const {
  const double s = power_sum(g, weights_, 2.0 * p_);
  apply_stiffness(g, stiffness_, out);
  const double scale = 2.0 * theta_ * std::pow(s, 1.0 / p_ - 1.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    out[i] = scale * weights_[i] * std::pow(std::abs(g[i]), 2.0 * p_ - 2.0) * g[i] - out[i];
  }
}

void RadialRhoObjective::precondition(std::span<double> v) const { solve_metric(weights_, stiffness_, v); }

ContinuumSolveReport solve_rho_continuum(double theta, int dim, double p, const RadialGrid& grid) {
  if (!(theta > 0.0)) throw std::invalid_argument("theta must be positive");
  check_p(p);
  if (grid.dim != dim) throw std::invalid_argument("grid dimension does not match d");
  if (!classify_regime(dim, p).subcritical) throw std::invalid_argument("continuum problem needs d(p-1) < 2p");
  grid.validate();
  const RadialRhoObjective objective(grid, theta, p);
  // Start widths are relative to the box.
  const double scale = grid.r_max / 30.0;

  ContinuumSolveReport best;
  bool have_best = false;
  for (std::size_t k = 0; k < kStartWidths.size(); ++k) {
    SphereAscentResult run = maximize_on_sphere(objective, gaussian_start(grid, kStartWidths[k] * scale));
    RadialProfile profile = profile_from_interior(grid, run.point);
    const double value = continuum_objective(profile, theta, p);
    if (!have_best || value > best.value) {
      best.value = value;
      best.profile = std::move(profile);
      best.iterations = run.iterations;
      best.residual = run.residual;
      best.converged = run.converged;
      best.start_index = static_cast<int>(k);
      have_best = true;
    }
  }
  best.constraint_violation = std::abs(sphere_norm_squared(best.profile) - 1.0);
  return best;
}

ContinuumSolveReport solve_rho_continuum(double theta, int dim, double p) {
  check_p(p);
  if (!(theta > 0.0)) throw std::invalid_argument("theta must be positive");
  // The maximizer is the chi minimizer dilated by beta*; a coarse chi solve
  // fixes that length scale, which varies over orders of magnitude with (d, p).
  const ContinuumSolveReport coarse = solve_chi_direct(dim, p, RadialGrid{dim, 30.0, 600});
  const double lambda = lambda_exponent(dim, p);
  const double beta = std::pow(theta * (dim * (p - 1.0) / p) / (2.0 * coarse.value), 1.0 / (2.0 * lambda));
  return solve_rho_continuum(theta, dim, p, RadialGrid{dim, 30.0 / beta, 3000});
}

ContinuumSolveReport solve_chi_direct(int dim, double p, const RadialGrid& grid) {
  check_p(p);
  if (grid.dim != dim) throw std::invalid_argument("grid dimension does not match d");
  if (!classify_regime(dim, p).subcritical) throw std::invalid_argument("chi is finite only for d(p-1) < 2p");
  grid.validate();
  const RadialChiObjective objective(grid, p);

  ContinuumSolveReport best;
  bool have_best = false;
  for (std::size_t k = 0; k < kStartWidths.size(); ++k) {
    SphereAscentResult run = maximize_on_sphere(objective, gaussian_start(grid, kStartWidths[k]));
    RadialProfile profile = profile_from_interior(grid, run.point);
    const double n2p = std::pow(radial_power_integral(profile, 2.0 * p), 1.0 / (2.0 * p));
    const double beta = std::pow(n2p, -2.0 * p / (dim * (p - 1.0)));
    profile = dilate(profile, beta);
    const double value = radial_energy(profile);
    if (!have_best || value < best.value) {
      best.value = value;
      best.profile = std::move(profile);
      best.iterations = run.iterations;
      best.residual = run.residual;
      best.converged = run.converged;
      best.start_index = static_cast<int>(k);
      have_best = true;
    }
  }
  const double l2 = std::abs(sphere_norm_squared(best.profile) - 1.0);
  const double l2p = std::abs(radial_power_integral(best.profile, 2.0 * p) - 1.0);
  best.constraint_violation = std::max(l2, l2p);
  if (best.constraint_violation > 1e-6) throw std::logic_error("chi solve violated its constraints");
  return best;
}

ContinuumSolveReport solve_chi_direct(int dim, double p) { return solve_chi_direct(dim, p, RadialGrid{dim, 30.0, 3000}); }

double chi_from_rho(double rho1, int dim, double p) {
  check_p(p);
  const double lambda = lambda_exponent(dim, p);
  if (!(lambda > 0.0) || !(lambda < 1.0)) throw std::invalid_argument("needs 0 < lambda < 1");
  if (!(rho1 > 0.0)) throw std::invalid_argument("rho_c(1) must be positive");
  return dim * (p - 1.0) / (2.0 * p) * std::pow(rho1 / lambda, lambda / (lambda - 1.0));
}

double rho_c_formula(double theta, double chi, int dim, double p) {
  check_p(p);
  const double lambda = lambda_exponent(dim, p);
  if (!(lambda > 0.0)) throw std::invalid_argument("needs d(p-1) < 2p");
  if (!(theta > 0.0) || !(chi > 0.0)) throw std::invalid_argument("needs theta > 0 and chi > 0");
  return std::pow(theta, 1.0 / lambda) * lambda *
         std::pow(2.0 * p * chi / (dim * (p - 1.0)), (lambda - 1.0) / lambda);
}

double gn_constant(double chi, int dim, double p) {
  check_p(p);
  check_dimension(dim);
  if (!(chi > 0.0)) throw std::invalid_argument("chi must be positive");
  const double q = p / (p - 1.0);
  return std::pow(chi, -dim / (4.0 * q));
}

double gn_ratio(const RadialProfile& psi, double p) {
  check_p(p);
  const int d = psi.grid.dim;
  const double a = d * (p - 1.0) / (2.0 * p);
  const double top = std::pow(radial_power_integral(psi, 2.0 * p), 1.0 / (2.0 * p));
  const double grad = std::sqrt(2.0 * radial_energy(psi));
  const double l2 = radial_l2_norm(psi);
  if (!(grad > 0.0) || !(l2 > 0.0)) throw std::invalid_argument("profile must be nonconstant and nonzero");
  return top / (std::pow(grad, a) * std::pow(l2, 1.0 - a));
}

double beta_star(double theta, const RadialProfile& g, int dim, double p) {
  check_p(p);
  if (g.grid.dim != dim) throw std::invalid_argument("profile dimension does not match d");
  const double lambda = lambda_exponent(dim, p);
  if (!(lambda > 0.0)) throw std::invalid_argument("needs d(p-1) < 2p");
  const double a = std::pow(radial_power_integral(g, 2.0 * p), 1.0 / p);
  const double b = 2.0 * radial_energy(g);
  if (!(b > 0.0)) throw std::invalid_argument("profile has zero gradient");
  return std::pow(theta * (dim * (p - 1.0) / p) * a / b, 1.0 / (2.0 * lambda));
}

bool is_radially_nonincreasing(const RadialProfile& g, double tolerance) {
  check_profile(g);
  for (std::size_t i = 0; i + 1 < g.values.size(); ++i) {
    if (g.values[i + 1] > g.values[i] + tolerance) return false;
  }
  return true;
}

}  // namespace silt
