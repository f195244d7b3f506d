#include "silt/fem_bridge.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace silt {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

Permutation identity_permutation(int d) {
  Permutation sigma{};
  std::iota(sigma.begin(), sigma.begin() + d, 0);
  return sigma;
}

// sqrt(mu) at every box site, in box order.
std::vector<double> amplitudes_of(const LatticeMeasure& mu) {
  std::vector<double> a(mu.weights.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::sqrt(mu.weights[i]);
  return a;
}

double amplitude_at(const Box& box, std::span<const double> amp, const Site& z) {
  return amp[box.index(box.wrap(z))];
}

// Successive differences of sqrt(mu) along the vertex path of a simplex.
void path_differences(const Box& box, std::span<const double> amp, const SimplexId& s, std::span<double> diff,
                      double& base_value) {
  const int d = box.dim();
  Site v = s.base;
  double prev = amplitude_at(box, amp, v);
  base_value = prev;
  for (int j = 0; j < d; ++j) {
    v[static_cast<std::size_t>(s.sigma[static_cast<std::size_t>(j)])] += 1;
    const double cur = amplitude_at(box, amp, v);
    diff[static_cast<std::size_t>(j)] = cur - prev;
    prev = cur;
  }
}

// Sums f(simplex, diffs, base value) over every simplex of the torus.
template <class F>
void for_each_torus_simplex(const Interpolant& itp, F&& f) {
  const Box& box = itp.measure.box;
  const int d = box.dim();
  const auto amp = amplitudes_of(itp.measure);
  std::vector<double> diff(static_cast<std::size_t>(d));
  for (std::size_t c = 0; c < box.size(); ++c) {
    SimplexId s{box.site(c), identity_permutation(d)};
    do {
      double base = 0.0;
      path_differences(box, amp, s, diff, base);
      f(s, std::span<const double>(diff), base);
    } while (std::next_permutation(s.sigma.begin(), s.sigma.begin() + d));
  }
}

// Value and x-gradient of g at the lattice-space point y.
double eval_piece(const Box& box, std::span<const double> amp, double alpha, std::span<const double> y,
                  std::span<double> grad) {
  const int d = box.dim();
  const SimplexId s = locate_simplex(y);
  std::array<double, kMaxDim> diff{};
  double base = 0.0;
  path_differences(box, amp, s, std::span<double>(diff.data(), static_cast<std::size_t>(d)), base);
  double v = base;
  const double scale = std::pow(alpha, 0.5 * d);
  for (int j = 0; j < d; ++j) {
    const auto axis = static_cast<std::size_t>(s.sigma[static_cast<std::size_t>(j)]);
    v += diff[static_cast<std::size_t>(j)] * (y[axis] - s.base[axis]);
    if (!grad.empty()) grad[axis] = scale * alpha * diff[static_cast<std::size_t>(j)];
  }
  return scale * v;
}

double wrap_relative(double x, double center, double period) {
  double r = std::fmod(x - center, period);
  const double half = 0.5 * period;
  if (r < -half) r += period;
  if (r >= half) r -= period;
  return r;
}

}  // namespace

Permutation simplex_permutation(std::span<const double> y) {
  const int d = static_cast<int>(y.size());
  check_dimension(d);
  std::array<double, kMaxDim> frac{};
  for (int i = 0; i < d; ++i) frac[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(i)] - std::floor(y[static_cast<std::size_t>(i)]);
  Permutation sigma = identity_permutation(d);
  std::stable_sort(sigma.begin(), sigma.begin() + d,
                   [&](int a, int b) { return frac[static_cast<std::size_t>(a)] > frac[static_cast<std::size_t>(b)]; });
  return sigma;
}

SimplexId locate_simplex(std::span<const double> y) {
  SimplexId s;
  for (std::size_t i = 0; i < y.size(); ++i) s.base[i] = static_cast<std::int32_t>(std::floor(y[i]));
  s.sigma = simplex_permutation(y);
  return s;
}

double Interpolant::torus_radius() const { return (2.0 * measure.box.radius() + 1.0) / (2.0 * alpha); }
double Interpolant::torus_center() const { return 0.5 / alpha; }

void Interpolant::validate() const {
  measure.validate();
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("alpha must be positive");
}

std::vector<double> lattice_coordinates(const Interpolant& itp, std::span<const double> x) {
  const int d = itp.dim();
  if (static_cast<int>(x.size()) != d) throw std::invalid_argument("point has the wrong dimension");
  std::vector<double> y(static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = itp.alpha * x[i] + itp.shift[i];
  return y;
}

double interpolant_eval_simplex(const Interpolant& itp, const SimplexId& simplex, std::span<const double> y) {
  const Box& box = itp.measure.box;
  const int d = box.dim();
  const auto amp = amplitudes_of(itp.measure);
  std::vector<double> diff(static_cast<std::size_t>(d));
  double base = 0.0;
  path_differences(box, amp, simplex, diff, base);
  double v = base;
  for (int j = 0; j < d; ++j) {
    const auto axis = static_cast<std::size_t>(simplex.sigma[static_cast<std::size_t>(j)]);
    v += diff[static_cast<std::size_t>(j)] * (y[axis] - simplex.base[axis]);
  }
  return std::pow(itp.alpha, 0.5 * d) * v;
}

double interpolant_eval(const Interpolant& itp, std::span<const double> x) {
  const auto y = lattice_coordinates(itp, x);
  return eval_piece(itp.measure.box, amplitudes_of(itp.measure), itp.alpha, y, {});
}

void interpolant_gradient(const Interpolant& itp, std::span<const double> x, std::span<double> out) {
  const auto y = lattice_coordinates(itp, x);
  eval_piece(itp.measure.box, amplitudes_of(itp.measure), itp.alpha, y, out);
}

double interpolant_energy(const Interpolant& itp) {
  itp.validate();
  double s = 0.0;
  for_each_torus_simplex(itp, [&](const SimplexId&, std::span<const double> diff, double) {
    for (double x : diff) s += x * x;
  });
  return itp.alpha * itp.alpha * 0.5 * s / factorial(itp.dim());
}

double interpolant_l2_norm(const Interpolant& itp) {
  itp.validate();
  const int d = itp.dim();
  double s = 0.0;
  for_each_torus_simplex(itp, [&](const SimplexId&, std::span<const double> diff, double base) {
    // Vertex values along the path; int_T u^2 = |T| (sum v^2 + (sum v)^2) / ((d+1)(d+2)).
    double v = base;
    double sum = v;
    double sq = v * v;
    for (double x : diff) {
      v += x;
      sum += v;
      sq += v * v;
    }
    s += sq + sum * sum;
  });
  return std::sqrt(s / (factorial(d) * (d + 1.0) * (d + 2.0)));
}

CutoffProfile::CutoffProfile(double radius, double epsilon, double center)
    : radius_(radius), epsilon_(epsilon), ramp_(std::pow(radius, epsilon)), center_(center) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("cutoff exponent must lie in (0, 1)");
  if (!(radius > 0.0) || !(ramp_ < radius)) throw std::invalid_argument("cutoff needs R^eps < R");
}

double CutoffProfile::factor(double s) const {
  const double a = std::abs(s - center_);
  if (a <= radius_ - ramp_) return 1.0;
  if (a >= radius_) return 0.0;
  return (radius_ - a) / ramp_;
}

double CutoffProfile::factor_slope(double s) const {
  const double a = std::abs(s - center_);
  if (a <= radius_ - ramp_ || a >= radius_) return 0.0;
  return (s > center_ ? -1.0 : 1.0) / ramp_;
}

double CutoffProfile::value(std::span<const double> x) const {
  double v = 1.0;
  for (double s : x) v *= factor(s);
  return v;
}

void CutoffProfile::gradient(std::span<const double> x, std::span<double> out) const {
  for (std::size_t i = 0; i < x.size(); ++i) {
    double g = factor_slope(x[i]);
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (j != i) g *= factor(x[j]);
    }
    out[i] = g;
  }
}

CutoffProfile torus_cutoff(const Interpolant& itp, double epsilon) {
  return CutoffProfile(itp.torus_radius(), epsilon, itp.torus_center());
}

QuadratureField sample_interpolant(const Interpolant& itp, int refinement) {
  itp.validate();
  if (refinement < 1) throw std::invalid_argument("refinement must be at least 1");
  const int d = itp.dim();
  const int L = itp.measure.box.radius();
  const std::int64_t per_axis = static_cast<std::int64_t>(refinement) * (2 * L + 1);
  std::int64_t cells = 1;
  for (int i = 0; i < d; ++i) cells *= per_axis;
  const auto perms = static_cast<std::int64_t>(factorial(d));
  if (cells * perms > 50'000'000) throw std::invalid_argument("quadrature grid too large");

  QuadratureField f;
  f.dim = d;
  f.fine_step = 1.0 / (refinement * itp.alpha);
  const auto n = static_cast<std::size_t>(cells * perms);
  f.positions.resize(n * static_cast<std::size_t>(d));
  f.gradients.resize(n * static_cast<std::size_t>(d));
  f.values.resize(n);
  f.weights.assign(n, std::pow(f.fine_step, d) / static_cast<double>(perms));

  const auto amp = amplitudes_of(itp.measure);
  std::size_t q = 0;
  std::vector<double> x(static_cast<std::size_t>(d));
  std::vector<double> y(static_cast<std::size_t>(d));
  for (std::int64_t c = 0; c < cells; ++c) {
    std::array<std::int64_t, kMaxDim> j{};
    std::int64_t rest = c;
    for (int i = 0; i < d; ++i) {
      j[static_cast<std::size_t>(i)] = rest % per_axis;
      rest /= per_axis;
    }
    Permutation sigma = identity_permutation(d);
    do {
      // Centroid of the Kuhn simplex: axis sigma[r] sits at (d - r)/(d + 1) of the subcube.
      for (int r = 0; r < d; ++r) {
        const auto axis = static_cast<std::size_t>(sigma[static_cast<std::size_t>(r)]);
        const double y = -L + (static_cast<double>(j[axis]) + (d - r) / (d + 1.0)) / refinement;
        x[axis] = y / itp.alpha;
      }
      std::copy(x.begin(), x.end(), f.positions.begin() + static_cast<std::ptrdiff_t>(q * d));
      for (int i = 0; i < d; ++i) y[static_cast<std::size_t>(i)] = itp.alpha * x[static_cast<std::size_t>(i)] + itp.shift[static_cast<std::size_t>(i)];
      f.values[q] = eval_piece(itp.measure.box, amp, itp.alpha, y,
                               std::span<double>(f.gradients).subspan(q * d, static_cast<std::size_t>(d)));
      ++q;
    } while (std::next_permutation(sigma.begin(), sigma.begin() + d));
  }
  return f;
}

QuadratureField apply_cutoff(const QuadratureField& field, const CutoffProfile& cut) {
  QuadratureField out = field;
  const auto d = static_cast<std::size_t>(field.dim);
  std::vector<double> grad_psi(d);
  for (std::size_t q = 0; q < field.size(); ++q) {
    const std::span<const double> x(field.positions.data() + q * d, d);
    const double psi = cut.value(x);
    cut.gradient(x, grad_psi);
    for (std::size_t i = 0; i < d; ++i) {
      out.gradients[q * d + i] = psi * field.gradients[q * d + i] + field.values[q] * grad_psi[i];
    }
    out.values[q] = psi * field.values[q];
  }
  return out;
}

double field_power_integral(const QuadratureField& field, double q) {
  if (!(q > 0.0)) throw std::invalid_argument("power must be positive");
  double s = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) s += field.weights[i] * std::pow(std::abs(field.values[i]), q);
  return s;
}

double field_l2_norm(const QuadratureField& field) { return std::sqrt(field_power_integral(field, 2.0)); }

double field_energy(const QuadratureField& field) {
  const auto d = static_cast<std::size_t>(field.dim);
  double s = 0.0;
  for (std::size_t q = 0; q < field.size(); ++q) {
    double g2 = 0.0;
    for (std::size_t i = 0; i < d; ++i) g2 += field.gradients[q * d + i] * field.gradients[q * d + i];
    s += field.weights[q] * g2;
  }
  return 0.5 * s;
}

double field_objective(const QuadratureField& field, double theta, double p) {
  if (!(p > 1.0)) throw std::invalid_argument("p must exceed 1");
  return theta * std::pow(field_power_integral(field, 2.0 * p), 1.0 / p) - field_energy(field);
}

QuadratureField normalize_embed(const Interpolant& itp, const CutoffProfile& cut, int refinement) {
  QuadratureField h = apply_cutoff(sample_interpolant(itp, refinement), cut);
  const double n = field_l2_norm(h);
  if (!(n > 0.0)) throw std::invalid_argument("cutoff interpolant vanishes identically");
  for (double& v : h.values) v /= n;
  for (double& g : h.gradients) g /= n;
  return h;
}

ShiftSelection select_shift(const Interpolant& itp, double epsilon, double p, int refinement) {
  if (!(p > 1.0)) throw std::invalid_argument("p must exceed 1");
  const QuadratureField field = sample_interpolant(itp, refinement);
  const CutoffProfile cut = torus_cutoff(itp, epsilon);
  const auto d = static_cast<std::size_t>(field.dim);
  const double radius = cut.radius();
  const double inner = radius - cut.ramp();
  const double center = cut.center();
  const double period = 2.0 * radius;
  const std::int64_t per_axis = static_cast<std::int64_t>(refinement) * (2 * itp.measure.box.radius() + 1);

  std::vector<double> mass(field.size());
  double total = 0.0;
  for (std::size_t q = 0; q < field.size(); ++q) {
    mass[q] = field.weights[q] * std::pow(std::abs(field.values[q]), 2.0 * p);
    total += mass[q];
  }

  auto in_annulus = [&](std::size_t q, const std::array<std::int64_t, kMaxDim>& s) {
    double m = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double x = field.positions[q * d + i] - static_cast<double>(s[i]) * field.fine_step;
      m = std::max(m, std::abs(wrap_relative(x, center, period)));
    }
    return m > inner;
  };

  // Share of quadrature points in the annulus; the average of the annulus
  // mass over all fine shifts equals this share of the total.
  const std::array<std::int64_t, kMaxDim> zero{};
  std::size_t annulus_points = 0;
  for (std::size_t q = 0; q < field.size(); ++q) annulus_points += in_annulus(q, zero) ? 1 : 0;
  const double bound = total * static_cast<double>(annulus_points) / static_cast<double>(field.size());

  ShiftSelection out;
  out.total_mass = total;
  out.bound = bound;
  auto try_shift = [&](const std::array<std::int64_t, kMaxDim>& s) {
    ++out.candidates_tried;
    double a = 0.0;
    for (std::size_t q = 0; q < field.size(); ++q) {
      if (in_annulus(q, s)) a += mass[q];
    }
    if (a <= bound * (1.0 + 1e-12)) {
      out.annulus_mass = a;
      for (std::size_t i = 0; i < d; ++i) out.shift[i] = static_cast<double>(s[i]) / refinement;
      return true;
    }
    return false;
  };
  auto scan = [&](std::int64_t step) {
    std::array<std::int64_t, kMaxDim> s{};
    while (true) {
      if (try_shift(s)) return true;
      std::size_t i = 0;
      for (; i < d; ++i) {
        s[i] += step;
        if (s[i] < per_axis) break;
        s[i] = 0;
      }
      if (i == d) return false;
    }
  };

  const auto coarse = std::max<std::int64_t>(
      1, std::llround(0.5 * cut.ramp() / field.fine_step));
  if (scan(coarse)) return out;
  out.used_full_scan = true;
  if (coarse > 1 && scan(1)) return out;
  throw std::logic_error("no torus shift satisfies the averaging bound");
}

PointwiseBoundReport pointwise_2p_bound_check(const Interpolant& itp, int samples, double p, std::uint64_t seed) {
  itp.validate();
  if (samples < 1) throw std::invalid_argument("need at least one sample");
  if (!(p >= 1.0)) throw std::invalid_argument("p must be at least 1");
  const Box& box = itp.measure.box;
  const int d = box.dim();
  const int L = box.radius();
  const auto amp = amplitudes_of(itp.measure);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-L, L + 1.0);
  std::vector<double> y(static_cast<std::size_t>(d));
  std::vector<double> diff(static_cast<std::size_t>(d));
  const double factor = std::pow(static_cast<double>(d), 2.0 * p);

  PointwiseBoundReport r;
  r.samples = samples;
  for (int k = 0; k < samples; ++k) {
    for (double& c : y) c = unif(rng);
    const SimplexId s = locate_simplex(y);
    double base = 0.0;
    path_differences(box, amp, s, diff, base);
    double lin = 0.0;
    double sq = 0.0;
    for (int j = 0; j < d; ++j) {
      const auto axis = static_cast<std::size_t>(s.sigma[static_cast<std::size_t>(j)]);
      lin += diff[static_cast<std::size_t>(j)] * (y[axis] - s.base[axis]);
      sq += diff[static_cast<std::size_t>(j)] * diff[static_cast<std::size_t>(j)];
    }
    const double lhs = std::pow(std::abs(lin), 2.0 * p);
    const double rhs = factor * sq;
    if (lhs > rhs * (1.0 + 1e-12)) ++r.violations;
    if (rhs > 0.0) r.max_ratio = std::max(r.max_ratio, lhs / rhs);
  }
  return r;
}

}  // namespace silt
