#include "silt/asymptotics.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "silt/lattice.hpp"
#include "silt/random.hpp"

namespace silt {

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::invalid_argument("zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  num_ = num / (g == 0 ? 1 : g);
  den_ = den / (g == 0 ? 1 : g);
}

Rational operator+(Rational a, Rational b) { return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_}; }
Rational operator-(Rational a, Rational b) { return {a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_}; }
Rational operator*(Rational a, Rational b) { return {a.num_ * b.num_, a.den_ * b.den_}; }
Rational operator/(Rational a, Rational b) { return {a.num_ * b.den_, a.den_ * b.num_}; }
bool operator<(Rational a, Rational b) { return a.num_ * b.den_ < b.num_ * a.den_; }

double lambda_exponent(int dim, double p) {
  if (!(p > 1.0)) throw std::invalid_argument("p must exceed 1");
  return (2.0 * p + dim - dim * p) / (2.0 * p);
}

Rational lambda_exponent(Rational dim, Rational p) {
  if (!(Rational(1) < p)) throw std::invalid_argument("p must exceed 1");
  return (Rational(2) * p + dim - dim * p) / (Rational(2) * p);
}

Regime classify_regime(int dim, double p) {
  check_dimension(dim);
  Regime r;
  r.dim = dim;
  r.p = p;
  r.lambda = lambda_exponent(dim, p);
  const double excess = dim * (p - 1.0);
  r.subcritical = excess < 2.0 * p;
  r.strong = excess < 2.0;
  r.critical = excess == 2.0 * p;
  return r;
}

bool speed_window_check(int dim, double p, double a) {
  if (a < 0.0) throw std::invalid_argument("decay exponent must be nonnegative");
  const double lambda = lambda_exponent(dim, p);
  return a > 0.0 && a < 2.0 * lambda / (dim + 2.0);
}

bool deviation_window_check(int dim, double p, double b) {
  if (b < 0.0) throw std::invalid_argument("decay exponent must be nonnegative");
  return b > 0.0 && b < dim * (p - 1.0) / (p * (dim + 2.0));
}

ScaleExponents squeezing_scale_exponents(Rational dim, Rational p, Rational a) {
  const Rational lambda = lambda_exponent(dim, p);
  // theta_t = t^-a; alpha_t = t^(a / (2 lambda)).
  const Rational alpha_exp = a / (Rational(2) * lambda);
  return {Rational(1) - a / lambda, Rational(1) - Rational(2) * alpha_exp};
}

double typical_scale(int dim, double p, double n) {
  check_dimension(dim);
  if (n < 2.0) throw std::invalid_argument("typical scale needs n >= 2");
  if (dim == 1) return std::pow(n, (p + 1.0) / 2.0);
  if (dim == 2) return n * std::pow(std::log(n), p - 1.0);
  return n;
}

namespace {

// e^{-x} I_0(x).
double scaled_bessel_i0(double x) {
  if (x < 500.0) return std::cyl_bessel_i(0.0, x) * std::exp(-x);
  // Hankel expansion; the omitted terms are below 1e-16 relative here.
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 8; ++k) {
    term *= (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * x);
    sum += term;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

}  // namespace

double lattice_green_origin(int dim) {
  check_dimension(dim);
  if (dim < 3) throw std::invalid_argument("the origin Green's function is finite only for d >= 3");
  const double cutoff = 400.0;
  // int_0^cutoff (e^{-x} I_0(x))^d dx with x = e^y, composite Simpson.
  const double y0 = -40.0;
  const double y1 = std::log(cutoff);
  const int n = 40000;
  const double h = (y1 - y0) / n;
  auto f = [dim](double y) {
    const double x = std::exp(y);
    return std::pow(scaled_bessel_i0(x), dim) * x;
  };
  double s = f(y0) + f(y1);
  for (int i = 1; i < n; ++i) s += f(y0 + i * h) * ((i % 2 == 1) ? 4.0 : 2.0);
  double body = s * h / 3.0 + std::exp(y0);

  // Tail: (e^{-x} I_0(x))^d = (2 pi x)^{-d/2} sum_k b_k x^{-k}.
  std::array<double, 6> a{};
  a[0] = 1.0;
  for (std::size_t k = 1; k < a.size(); ++k) {
    a[k] = a[k - 1] * (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * static_cast<double>(k));
  }
  std::array<double, 6> b{};
  b[0] = 1.0;
  for (int m = 1; m < dim + 1; ++m) {
    if (m == 1) {
      b = a;
      continue;
    }
    std::array<double, 6> next{};
    for (std::size_t i = 0; i < b.size(); ++i) {
      for (std::size_t j = 0; i + j < b.size(); ++j) next[i + j] += b[i] * a[j];
    }
    b = next;
  }
  double tail = 0.0;
  const double half_d = 0.5 * dim;
  for (std::size_t k = 0; k < b.size(); ++k) {
    const double e = half_d + static_cast<double>(k) - 1.0;
    tail += b[k] * std::pow(cutoff, -e) / e;
  }
  tail *= std::pow(2.0 * std::numbers::pi, -half_d);
  return dim * (body + tail);
}

double escape_probability(int dim) {
  check_dimension(dim);
  if (dim <= 2) return 0.0;
  return 1.0 / lattice_green_origin(dim);
}

EscapeEstimate escape_probability_mc(int dim, std::int64_t steps, int replicas, std::uint64_t seed) {
  check_dimension(dim);
  if (steps < 1 || replicas < 2) throw std::invalid_argument("need steps >= 1 and replicas >= 2");
  const auto escaped = run_indexed<int>(static_cast<std::size_t>(replicas), [&](std::size_t i) {
    std::mt19937_64 rng(derive_seed(seed, i));
    std::uniform_int_distribution<int> pick(0, 2 * dim - 1);
    Site s{};
    const Site origin{};
    for (std::int64_t k = 0; k < steps; ++k) {
      const int m = pick(rng);
      s[static_cast<std::size_t>(m / 2)] += (m % 2 == 0) ? 1 : -1;
      if (s == origin) return 0;
    }
    return 1;
  });
  double hits = 0.0;
  for (int e : escaped) hits += e;
  const double est = hits / replicas;
  return {est, 2.5758 * std::sqrt(est * (1.0 - est) / replicas)};
}

double step_covariance_det(int dim) {
  check_dimension(dim);
  return std::pow(1.0 / dim, dim);
}

double typical_constant(int dim, double p, double gamma, double sigma_det) {
  check_dimension(dim);
  if (dim == 1) throw std::invalid_argument("no typical-behaviour constant is available for d = 1");
  if (dim == 2) {
    if (!(sigma_det > 0.0)) throw std::invalid_argument("covariance determinant must be positive");
    return std::tgamma(p + 1.0) / std::pow(2.0 * std::numbers::pi * std::sqrt(sigma_det), p - 1.0);
  }
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("escape probability must lie in (0, 1)");
  const double x = 1.0 - gamma;
  double sum = 0.0;
  for (long j = 1;; ++j) {
    const double term = std::pow(static_cast<double>(j), p) * std::pow(x, static_cast<double>(j - 1));
    sum += term;
    const double ratio = std::pow((j + 2.0) / (j + 1.0), p) * x;
    if (ratio < 1.0) {
      const double next = std::pow(j + 1.0, p) * std::pow(x, static_cast<double>(j));
      const double tail = next / (1.0 - ratio);
      if (gamma * gamma * tail < 1e-12) break;
    }
  }
  return gamma * gamma * sum;
}

double ldp_rate(double u, double chi, int dim, double p) {
  const double excess = dim * (p - 1.0);
  if (excess == 0.0) throw std::invalid_argument("rate undefined for d(p-1) = 0");
  if (u < 0.0 || !(chi > 0.0)) throw std::invalid_argument("need u >= 0 and chi > 0");
  return chi * excess / (2.0 * p) * std::pow(u, 2.0 * p / excess);
}

double ldp_tail_exponent(double r, double chi, int dim, double p) {
  const double excess = dim * (p - 1.0);
  if (excess == 0.0) throw std::invalid_argument("rate undefined for d(p-1) = 0");
  return -chi * std::pow(r, 2.0 * p / excess);
}

double optimal_tilt(double r, double rho_c1, int dim, double p) {
  if (!(r > 0.0) || !(rho_c1 > 0.0)) throw std::invalid_argument("need r > 0 and rho_c(1) > 0");
  const double lambda = lambda_exponent(dim, p);
  return std::pow(r * lambda / rho_c1, lambda / (1.0 - lambda));
}

BhkBound bhk_upper_bound(double t, double radius, double alpha, int dim, double p, double solved_sup) {
  check_dimension(dim);
  (void)p;
  if (t < 1.0) throw std::invalid_argument("the density bound needs t >= 1");
  if (!(radius > 0.0) || !(alpha > 0.0)) throw std::invalid_argument("need R > 0 and alpha > 0");
  const auto half = static_cast<std::int64_t>(std::ceil(radius * alpha - 1e-12));
  std::int64_t q = 1;
  for (int i = 0; i < dim; ++i) q *= 2 * half + 1;
  const double qd = static_cast<double>(q);
  BhkBound out;
  out.box_size = q;
  out.leading = t * solved_sup;
  out.error_terms = qd * std::log(2.0 * dim * std::sqrt(8.0 * std::numbers::e) * t) + std::log(qd) + qd / (4.0 * t);
  out.bound = out.leading + out.error_terms;
  out.error_ratio = out.error_terms / std::abs(out.leading);
  return out;
}

}  // namespace silt
