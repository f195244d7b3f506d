#pragma once

// Closed-form exponents, constants, windows and bounds for self-intersection
// local times in the subcritical regime d(p-1) < 2p.

#include <cstdint>

namespace silt {

/// Exact rational number with 64-bit numerator and denominator, always reduced
/// and with positive denominator.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  friend Rational operator+(Rational a, Rational b);
  friend Rational operator-(Rational a, Rational b);
  friend Rational operator*(Rational a, Rational b);
  friend Rational operator/(Rational a, Rational b);
  friend bool operator==(const Rational&, const Rational&) = default;
  friend bool operator<(Rational a, Rational b);

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

struct Regime {
  int dim = 1;
  double p = 2.0;
  double lambda = 0.0;
  /// d(p-1) < 2p, equivalently lambda > 0.
  bool subcritical = false;
  /// d(p-1) < 2, the hypothesis of the matching upper bound.
  bool strong = false;
  /// d(p-1) = 2p.
  bool critical = false;
};

/// lambda = (2p + d - dp) / (2p).
double lambda_exponent(int dim, double p);
Rational lambda_exponent(Rational dim, Rational p);
Regime classify_regime(int dim, double p);

/// True iff theta_t = t^(-a) satisfies (log t / t)^(2 lambda/(d+2)) << theta_t << 1,
/// i.e. 0 < a < 2 lambda / (d + 2).
bool speed_window_check(int dim, double p, double a);
/// True iff r_t = t^(-b) satisfies (log t / t)^(d(p-1)/(p(d+2))) << r_t << 1.
bool deviation_window_check(int dim, double p, double b);

/// Exponents of t in t * theta_t^(1/lambda) and in t / alpha_t^2 for
/// theta_t = t^(-a), alpha_t = theta_t^(-1/(2 lambda)). They coincide exactly.
struct ScaleExponents {
  Rational tilted_speed;
  Rational squeezing_speed;
};
ScaleExponents squeezing_scale_exponents(Rational dim, Rational p, Rational a);

/// a_{d,p}(n): n^((p+1)/2) for d = 1, n (log n)^(p-1) for d = 2, n for d >= 3.
double typical_scale(int dim, double p, double n);

/// G(0) = sum_n P(S_n = 0) for the discrete-time simple walk, d >= 3, from
/// G(0) = d * int_0^inf (e^{-x} I_0(x))^d dx.
double lattice_green_origin(int dim);

/// Probability that the discrete-time walk never returns: 0 for d <= 2 and
/// 1 / G(0) for d >= 3.
double escape_probability(int dim);

struct EscapeEstimate {
  double estimate = 0.0;
  /// Half-width of the 99% normal confidence interval.
  double half_width = 0.0;
};
/// Fraction of walks with no return to the origin within `steps` steps. This
/// overestimates the escape probability by the chance of a later return.
EscapeEstimate escape_probability_mc(int dim, std::int64_t steps, int replicas, std::uint64_t seed);

/// det of the step covariance of the simple walk, (1/d)^d.
double step_covariance_det(int dim);

/// Leading constant C in E ||l_n||_p^p ~ C a_{d,p}(n).
/// d = 2: Gamma(p+1) / (2 pi sqrt(det Sigma))^(p-1).
/// d >= 3: gamma^2 sum_{j>=1} j^p (1-gamma)^(j-1), summed until the tail is below 1e-12.
double typical_constant(int dim, double p, double gamma, double sigma_det);

/// u -> chi d(p-1)/(2p) u^(2p/(d(p-1))).
double ldp_rate(double u, double chi, int dim, double p);
/// -chi r^(2p/(d(p-1))), the exponential decay rate of P(||l_t/t||_p >= r).
double ldp_tail_exponent(double r, double chi, int dim, double p);

/// theta = (r lambda / rho_c1)^(lambda/(1-lambda)).
double optimal_tilt(double r, double rho_c1, int dim, double p);

struct BhkBound {
  double bound = 0.0;
  double leading = 0.0;
  double error_terms = 0.0;
  /// error_terms / |leading|.
  double error_ratio = 0.0;
  std::int64_t box_size = 0;
};
/// t sup + |Q| log(2d sqrt(8e) t) + log|Q| + |Q|/(4t) with |Q| = (2 ceil(R alpha) + 1)^d.
BhkBound bhk_upper_bound(double t, double radius, double alpha, int dim, double p, double solved_sup);

}  // namespace silt
