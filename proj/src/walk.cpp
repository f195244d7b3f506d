#include "silt/walk.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "silt/random.hpp"

namespace silt {

namespace {

// Neumaier accumulator.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + carry; }
};

void check_field(const LocalTimeField& field) { check_dimension(field.dim); }

void step_neighbor(Site& s, int dim, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, 2 * dim - 1);
  const int k = pick(rng);
  s[static_cast<std::size_t>(k / 2)] += (k % 2 == 0) ? 1 : -1;
}

}  // namespace

void WalkConfig::validate() const {
  check_dimension(dim);
  if (!(time_horizon > 0.0) || !std::isfinite(time_horizon)) {
    throw std::invalid_argument("time horizon must be positive and finite");
  }
  if (clock == Clock::discrete) {
    if (time_horizon < 1.0 || std::floor(time_horizon) != time_horizon) {
      throw std::invalid_argument("discrete clock needs an integer step count n >= 1");
    }
  }
}

std::int64_t WalkConfig::steps() const { return static_cast<std::int64_t>(time_horizon); }

LocalTimeField simulate_walk(const WalkConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  LocalTimeField field;
  field.dim = cfg.dim;
  Site position{};

  if (cfg.clock == Clock::discrete) {
    const std::int64_t n = cfg.steps();
    for (std::int64_t k = 0; k < n; ++k) {
      field.entries[position] += 1.0;
      step_neighbor(position, cfg.dim, rng);
    }
    field.total = static_cast<double>(n);
    return field;
  }

  const double t = cfg.time_horizon;
  std::exponential_distribution<double> holding(static_cast<double>(cfg.dim));
  std::unordered_map<Site, CompensatedSum, SiteHash> acc;
  CompensatedSum elapsed;
  while (true) {
    const double h = holding(rng);
    const double remaining = (t - elapsed.sum) - elapsed.carry;
    if (h >= remaining) {
      acc[position].add(remaining);
      break;
    }
    acc[position].add(h);
    elapsed.add(h);
    step_neighbor(position, cfg.dim, rng);
  }
  field.entries.reserve(acc.size());
  for (const auto& [site, s] : acc) field.entries.emplace(site, s.value());
  field.total = t;
  return field;
}

double local_time_pnorm_power(const LocalTimeField& field, double p) {
  check_field(field);
  if (!(p > 0.0)) throw std::invalid_argument("p must be positive");
  CompensatedSum s;
  for (const auto& [site, v] : field.entries) s.add(std::pow(v, p));
  return s.value();
}

double local_time_pnorm(const LocalTimeField& field, double p) {
  return std::pow(local_time_pnorm_power(field, p), 1.0 / p);
}

double local_time_mass(const LocalTimeField& field) {
  CompensatedSum s;
  for (const auto& [site, v] : field.entries) s.add(v);
  return s.value();
}

PeriodizedField periodize(const LocalTimeField& field, int radius) {
  check_field(field);
  if (radius < 1) throw std::invalid_argument("periodization radius must be >= 1");
  PeriodizedField out{Box(field.dim, radius), {}, field.total};
  out.entries.assign(out.box.size(), 0.0);
  for (const auto& [site, v] : field.entries) out.entries[out.box.index(out.box.wrap(site))] += v;
  return out;
}

double periodized_pnorm(const PeriodizedField& field, double p) {
  if (!(p > 0.0)) throw std::invalid_argument("p must be positive");
  CompensatedSum s;
  for (double v : field.entries) {
    if (v > 0.0) s.add(std::pow(v, p));
  }
  return std::pow(s.value(), 1.0 / p);
}

RescaledProfile rescaled_profile(const LocalTimeField& field, double alpha) {
  check_field(field);
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (field.entries.empty() || !(field.total > 0.0)) {
    throw std::invalid_argument("cannot rescale an empty local-time field");
  }
  RescaledProfile out;
  out.dim = field.dim;
  out.alpha = alpha;
  const double scale = std::pow(alpha, field.dim) / field.total;
  out.heights.reserve(field.entries.size());
  for (const auto& [site, v] : field.entries) out.heights.emplace(site, scale * v);
  return out;
}

double RescaledProfile::evaluate(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim) throw std::invalid_argument("point dimension mismatch");
  Site cell{};
  for (int i = 0; i < dim; ++i) {
    cell[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(std::floor(x[static_cast<std::size_t>(i)] * alpha));
  }
  const auto it = heights.find(cell);
  return it == heights.end() ? 0.0 : it->second;
}

double RescaledProfile::integral() const {
  CompensatedSum s;
  for (const auto& [site, v] : heights) s.add(v);
  return s.value() * std::pow(alpha, -dim);
}

MonteCarloEstimate estimate_moment(const WalkConfig& cfg, double p, int replicas) {
  cfg.validate();
  if (replicas < 2) throw std::invalid_argument("estimate_moment needs at least 2 replicas");
  if (!(p > 0.0)) throw std::invalid_argument("p must be positive");
  const auto values = run_indexed<double>(static_cast<std::size_t>(replicas), [&](std::size_t i) {
    WalkConfig c = cfg;
    c.seed = derive_seed(cfg.seed, i);
    return local_time_pnorm_power(simulate_walk(c), p);
  });
  // Welford, in replica order.
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t k = 0;
  for (double x : values) {
    ++k;
    const double delta = x - mean;
    mean += delta / static_cast<double>(k);
    m2 += delta * (x - mean);
  }
  const double var = m2 / static_cast<double>(k - 1);
  return {mean, std::sqrt(var / static_cast<double>(k))};
}

MonteCarloEstimate estimate_exp_moment(const WalkConfig& cfg, double p, double theta, int replicas) {
  cfg.validate();
  if (replicas < 2) throw std::invalid_argument("estimate_exp_moment needs at least 2 replicas");
  if (theta < 0.0) throw std::invalid_argument("theta must be nonnegative");
  const auto exponents = run_indexed<double>(static_cast<std::size_t>(replicas), [&](std::size_t i) {
    WalkConfig c = cfg;
    c.seed = derive_seed(cfg.seed, i);
    return theta * local_time_pnorm(simulate_walk(c), p);
  });
  const double top = *std::max_element(exponents.begin(), exponents.end());
  CompensatedSum sum;
  CompensatedSum sum_sq;
  for (double x : exponents) {
    const double w = std::exp(x - top);
    sum.add(w);
    sum_sq.add(w * w);
  }
  const auto n = static_cast<double>(replicas);
  const double mean = sum.value() / n;
  const double var = std::max(0.0, (sum_sq.value() / n - mean * mean) * n / (n - 1.0));
  const double t = cfg.time_horizon;
  return {(top + std::log(mean)) / t, std::sqrt(var / n) / mean / t};
}

std::int64_t count_origin_visits(const WalkConfig& cfg) {
  cfg.validate();
  if (cfg.clock != Clock::discrete) throw std::invalid_argument("origin visit counting uses the discrete clock");
  std::mt19937_64 rng(cfg.seed);
  Site position{};
  const Site origin{};
  std::int64_t visits = 0;
  const std::int64_t n = cfg.steps();
  for (std::int64_t k = 0; k < n; ++k) {
    if (position == origin) ++visits;
    step_neighbor(position, cfg.dim, rng);
  }
  return visits;
}

}  // namespace silt
