#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "silt/lattice.hpp"
#include "silt/random.hpp"
#include "silt/walk.hpp"

using namespace silt;

namespace {

// E ||l_t||_2^2 = 2 int_0^t (t - r) P(X_r = 0) dr, with P(X_r = 0) = (e^-r I_0(r))^d
// for the continuous-time walk (each coordinate jumps at rate 1).
double exact_second_moment_continuous(int d, double t) {
  const int n = 20000;
  const double h = t / n;
  auto f = [&](double r) { return (t - r) * std::pow(std::cyl_bessel_i(0.0, r) * std::exp(-r), d); };
  double s = f(0.0) + f(t);
  for (int i = 1; i < n; ++i) s += f(i * h) * (i % 2 ? 4.0 : 2.0);
  return 2.0 * s * h / 3.0;
}

// Same identity in discrete time, by enumerating all 2^n paths of the 1-d walk.
double exact_second_moment_discrete_1d(int n) {
  double total = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    std::vector<int> pos{0};
    for (int k = 0; k + 1 < n; ++k) pos.push_back(pos.back() + ((mask >> k) & 1u ? 1 : -1));
    double s = 0.0;
    for (std::size_t i = 0; i < pos.size(); ++i) {
      for (std::size_t j = 0; j < pos.size(); ++j) s += pos[i] == pos[j] ? 1.0 : 0.0;
    }
    total += s;
  }
  // The top bit of the mask is unused, so every path appears twice.
  return total / static_cast<double>(1u << n);
}

}  // namespace

TEST_SUITE("lattice-walk") {
  TEST_CASE("box indexing round trips and wraps with period 2R+1") {
    const Box box(3, 2);
    CHECK(box.size() == 125u);
    for (std::size_t i = 0; i < box.size(); ++i) CHECK(box.index(box.site(i)) == i);
    Site s{};
    s[0] = 3;
    s[1] = -7;
    const Site w = box.wrap(s);
    CHECK(w[0] == -2);
    CHECK(w[1] == -2);
    CHECK(box.contains(w));
    CHECK_THROWS_AS(Box(0, 1), std::invalid_argument);
    CHECK_THROWS_AS(Box(2, -1), std::invalid_argument);
  }

  TEST_CASE("seed splitting is deterministic and distinct") {
    CHECK(derive_seed(42, 0) == derive_seed(42, 0));
    CHECK(derive_seed(42, 0) != derive_seed(42, 1));
    CHECK(derive_seed(42, 0) != derive_seed(43, 0));
    const auto v = run_indexed<std::uint64_t>(100, [](std::size_t i) { return derive_seed(1, i); });
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == derive_seed(1, i));
  }

  TEST_CASE("total local time equals the horizon") {
    for (int d = 1; d <= 4; ++d) {
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const LocalTimeField c = simulate_walk({d, 37.5, Clock::continuous, seed});
        CHECK(local_time_mass(c) == doctest::Approx(37.5).epsilon(1e-12));
        CHECK(local_time_pnorm(c, 1.0) == doctest::Approx(37.5).epsilon(1e-12));
        const LocalTimeField k = simulate_walk({d, 50.0, Clock::discrete, seed});
        CHECK(local_time_mass(k) == 50.0);
      }
    }
  }

  TEST_CASE("the origin is always visited first") {
    const LocalTimeField f = simulate_walk({2, 1.0, Clock::discrete, 5});
    REQUIRE(f.entries.size() == 1u);
    CHECK(f.entries.at(Site{}) == 1.0);
  }

  TEST_CASE("same seed gives the same path") {
    const LocalTimeField a = simulate_walk({3, 100.0, Clock::continuous, 9});
    const LocalTimeField b = simulate_walk({3, 100.0, Clock::continuous, 9});
    CHECK(a.entries == b.entries);
  }

  TEST_CASE("periodization never decreases p-norms and preserves mass") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      const LocalTimeField f = simulate_walk({1 + static_cast<int>(seed % 3), 30.0, Clock::continuous, seed});
      for (int r : {1, 2, 4, 8}) {
        const PeriodizedField pf = periodize(f, r);
        double m = 0.0;
        for (double x : pf.entries) m += x;
        CHECK(m == doctest::Approx(30.0).epsilon(1e-12));
        for (double p : {1.5, 2.0, 3.0}) CHECK(local_time_pnorm(f, p) <= periodized_pnorm(pf, p) * (1.0 + 1e-12));
      }
    }
    CHECK_THROWS_AS(periodize(simulate_walk({1, 1.0, Clock::continuous, 0}), 0), std::invalid_argument);
  }

  TEST_CASE("rescaled profile is a probability density") {
    const LocalTimeField f = simulate_walk({2, 200.0, Clock::continuous, 3});
    const RescaledProfile prof = rescaled_profile(f, 0.5);
    CHECK(prof.integral() == doctest::Approx(1.0).epsilon(1e-12));
    const std::vector<double> x{0.1, 0.1};
    // Cell of side 2 containing x is the origin cell.
    CHECK(prof.evaluate(x) == doctest::Approx(0.25 * f.entries.at(Site{}) / 200.0));
    CHECK_THROWS_AS(rescaled_profile(f, 0.0), std::invalid_argument);
  }

  TEST_CASE("p-norm argument checks") {
    const LocalTimeField f = simulate_walk({1, 10.0, Clock::continuous, 1});
    CHECK_THROWS_AS(local_time_pnorm(f, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(simulate_walk({1, 2.5, Clock::discrete, 1}), std::invalid_argument);
    CHECK_THROWS_AS(simulate_walk({9, 1.0, Clock::continuous, 1}), std::invalid_argument);
  }

  TEST_CASE("second moment matches exact enumeration in discrete time") {
    const int n = 12;
    const double exact = exact_second_moment_discrete_1d(n);
    const MonteCarloEstimate est = estimate_moment({1, double(n), Clock::discrete, 77}, 2.0, 20000);
    CHECK(std::abs(est.mean - exact) < 4.0 * est.std_error);
  }

  TEST_CASE("second moment matches the return-probability integral in continuous time") {
    for (int d : {1, 2, 3}) {
      const double t = 20.0;
      const double exact = exact_second_moment_continuous(d, t);
      const MonteCarloEstimate est = estimate_moment({d, t, Clock::continuous, 123}, 2.0, 20000);
      CHECK(std::abs(est.mean - exact) < 4.0 * est.std_error);
    }
  }

  TEST_CASE("exponential moment estimate is reproducible and bounded by theta") {
    const WalkConfig cfg{1, 10.0, Clock::continuous, 2024};
    const MonteCarloEstimate a = estimate_exp_moment(cfg, 2.0, 1.0, 500);
    const MonteCarloEstimate b = estimate_exp_moment(cfg, 2.0, 1.0, 500);
    CHECK(a.mean == b.mean);
    CHECK(a.mean > 0.0);
    CHECK(a.mean <= 1.0);
    const MonteCarloEstimate one = estimate_exp_moment(cfg, 1.0, 1.0, 100);
    CHECK(one.mean == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("origin visits agree with the local time at the origin") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const WalkConfig cfg{2, 500.0, Clock::discrete, seed};
      CHECK(static_cast<double>(count_origin_visits(cfg)) == simulate_walk(cfg).entries.at(Site{}));
    }
  }
}
