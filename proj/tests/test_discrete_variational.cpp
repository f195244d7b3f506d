#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "silt/discrete_variational.hpp"

using namespace silt;

namespace {

LatticeMeasure random_measure(int dim, int radius, std::mt19937_64& rng) {
  const Box box(dim, radius);
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(box.size());
  for (double& x : w) x = expo(rng);
  return LatticeMeasure::from_weights(dim, radius, std::move(w));
}

// Independent edge enumeration: every site and every +e_a neighbour in Z^d,
// with sites outside the box carrying zero mass.
double free_rate_by_edges(const LatticeMeasure& mu) {
  const Box& box = mu.box;
  const int d = box.dim();
  const int r = box.radius();
  const Box outer(d, r + 1);
  double s = 0.0;
  for (std::size_t i = 0; i < outer.size(); ++i) {
    const Site z = outer.site(i);
    for (int a = 0; a < d; ++a) {
      Site y = z;
      y[static_cast<std::size_t>(a)] += 1;
      const double gz = box.contains(z) ? std::sqrt(mu.weights[box.index(z)]) : 0.0;
      const double gy = box.contains(y) ? std::sqrt(mu.weights[box.index(y)]) : 0.0;
      s += (gz - gy) * (gz - gy);
    }
  }
  return 0.5 * s;
}

}  // namespace

TEST_SUITE("discrete-variational") {
  TEST_CASE("rate of a point mass") {
    for (int d = 1; d <= 3; ++d) {
      CHECK(dv_rate_free(LatticeMeasure::point_mass(d, 2)) == doctest::Approx(d));
      CHECK(dv_rate_periodic(LatticeMeasure::point_mass(d, 2)) == doctest::Approx(d));
      CHECK(dv_rate_free(LatticeMeasure::point_mass(d, 0)) == doctest::Approx(d));
      CHECK(dv_rate_periodic(LatticeMeasure::point_mass(d, 0)) == 0.0);
    }
  }

  TEST_CASE("uniform measure has zero periodic rate") {
    for (int d = 1; d <= 3; ++d) CHECK(dv_rate_periodic(LatticeMeasure::uniform(d, 2)) == doctest::Approx(0.0).epsilon(1e-15));
  }

  TEST_CASE("free rate agrees with an edge-by-edge sum") {
    std::mt19937_64 rng(3);
    for (int d = 1; d <= 3; ++d) {
      for (int k = 0; k < 10; ++k) {
        const LatticeMeasure mu = random_measure(d, 1 + k % 3, rng);
        CHECK(dv_rate_free(mu) == doctest::Approx(free_rate_by_edges(mu)).epsilon(1e-12));
        CHECK(dv_rate_periodic(mu) <= dv_rate_free(mu) + 1e-12);
      }
    }
  }

  TEST_CASE("p-norm and measure validation") {
    const LatticeMeasure u = LatticeMeasure::uniform(1, 1);
    CHECK(measure_pnorm(u, 2.0) == doctest::Approx(std::sqrt(3.0) / 3.0));
    CHECK_THROWS_AS(measure_pnorm(u, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(LatticeMeasure::from_weights(1, 1, {0.0, 0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(LatticeMeasure::from_weights(1, 1, {1.0, -1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(LatticeMeasure::from_weights(1, 1, {1.0}), std::invalid_argument);
    LatticeMeasure bad{Box(1, 1), {0.5, 0.5, 0.5}};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  }

  TEST_CASE("solver matches the simplex grid oracle on Q_1") {
    for (double theta : {0.5, 1.0, 2.0}) {
      const DiscreteSolveReport rep = solve_rho_discrete(theta, 1, 1, 2.0);
      const double grid = brute_force_rho(theta, 1, 1, 2.0, 0.02);
      CHECK(rep.value >= grid - 1e-3);
      CHECK(rep.value <= theta);
      CHECK(rep.converged);
    }
  }

  TEST_CASE("solver value dominates random measures") {
    std::mt19937_64 rng(11);
    for (int d = 1; d <= 2; ++d) {
      const DiscreteSolveReport rep = solve_rho_discrete(1.0, 2, d, 2.0);
      for (int k = 0; k < 200; ++k) {
        CHECK(discrete_objective(random_measure(d, 2, rng), 1.0, 2.0, Boundary::free) <= rep.value + 1e-10);
      }
    }
  }

  TEST_CASE("value is monotone in theta and in the box") {
    double prev = -1e300;
    for (double theta : {0.25, 0.5, 1.0, 2.0}) {
      const double v = solve_rho_discrete(theta, 3, 1, 2.0).value;
      CHECK(v >= prev);
      CHECK(v <= theta);
      prev = v;
    }
    const double small = solve_rho_discrete(0.5, 2, 2, 2.0).value;
    const double large = solve_rho_discrete(0.5, 4, 2, 2.0).value;
    CHECK(large >= small - 1e-10);
  }

  TEST_CASE("periodic boundary value is at least the free one") {
    for (int d = 1; d <= 2; ++d) {
      const double f = solve_rho_discrete(1.0, 2, d, 2.0, Boundary::free).value;
      const double p = solve_rho_discrete(1.0, 2, d, 2.0, Boundary::periodic).value;
      CHECK(p >= f - 1e-9);
      CHECK(p <= 1.0 + 1e-12);
    }
  }

  TEST_CASE("maximizer is a probability measure") {
    const DiscreteSolveReport rep = solve_rho_discrete(1.5, 3, 2, 3.0);
    CHECK_NOTHROW(rep.maximizer.validate());
    CHECK(rep.value == doctest::Approx(discrete_objective(rep.maximizer, 1.5, 3.0, Boundary::free)));
  }

  TEST_CASE("brute force refuses large grids") {
    CHECK_THROWS_AS(brute_force_rho(1.0, 3, 2, 2.0, 0.02), std::invalid_argument);
    CHECK_THROWS_AS(brute_force_rho(1.0, 1, 1, 2.0, 0.3), std::invalid_argument);
  }

  TEST_CASE("box rule follows theta^(-1/(2 lambda))") {
    const BoxRule rule;
    // d=1, p=2: lambda = 3/4, alpha = theta^(-2/3).
    CHECK(rule.radius_for(0.02, 0.75) == static_cast<int>(std::ceil(6.0 * std::pow(0.02, -2.0 / 3.0))));
    CHECK(rule.radius_for(1.0, 0.75) == 6);
  }

  TEST_CASE("scaling sweep rejects theta above one") {
    CHECK_THROWS_AS(rho_scaling_sweep({1.5}, 1, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(rho_scaling_sweep({0.5}, 3, 4.0), std::invalid_argument);
  }
}
