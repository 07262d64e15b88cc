#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dimc/estimators.hpp"
#include "dimc/models/gaussian.hpp"

using namespace dimc;

TEST_CASE("gaussian densities") {
  const auto m = build_gaussian(1.0);
  CHECK(m.log_prior(0.0).value == doctest::Approx(-0.5 * std::log(2 * std::numbers::pi)));
  CHECK(m.log_f(0.0, 0.0).value == 0.0);
  const double theta = 0.4;
  CHECK(m.aux_log_density(theta + 1.0 / 3, theta).value ==
        doctest::Approx(-0.5 * std::log(2 * std::numbers::pi * 1.0)));
  const auto m2 = build_gaussian(0.25);
  CHECK(m2.aux_log_density(1.0 / 3, 0.0).value ==
        doctest::Approx(-0.5 * std::log(2 * std::numbers::pi * 0.25)));
  CHECK(m.observed() == 1.0);
}

TEST_CASE("gaussian posterior") {
  const auto m = build_gaussian(1.0);
  CHECK(m.posterior_mean() == doctest::Approx(0.5));
  CHECK(m.posterior_variance() == doctest::Approx(0.5));
  const auto m2 = build_gaussian(0.1);
  CHECK(m2.posterior_mean() == doctest::Approx(1.0 / 1.1));
  CHECK(m2.posterior_variance() == doctest::Approx(0.1 / 1.1));
}

TEST_CASE("gaussian likelihood sampler mean") {
  GaussianSpec s;
  s.sigma2 = 0.25;
  const GaussianModel m(s);
  RandomStream r(7);
  const int n = 100000;
  double sum = 0;
  for (int i = 0; i < n; ++i) sum += m.sample_likelihood(2.0, r);
  CHECK(std::abs(sum / n - 2.0) < 3 * 0.5 / std::sqrt(n));
}

TEST_CASE("gaussian auxiliary is offset by a third") {
  const auto m = build_gaussian(0.5);
  RandomStream r(8);
  const int n = 100000;
  double sum = 0;
  for (int i = 0; i < n; ++i) sum += m.sample_aux(1.0, r);
  CHECK(std::abs(sum / n - 4.0 / 3) < 4 * std::sqrt(0.5 / n));
}

TEST_CASE("gaussian normalizer is theta-free and proposal symmetric") {
  const auto m = build_gaussian(0.3);
  CHECK(*m.log_normalizer(-2.0) == *m.log_normalizer(5.0));
  RandomStream r(9);
  for (int i = 0; i < 100; ++i) {
    const auto p = m.propose(0.2, r);
    CHECK(p.log_q_fwd == p.log_q_rev);
  }
}

TEST_CASE("gaussian SVE factor at the midpoint is one") {
  const auto m = build_gaussian(0.7);
  CHECK(sve_log_random_factor(m, -0.3, 1.1, 0.4) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("gaussian rejects non-positive variance") {
  CHECK_THROWS_AS(build_gaussian(0.0), std::invalid_argument);
  CHECK_THROWS_AS(build_gaussian(-1.0), std::invalid_argument);
}
