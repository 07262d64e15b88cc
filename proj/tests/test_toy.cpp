#include <doctest.h>

#include <cmath>

#include "dimc/models/toy.hpp"
#include "dimc/oracle.hpp"

using namespace dimc;

TEST_CASE("toy 1 densities") {
  const auto m = build_toy_1();
  CHECK(m.log_prior(0).value == doctest::Approx(std::log(0.5)));
  CHECK(m.log_prior(1).value == doctest::Approx(std::log(0.5)));
  CHECK(m.log_f(0, 1).value == doctest::Approx(std::log(2 * 0.7)));
  CHECK(m.log_f(1, 1).value == doctest::Approx(std::log(5 * 0.6)));
  for (std::size_t y = 0; y < 2; ++y) CHECK(m.aux_log_density(y, 0).value == doctest::Approx(std::log(0.5)));
  CHECK(m.observed() == 1);
  CHECK(*m.log_normalizer(0) - *m.log_normalizer(1) == doctest::Approx(std::log(0.4)));
}

TEST_CASE("toy 1 likelihood sampler frequency") {
  const auto m = build_toy_1();
  RandomStream r(100);
  const int n = 1000000;
  int ones = 0;
  for (int i = 0; i < n; ++i) ones += m.sample_likelihood(0, r) == 1;
  CHECK(std::abs(ones / double(n) - 0.7) < 3 * std::sqrt(0.21 / n));
}

TEST_CASE("toy 1 auxiliary sampler is uniform") {
  const auto m = build_toy_1();
  RandomStream r(101);
  const int n = 200000;
  int ones = 0;
  for (int i = 0; i < n; ++i) ones += m.sample_aux(1, r) == 1;
  CHECK(std::abs(ones / double(n) - 0.5) < 4 * std::sqrt(0.25 / n));
}

TEST_CASE("toy proposals are uniform and symmetric") {
  const auto m = build_toy_1();
  RandomStream r(102);
  int moves = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const auto p = m.propose(0, r);
    CHECK(p.log_q_fwd == doctest::Approx(std::log(0.5)));
    CHECK(p.log_q_fwd - p.log_q_rev == 0.0);
    moves += p.theta == 1;
  }
  CHECK(std::abs(moves / double(n) - 0.5) < 4 * std::sqrt(0.25 / n));
}

TEST_CASE("toy posteriors and normalizer ratio") {
  const auto p1 = oracle::exact_posterior(toy_spec_1());
  CHECK(p1[0] == Rational(7, 13));
  CHECK(p1[1] == Rational(6, 13));
  const auto p2 = oracle::exact_posterior(toy_spec_2());
  CHECK(p2[0] == Rational(1, 2));
  CHECK(p2[1] == Rational(1, 2));
  CHECK(oracle::normalizer_ratio(toy_spec_1(), 0, 1) == Rational(2, 5));
  CHECK(oracle::normalizer_ratio(toy_spec_2(), 0, 1) == Rational(2, 5));
  CHECK(toy_spec_1().prior[0] == Rational(1, 2));
}

TEST_CASE("toy auxiliary has full support") {
  for (const auto& spec : {toy_spec_1(), toy_spec_2()}) {
    const ToyModel m(spec);
    for (std::size_t t = 0; t < spec.num_params(); ++t)
      for (std::size_t y = 0; y < spec.num_outcomes(); ++y)
        CHECK(std::isfinite(m.aux_log_density(y, t).value));
  }
}

TEST_CASE("toy model validation") {
  auto s = toy_spec_1();
  s.likelihood[0][0] = Rational(1, 2);
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = toy_spec_1();
  s.scale[1] = 0;
  CHECK_THROWS_AS(ToyModel{s}, std::invalid_argument);
  s = toy_spec_1();
  s.aux[0] = {Rational(1), Rational(0)};
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
  s = toy_spec_2();
  s.observed = 3;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}
