#include <doctest.h>

#include <cmath>
#include <vector>

#include "dimc/estimators.hpp"
#include "dimc/models/gaussian.hpp"
#include "dimc/models/toy.hpp"
#include "dimc/oracle.hpp"
#include "dimc/stats.hpp"

using namespace dimc;

namespace {

Proposal<std::size_t> toy_move(std::size_t to) { return {to, std::log(0.5), std::log(0.5)}; }

std::vector<double> to_doubles(const std::vector<Rational>& r) {
  std::vector<double> out;
  for (const auto& v : r) out.push_back(to_double(v));
  return out;
}

// (p_t'(y') aux_t(y), p_t(y) aux_t'(y')) over (y, y') pairs
std::pair<std::vector<double>, std::vector<double>> mpmc_product_densities(const ToySpec& s,
                                                                           std::size_t t,
                                                                           std::size_t tp) {
  std::vector<double> p, q;
  for (std::size_t y = 0; y < s.num_outcomes(); ++y)
    for (std::size_t yp = 0; yp < s.num_outcomes(); ++yp) {
      p.push_back(to_double(s.likelihood[tp][yp] * s.aux[t][y]));
      q.push_back(to_double(s.likelihood[t][y] * s.aux[tp][yp]));
    }
  return {p, q};
}

}  // namespace

TEST_CASE("deterministic part") {
  const auto m = build_toy_1();
  CHECK(deterministic_log_ratio(m, std::size_t{0}, toy_move(0)) == 0.0);
  CHECK(deterministic_log_ratio(m, std::size_t{0}, toy_move(1)) ==
        doctest::Approx(std::log(5 * 0.6) - std::log(2 * 0.7)));
  // reciprocity
  CHECK(deterministic_log_ratio(m, std::size_t{0}, toy_move(1)) ==
        doctest::Approx(-deterministic_log_ratio(m, std::size_t{1}, reversed(std::size_t{0}, toy_move(1)))));

  const auto g = build_gaussian(1.0);
  const Proposal<double> p{1.0, -0.9, -0.9};
  const double expect = normal_log_pdf(1.0, 0, 1) - normal_log_pdf(0.0, 0, 1) + (0.0 - (-0.5));
  CHECK(deterministic_log_ratio(g, 0.0, p) == doctest::Approx(expect));
}

TEST_CASE("random factors with identical arguments are one") {
  const auto m = build_toy_2();
  for (std::size_t t = 0; t < 2; ++t)
    for (std::size_t y = 0; y < 3; ++y) {
      CHECK(mpmc_log_random_factor(m, t, t, y, y) == 0.0);
      CHECK(sve_log_random_factor(m, t, t, y) == 0.0);
    }
}

TEST_CASE("exact unbiasedness on both toys") {
  for (const auto& spec : {toy_spec_1(), toy_spec_2()})
    for (std::size_t t = 0; t < 2; ++t)
      for (std::size_t tp = 0; tp < 2; ++tp)
        for (auto e : {Estimator::mpmc, Estimator::sve}) {
          const auto mom = oracle::exact_estimator_moments(spec, t, tp, e);
          CHECK(mom.mean == oracle::normalizer_ratio(spec, t, tp));
        }
  CHECK(oracle::normalizer_ratio(toy_spec_1(), 0, 1) == Rational(2, 5));
}

TEST_CASE("Monte Carlo unbiasedness") {
  const auto m = build_toy_1();
  for (auto e : {Estimator::mpmc, Estimator::sve}) {
    RandomStream r(e == Estimator::mpmc ? 31 : 32);
    std::vector<double> xs;
    for (int i = 0; i < 100000; ++i)
      xs.push_back(std::exp(draw_ratio(e, m, std::size_t{0}, toy_move(1), r).log_random_factor));
    const double se = std::sqrt(variance(xs) / xs.size());
    CHECK(std::abs(mean(xs) - 0.4) < 4 * se);
  }
}

TEST_CASE("pearson chi-square") {
  const std::vector<double> pa{0.3, 0.7}, pb{0.4, 0.6};
  CHECK(pearson_chi_square(pa, pa) == 0.0);
  CHECK(pearson_chi_square(pb, pa) == doctest::Approx(1.0 / 24).epsilon(1e-12));
  CHECK_THROWS_AS(pearson_chi_square(std::vector<double>{1.0, 0.0}, std::vector<double>{0.5, 0.5}),
                  std::domain_error);
}

TEST_CASE("relative error equals chi-square exactly") {
  for (const auto& spec : {toy_spec_1(), toy_spec_2()})
    for (std::size_t t = 0; t < 2; ++t)
      for (std::size_t tp = 0; tp < 2; ++tp) {
        const auto sve = oracle::exact_estimator_moments(spec, t, tp, Estimator::sve);
        const auto p_t = to_doubles(spec.likelihood[t]), p_tp = to_doubles(spec.likelihood[tp]);
        CHECK(std::abs(to_double(sve.relative_second_moment) - pearson_chi_square(p_tp, p_t)) < 1e-12);
        const auto mp = oracle::exact_estimator_moments(spec, t, tp, Estimator::mpmc);
        const auto [p, q] = mpmc_product_densities(spec, t, tp);
        CHECK(std::abs(to_double(mp.relative_second_moment) - pearson_chi_square(p, q)) < 1e-12);
      }
  CHECK(oracle::exact_estimator_moments(toy_spec_1(), 0, 1, Estimator::sve).relative_second_moment ==
        Rational(1, 24));
}

TEST_CASE("empirical relative error") {
  const std::vector<double> same{0.3, 0.3, 0.3};
  CHECK(empirical_relative_error(same, 0.3) == 0.0);
  CHECK_THROWS_AS(empirical_relative_error(std::vector<double>{0.1}, 0.1), std::invalid_argument);

  for (const auto& spec : {toy_spec_1(), toy_spec_2()}) {
    const ToyModel m(spec);
    const double true_log_a = deterministic_log_ratio(m, std::size_t{0}, toy_move(1)) +
                              std::log(to_double(oracle::normalizer_ratio(spec, 0, 1)));
    RandomStream r(40);
    std::vector<RatioDraw<std::size_t>> draws;
    std::vector<double> terms;
    for (int i = 0; i < 100000; ++i) {
      draws.push_back(draw_sve_ratio(m, std::size_t{0}, toy_move(1), r));
      const double e = std::expm1(draws.back().log_a - true_log_a);
      terms.push_back(e * e);
    }
    const double re = empirical_relative_error(std::span<const RatioDraw<std::size_t>>(draws), true_log_a);
    const double se = std::sqrt(variance(terms) / terms.size());
    const double chi = pearson_chi_square(to_doubles(spec.likelihood[1]), to_doubles(spec.likelihood[0]));
    CHECK(std::abs(re - chi) < 3 * se + 1e-15);
  }
}

TEST_CASE("mixed estimator kinds are rejected") {
  const auto m = build_toy_1();
  RandomStream r(41);
  std::vector<RatioDraw<std::size_t>> draws{draw_sve_ratio(m, std::size_t{0}, toy_move(1), r),
                                            draw_mpmc_ratio(m, std::size_t{0}, toy_move(1), r)};
  CHECK(draws[0].kind() == Estimator::sve);
  CHECK(draws[1].kind() == Estimator::mpmc);
  CHECK_THROWS_AS(empirical_relative_error(std::span<const RatioDraw<std::size_t>>(draws), 0.0),
                  std::invalid_argument);
}
