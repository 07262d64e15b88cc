#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "dimc/estimators.hpp"
#include "dimc/models/ising.hpp"
#include "wolff_kernel.hpp"

using namespace dimc;

namespace {

IsingData spin_data(std::size_t side, std::size_t count, std::uint64_t seed) {
  RandomStream r(seed);
  IsingData d;
  for (std::size_t i = 0; i < count; ++i) d.push_back(SpinConfiguration::random(side, r));
  return d;
}

IsingModel small_model(std::uint64_t seed = 1) {
  IsingSpec s;
  s.side = 4;
  s.wolff_burn_in = 20;
  s.dataset = spin_data(4, 3, seed);
  return IsingModel(s);
}

}  // namespace

TEST_CASE("ising energy") {
  CHECK(bond_sum(SpinConfiguration(3, 1)) == 12);
  CHECK(ising_energy(0.1, SpinConfiguration(3, 1)) == doctest::Approx(-1.2));
  CHECK(ising_energy(0.1, SpinConfiguration::checkerboard(2)) == doctest::Approx(0.4));
  for (std::size_t n = 2; n <= 6; ++n) CHECK(bond_sum(SpinConfiguration(n, -1)) == long(2 * n * (n - 1)));
}

TEST_CASE("single flip changes the energy by 2J s_k n_k") {
  RandomStream r(4);
  for (int t = 0; t < 50; ++t) {
    auto c = SpinConfiguration::random(5, r);
    const auto k = r.index(c.size());
    const double before = ising_energy(0.3, c);
    const double delta = 2 * 0.3 * c[k] * c.neighbour_sum(k);
    c.flip(k);
    CHECK(ising_energy(0.3, c) - before == doctest::Approx(delta));
  }
}

TEST_CASE("energy is invariant under a global flip") {
  RandomStream r(5);
  for (int t = 0; t < 20; ++t) {
    auto c = SpinConfiguration::random(4, r);
    auto flipped = c;
    for (std::size_t k = 0; k < c.size(); ++k) flipped.flip(k);
    CHECK(ising_energy(0.1, c) == ising_energy(0.1, flipped));
  }
}

TEST_CASE("ising log f of the all-up 3x3 lattice at beta 1") {
  IsingSpec s;
  s.side = 3;
  s.dataset = {SpinConfiguration(3, 1)};
  const IsingModel m(s);
  CHECK(m.log_f(1.0, m.observed()).value == doctest::Approx(1.2));
  CHECK(m.log_prior(s.prior_mean).value > m.log_prior(s.prior_mean + 0.1).value);
  CHECK(m.log_prior(s.prior_mean).value > m.log_prior(s.prior_mean - 0.1).value);
  CHECK_FALSE(m.log_normalizer(0.3).has_value());
  CHECK_FALSE(m.likelihood_sampler_exact());
}

TEST_CASE("wolff at beta J = 0 flips one site") {
  RandomStream r(6);
  for (int t = 0; t < 100; ++t) {
    auto c = SpinConfiguration::random(4, r);
    const auto before = c;
    CHECK(wolff_update(c, 0.0, 0.1, r) == 1);
    std::size_t diff = 0;
    for (std::size_t k = 0; k < c.size(); ++k) diff += c[k] != before[k];
    CHECK(diff == 1);
  }
}

TEST_CASE("wolff at large beta J flips the aligned component") {
  RandomStream r(7);
  int full = 0;
  for (int t = 0; t < 200; ++t) {
    SpinConfiguration c(3, 1);
    full += wolff_update(c, 50.0, 0.1, r) == 9;
  }
  CHECK(full >= 195);
}

TEST_CASE("enumerated wolff kernel preserves the Boltzmann weights") {
  for (double beta : {2.0, -2.0, 0.0, 7.0}) {
    CAPTURE(beta);
    const auto pi = testing::boltzmann_weights(3, 0.1, beta);
    const auto k = testing::wolff_kernel(3, 0.1, beta);
    for (const auto& row : k) {
      double s = 0;
      for (double v : row) s += v;
      CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(testing::invariance_residual(k, pi) < 1e-10);
  }
}

TEST_CASE("the naive anti-ferromagnetic bond rule is not invariant") {
  // beta J < 0 with max(0, 1 - exp(-2 beta J)) = 0 reduces to single flips
  const auto pi = testing::boltzmann_weights(3, 0.1, -2.0);
  const auto k = testing::wolff_kernel(3, 0.1, 0.0);
  CHECK(testing::invariance_residual(k, pi) > 1e-4);
}

TEST_CASE("wolff_update agrees with the enumerated kernel") {
  const double beta = 3.0, coupling = 0.1;
  const auto k = testing::wolff_kernel(3, coupling, beta);
  const auto start = testing::config_from_index(3, 0b101100110);
  const auto s0 = testing::index_of(start);
  RandomStream r(8);
  const int n = 200000;
  std::map<std::size_t, int> counts;
  for (int t = 0; t < n; ++t) {
    auto c = start;
    wolff_update(c, beta, coupling, r);
    ++counts[testing::index_of(c)];
  }
  for (std::size_t s = 0; s < k.size(); ++s) {
    const double p = k[s0][s];
    const double freq = counts.count(s) ? counts[s] / double(n) : 0.0;
    if (p == 0.0) {
      CHECK(freq == 0.0);
    } else {
      CHECK(std::abs(freq - p) < 4.5 * std::sqrt(p * (1 - p) / n) + 1e-9);
    }
  }
}

TEST_CASE("beta 0 samples are independent fair spins") {
  RandomStream r(9);
  const auto data = sample_ising(6, 0.1, 0.0, 200, 5, r);
  double mag = 0;
  for (const auto& c : data)
    for (std::size_t k = 0; k < c.size(); ++k) mag += c[k];
  const double n = 200.0 * 36;
  CHECK(std::abs(mag / n) < 4 / std::sqrt(n));
}

TEST_CASE("pseudo-likelihood gradient at zero") {
  const auto data = spin_data(5, 4, 10);
  double expect = 0;
  for (const auto& c : data)
    for (std::size_t k = 0; k < c.size(); ++k) expect += 0.1 * c[k] * c.neighbour_sum(k);
  CHECK(pseudo_log_likelihood(0.1, data, 0.0).gradient == doctest::Approx(expect));
}

TEST_CASE("pseudo-likelihood is concave") {
  const auto data = spin_data(5, 4, 11);
  for (double b = -30; b <= 30; b += 0.7) CHECK(pseudo_log_likelihood(0.1, data, b).hessian <= 0.0);
  const auto r = ising_mple(0.1, data);
  CHECK(r.concave_at_every_iterate);
  CHECK(std::abs(pseudo_log_likelihood(0.1, data, r.beta_hat).gradient) < 1e-6);
}

TEST_CASE("mple edge cases") {
  const IsingData checker{SpinConfiguration::checkerboard(4), SpinConfiguration::checkerboard(4)};
  const auto neg = ising_mple(0.1, checker);
  CHECK(neg.clamped);
  CHECK(neg.beta_hat == doctest::Approx(-500.0));
  const auto pos = ising_mple(0.1, {SpinConfiguration(4, 1)});
  CHECK(pos.clamped);
  CHECK(pos.beta_hat == doctest::Approx(500.0));
  CHECK_THROWS_AS(ising_mple(0.1, {}), std::invalid_argument);
}

TEST_CASE("mple recovers a positive beta") {
  RandomStream r(12);
  const auto data = sample_ising(10, 0.1, 3.0, 50, 200, r);
  const auto res = ising_mple(0.1, data);
  CHECK(res.beta_hat == doctest::Approx(3.0).epsilon(0.15));
}

TEST_CASE("ising auxiliary density differences are exact energy differences") {
  const auto m = small_model();
  const auto y1 = spin_data(4, 3, 20), y2 = spin_data(4, 3, 21);
  const double diff = m.aux_log_density(y1, 0.3).value - m.aux_log_density(y2, -1.0).value;
  CHECK(diff == doctest::Approx(-m.mple() * (total_energy(0.1, y1) - total_energy(0.1, y2))));
  CHECK(m.aux_log_density(y1, 0.0).tag == DensityTag::up_to_constant);
}

TEST_CASE("ising SVE factor and sufficient statistic") {
  const auto m = small_model();
  const auto w = spin_data(4, 3, 22);
  CHECK(sve_log_random_factor(m, 0.2, 0.5, w) == doctest::Approx(0.3 * total_energy(0.1, w)));
  CHECK(sve_log_random_factor(m, 0.5, 0.5, w) == 0.0);
  auto permuted = w;
  std::reverse(permuted.begin(), permuted.end());
  CHECK(mpmc_log_random_factor(m, 0.2, 0.6, w, permuted) ==
        doctest::Approx(mpmc_log_random_factor(m, 0.2, 0.6, permuted, w)));
  CHECK(mpmc_log_random_factor(m, 0.4, 0.4, w, w) == 0.0);
  const Proposal<double> stay{0.4, 0.0, 0.0};
  CHECK(deterministic_log_ratio(m, 0.4, stay) == 0.0);
}

TEST_CASE("ising auxiliary datasets mirror the observed size") {
  const auto m = small_model();
  RandomStream r(23);
  CHECK(m.sample_likelihood(0.3, r).size() == m.observed().size());
  CHECK(m.sample_aux(0.3, r).size() == m.observed().size());
}

TEST_CASE("ising model validation") {
  IsingSpec s;
  CHECK_THROWS_AS(IsingModel{s}, std::invalid_argument);  // empty dataset
  s.dataset = spin_data(5, 2, 1);
  s.side = 4;
  CHECK_THROWS_AS(IsingModel{s}, std::invalid_argument);
  s.side = 5;
  s.coupling = 0.0;
  CHECK_THROWS_AS(IsingModel{s}, std::invalid_argument);
}

TEST_CASE("ising dataset round trip and diagnostics") {
  const auto data = spin_data(3, 4, 30);
  std::stringstream ss;
  write_ising_dataset(ss, 0.1, data);
  CHECK(ss.str().rfind("ising 3 0.10000000000000001 4\n", 0) == 0);
  const auto back = read_ising_dataset(ss);
  CHECK(back.side == 3);
  CHECK(back.coupling == 0.1);
  CHECK(back.configs == data);

  std::istringstream bad("ising 2 0.1 2\n1 -1 1 1\n1 2 1 1\n");
  try {
    read_ising_dataset(bad);
    FAIL("expected an error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  std::istringstream short_file("ising 2 0.1 2\n1 -1 1 1\n");
  CHECK_THROWS_AS(read_ising_dataset(short_file), std::runtime_error);
  std::istringstream wrong("isng 2 0.1 1\n");
  CHECK_THROWS_AS(read_ising_dataset(wrong), std::runtime_error);
}
