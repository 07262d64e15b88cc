#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dimc/model.hpp"
#include "dimc/rational.hpp"

namespace dimc {

// Finite inference problem given by exact probability tables. The oracle reads
// these tables directly; ToyModel converts them to log-domain doubles.
struct ToySpec {
  std::string name;
  std::vector<std::string> labels;                  // parameter names
  std::vector<std::vector<Rational>> likelihood;    // p_theta(y), rows sum to 1
  std::vector<Rational> scale;                      // hidden c_theta: f = c * p
  std::vector<Rational> prior;
  std::vector<std::vector<Rational>> proposal;      // q(theta' | theta)
  std::vector<std::vector<Rational>> aux;           // pi(y | x, theta)
  std::size_t observed = 0;

  std::size_t num_params() const { return labels.size(); }
  std::size_t num_outcomes() const { return likelihood.empty() ? 0 : likelihood.front().size(); }
  Rational f(std::size_t theta, std::size_t y) const { return scale[theta] * likelihood[theta][y]; }

  // Throws std::invalid_argument naming the offending table.
  void validate() const;
};

// X = {0,1}, P_a = (0.3, 0.7), P_b = (0.4, 0.6), x = 1, c = (2, 5).
ToySpec toy_spec_1();
// X = {0,1,2}, P_a = (0.1, 0.8, 0.1), P_b = (0.8, 0.1, 0.1), x = 2, c = (2, 5).
ToySpec toy_spec_2();

class ToyModel {
public:
  using Param = std::size_t;
  using Obs = std::size_t;

  explicit ToyModel(ToySpec spec);

  const ToySpec& spec() const { return spec_; }
  std::size_t num_params() const { return spec_.num_params(); }
  std::size_t num_outcomes() const { return spec_.num_outcomes(); }

  LogDensity log_prior(Param theta) const;
  LogDensity log_f(Param theta, Obs y) const;
  Obs sample_likelihood(Param theta, RandomStream& rng) const;
  Obs sample_aux(Param theta, RandomStream& rng) const;
  LogDensity aux_log_density(Obs y, Param theta) const;
  Proposal<Param> propose(Param theta, RandomStream& rng) const;
  const Obs& observed() const { return spec_.observed; }
  std::optional<double> log_normalizer(Param theta) const;
  bool likelihood_sampler_exact() const { return true; }
  std::string describe(Param theta) const { return spec_.labels.at(theta); }

private:
  ToySpec spec_;
  std::vector<std::vector<double>> likelihood_;
  std::vector<std::vector<double>> aux_;
  std::vector<std::vector<double>> proposal_;
  std::vector<std::vector<double>> log_f_;
  std::vector<std::vector<double>> log_aux_;
  std::vector<std::vector<double>> log_proposal_;
  std::vector<double> log_prior_;
  std::vector<double> log_scale_;
};

ToyModel build_toy_1();
ToyModel build_toy_2();

}  // namespace dimc
