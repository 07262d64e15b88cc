#pragma once

#include <optional>
#include <string>

#include "dimc/model.hpp"

namespace dimc {

struct GaussianSpec {
  double sigma2 = 1.0;          // likelihood variance
  double observation = 1.0;     // the single observed y
  double aux_offset = 1.0 / 3;  // auxiliary is N(theta + aux_offset, sigma2)
  double prior_mean = 0.0;
  double prior_sd = 1.0;
  double proposal_sd = 1.0;
};

// Normal location model N(theta, sigma2) with a normal prior, treated as if
// its normalizer 1/sqrt(2 pi sigma2) were unknown. The normalizer does not
// depend on theta, so plain M-H is available as a tractable baseline.
class GaussianModel {
public:
  using Param = double;
  using Obs = double;

  explicit GaussianModel(GaussianSpec spec);

  const GaussianSpec& spec() const { return spec_; }

  LogDensity log_prior(Param theta) const;
  LogDensity log_f(Param theta, Obs y) const;
  Obs sample_likelihood(Param theta, RandomStream& rng) const;
  Obs sample_aux(Param theta, RandomStream& rng) const;
  LogDensity aux_log_density(Obs y, Param theta) const;
  Proposal<Param> propose(Param theta, RandomStream& rng) const;
  const Obs& observed() const { return spec_.observation; }
  std::optional<double> log_normalizer(Param theta) const;
  bool likelihood_sampler_exact() const { return true; }
  std::string describe(Param theta) const;

  // Conjugate posterior N(mean, variance).
  double posterior_mean() const;
  double posterior_variance() const;

private:
  GaussianSpec spec_;
  double sigma_;
};

// Throws std::invalid_argument unless sigma2 > 0.
GaussianModel build_gaussian(double sigma2);

double normal_log_pdf(double x, double mean, double sd);

}  // namespace dimc
