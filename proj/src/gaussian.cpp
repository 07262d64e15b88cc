#include "dimc/models/gaussian.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace dimc {

double normal_log_pdf(double x, double mean, double sd) {
  const double z = (x - mean) / sd;
  return -0.5 * z * z - std::log(sd) - 0.5 * std::log(2.0 * std::numbers::pi);
}

GaussianModel::GaussianModel(GaussianSpec spec) : spec_(spec) {
  if (!(spec_.sigma2 > 0.0) || !std::isfinite(spec_.sigma2))
    throw std::invalid_argument("gaussian model: sigma2 must be positive");
  if (!(spec_.prior_sd > 0.0) || !(spec_.proposal_sd > 0.0))
    throw std::invalid_argument("gaussian model: prior and proposal sd must be positive");
  sigma_ = std::sqrt(spec_.sigma2);
}

LogDensity GaussianModel::log_prior(Param theta) const {
  return {normal_log_pdf(theta, spec_.prior_mean, spec_.prior_sd)};
}

LogDensity GaussianModel::log_f(Param theta, Obs y) const {
  const double d = y - theta;
  return {-d * d / (2.0 * spec_.sigma2)};
}

GaussianModel::Obs GaussianModel::sample_likelihood(Param theta, RandomStream& rng) const {
  return rng.normal(theta, sigma_);
}

GaussianModel::Obs GaussianModel::sample_aux(Param theta, RandomStream& rng) const {
  return rng.normal(theta + spec_.aux_offset, sigma_);
}

LogDensity GaussianModel::aux_log_density(Obs y, Param theta) const {
  return {normal_log_pdf(y, theta + spec_.aux_offset, sigma_)};
}

Proposal<GaussianModel::Param> GaussianModel::propose(Param theta, RandomStream& rng) const {
  const double next = rng.normal(theta, spec_.proposal_sd);
  const double lq = normal_log_pdf(next, theta, spec_.proposal_sd);
  return {next, lq, lq};
}

std::optional<double> GaussianModel::log_normalizer(Param) const {
  return 0.5 * std::log(2.0 * std::numbers::pi * spec_.sigma2);
}

std::string GaussianModel::describe(Param theta) const { return fmt::format("{:.17g}", theta); }

double GaussianModel::posterior_mean() const {
  const double prior_prec = 1.0 / (spec_.prior_sd * spec_.prior_sd);
  const double lik_prec = 1.0 / spec_.sigma2;
  return (prior_prec * spec_.prior_mean + lik_prec * spec_.observation) / (prior_prec + lik_prec);
}

double GaussianModel::posterior_variance() const {
  return 1.0 / (1.0 / (spec_.prior_sd * spec_.prior_sd) + 1.0 / spec_.sigma2);
}

GaussianModel build_gaussian(double sigma2) {
  GaussianSpec spec;
  spec.sigma2 = sigma2;
  return GaussianModel(spec);
}

}  // namespace dimc
