#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string_view>
#include <variant>
#include <vector>

#include "dimc/model.hpp"

namespace dimc {

enum class Estimator { mpmc, sve };

std::string_view to_string(Estimator e);

template <class Obs>
struct MpmcAux {
  Obs y;        // ~ pi(. | x, theta)
  Obs y_prime;  // ~ p_theta'
};

template <class Obs>
struct SveAux {
  Obs w;  // ~ p_theta'
};

// One draw of a randomized acceptance ratio. Never clamped; min{a, 1} is
// applied only when accepting.
template <class Obs>
struct RatioDraw {
  double log_a;
  double log_random_factor;  // the part that estimates Z(theta) / Z(theta')
  std::variant<MpmcAux<Obs>, SveAux<Obs>> aux;

  Estimator kind() const { return aux.index() == 0 ? Estimator::mpmc : Estimator::sve; }
};

// log[pi(t') q(t|t') f_t'(x)] - log[pi(t) q(t'|t) f_t(x)]
template <Model M>
double deterministic_log_ratio(const M& model, const typename M::Param& theta,
                               const Proposal<typename M::Param>& prop) {
  const double num = model.log_prior(prop.theta).value + prop.log_q_rev +
                     model.log_f(prop.theta, model.observed()).value;
  const double den = model.log_prior(theta).value + prop.log_q_fwd +
                     model.log_f(theta, model.observed()).value;
  return num - den;
}

// The proposal seen from theta' back to theta.
template <class Param>
Proposal<Param> reversed(const Param& theta, const Proposal<Param>& prop) {
  return {theta, prop.log_q_rev, prop.log_q_fwd};
}

// log of f_t(y) pi(y'|x,t') / (f_t'(y') pi(y|x,t))
template <Model M>
double mpmc_log_random_factor(const M& model, const typename M::Param& theta,
                              const typename M::Param& theta_prime, const typename M::Obs& y,
                              const typename M::Obs& y_prime) {
  return (model.log_f(theta, y).value + model.aux_log_density(y_prime, theta_prime).value) -
         (model.log_f(theta_prime, y_prime).value + model.aux_log_density(y, theta).value);
}

// log of f_t(w) / f_t'(w)
template <Model M>
double sve_log_random_factor(const M& model, const typename M::Param& theta,
                             const typename M::Param& theta_prime, const typename M::Obs& w) {
  return model.log_f(theta, w).value - model.log_f(theta_prime, w).value;
}

template <Model M>
RatioDraw<typename M::Obs> draw_mpmc_ratio(const M& model, const typename M::Param& theta,
                                           const Proposal<typename M::Param>& prop,
                                           RandomStream& rng) {
  auto y = model.sample_aux(theta, rng);
  auto y_prime = model.sample_likelihood(prop.theta, rng);
  const double random = mpmc_log_random_factor(model, theta, prop.theta, y, y_prime);
  return {deterministic_log_ratio(model, theta, prop) + random, random,
          MpmcAux<typename M::Obs>{std::move(y), std::move(y_prime)}};
}

template <Model M>
RatioDraw<typename M::Obs> draw_sve_ratio(const M& model, const typename M::Param& theta,
                                          const Proposal<typename M::Param>& prop,
                                          RandomStream& rng) {
  auto w = model.sample_likelihood(prop.theta, rng);
  const double random = sve_log_random_factor(model, theta, prop.theta, w);
  return {deterministic_log_ratio(model, theta, prop) + random, random,
          SveAux<typename M::Obs>{std::move(w)}};
}

template <Model M>
RatioDraw<typename M::Obs> draw_ratio(Estimator kind, const M& model,
                                      const typename M::Param& theta,
                                      const Proposal<typename M::Param>& prop, RandomStream& rng) {
  return kind == Estimator::mpmc ? draw_mpmc_ratio(model, theta, prop, rng)
                                 : draw_sve_ratio(model, theta, prop, rng);
}

// Pearson chi-square distance sum (q - p)^2 / p. Throws std::domain_error
// ("chi-square undefined") when q puts mass where p has none.
double pearson_chi_square(std::span<const double> p, std::span<const double> q);

// Sample mean of (a_hat / a - 1)^2 from log draws. Needs at least two draws.
double empirical_relative_error(std::span<const double> log_a_hat, double true_log_a);

template <class Obs>
double empirical_relative_error(std::span<const RatioDraw<Obs>> draws, double true_log_a) {
  if (draws.empty()) throw std::invalid_argument("empirical_relative_error: no draws");
  const Estimator kind = draws.front().kind();
  std::vector<double> logs;
  logs.reserve(draws.size());
  for (const auto& d : draws) {
    if (d.kind() != kind)
      throw std::invalid_argument("empirical_relative_error: mixed estimator kinds");
    logs.push_back(d.log_a);
  }
  return empirical_relative_error(std::span<const double>(logs), true_log_a);
}

}  // namespace dimc
