#pragma once

#include <concepts>
#include <limits>
#include <optional>
#include <string>

#include "dimc/rng.hpp"

namespace dimc {

enum class DensityTag {
  exact,
  // Shifted by an unknown constant that depends on neither the argument nor
  // the parameter; only differences of such values are meaningful.
  up_to_constant,
};

struct LogDensity {
  double value = 0.0;
  DensityTag tag = DensityTag::exact;
};

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

template <class Param>
struct Proposal {
  Param theta;
  double log_q_fwd;  // log q(theta' | theta)
  double log_q_rev;  // log q(theta | theta')
};

// An inference problem whose likelihood is known up to a parameter-dependent
// normalizer: p_theta(x) = f_theta(x) / Z(theta). The observed data is owned
// by the model and never changes after construction.
//
//   log_prior(t)              log pi(t), -inf outside the support
//   log_f(t, y)               unnormalized log-likelihood of y
//   sample_likelihood(t, r)   draw from p_t (approximate if
//                             likelihood_sampler_exact() is false)
//   sample_aux(t, r)          draw from the auxiliary density pi(. | x, t)
//   aux_log_density(y, t)     log pi(y | x, t)
//   propose(t, r)             theta' ~ q(. | t) with both kernel log-densities
//   log_normalizer(t)         log Z(t) when known, used only by plain M-H
template <class M>
concept Model = requires(const M& m, const typename M::Param& t, const typename M::Obs& y,
                         RandomStream& rng) {
  typename M::Param;
  typename M::Obs;
  { m.log_prior(t) } -> std::same_as<LogDensity>;
  { m.log_f(t, y) } -> std::same_as<LogDensity>;
  { m.sample_likelihood(t, rng) } -> std::same_as<typename M::Obs>;
  { m.sample_aux(t, rng) } -> std::same_as<typename M::Obs>;
  { m.aux_log_density(y, t) } -> std::same_as<LogDensity>;
  { m.propose(t, rng) } -> std::same_as<Proposal<typename M::Param>>;
  { m.observed() } -> std::convertible_to<const typename M::Obs&>;
  { m.log_normalizer(t) } -> std::same_as<std::optional<double>>;
  { m.likelihood_sampler_exact() } -> std::same_as<bool>;
  { m.describe(t) } -> std::same_as<std::string>;
};

}  // namespace dimc
