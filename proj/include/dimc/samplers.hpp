#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "dimc/estimators.hpp"
#include "dimc/model.hpp"
#include "dimc/rng.hpp"

namespace dimc {

enum class SamplerKind { mh, pmc, mpmc, sve, mabmc };

std::string_view to_string(SamplerKind kind);
std::optional<SamplerKind> parse_sampler_kind(std::string_view name);

class DecisionRule;
namespace diagnostics {
DecisionRule invalid_max_rule();
}

// Chooses which randomized ratio MABMC uses for a proposed move. Only the
// symmetric rules are reachable through the public factories and parse().
class DecisionRule {
public:
  enum class Kind { always_mpmc, always_sve, max_min, invalid_max };

  static DecisionRule always_mpmc() { return DecisionRule(Kind::always_mpmc); }
  static DecisionRule always_sve() { return DecisionRule(Kind::always_sve); }
  static DecisionRule max_min() { return DecisionRule(Kind::max_min); }

  // Accepts "constant-1", "constant-2", "max-min".
  static std::optional<DecisionRule> parse(std::string_view name);

  Kind kind() const { return kind_; }
  bool valid() const { return kind_ != Kind::invalid_max; }
  std::string_view name() const;

  friend bool operator==(const DecisionRule&, const DecisionRule&) = default;

private:
  explicit DecisionRule(Kind kind) : kind_(kind) {}
  friend DecisionRule diagnostics::invalid_max_rule();

  Kind kind_;
};

// Ties between the two candidate ratios (in the log domain) go to MPMC.
inline constexpr double decision_tie_tolerance = 1e-12;

// Per-chain streams, one per phase of an iteration.
struct ChainStreams {
  RandomStream proposal;
  RandomStream aux;
  RandomStream decision;
  RandomStream accept;

  explicit ChainStreams(const RandomStream& chain)
      : proposal(chain.child(0)), aux(chain.child(1)), decision(chain.child(2)),
        accept(chain.child(3)) {}
};

template <class Param>
struct IterationRecord {
  std::size_t iter = 0;
  Param theta_before{};
  Param theta_proposed{};
  std::optional<Estimator> decision;  // MABMC only
  double log_a = 0.0;
  bool accepted = false;
  double accept_prob = 0.0;  // min{a, 1} for the ratio actually used
  unsigned draws = 0;        // model sampler calls (likelihood + auxiliary)

  const Param& theta_after() const { return accepted ? theta_proposed : theta_before; }

  friend bool operator==(const IterationRecord&, const IterationRecord&) = default;
};

template <Model M>
struct ChainState {
  typename M::Param theta;
  std::optional<typename M::Obs> joint_aux;  // the persistent y of joint-space PMC
};

template <class Param>
struct ChainTrace {
  SamplerKind kind;
  DecisionRule rule;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  std::vector<IterationRecord<Param>> records;

  double mean_accept_prob() const {
    double s = 0.0;
    for (const auto& r : records) s += r.accept_prob;
    return records.empty() ? 0.0 : s / static_cast<double>(records.size());
  }
  double mean_draws() const {
    double s = 0.0;
    for (const auto& r : records) s += r.draws;
    return records.empty() ? 0.0 : s / static_cast<double>(records.size());
  }
  double decision_fraction(Estimator e) const {
    std::size_t hits = 0, total = 0;
    for (const auto& r : records) {
      if (!r.decision) continue;
      ++total;
      if (*r.decision == e) ++hits;
    }
    return total ? static_cast<double>(hits) / static_cast<double>(total) : 0.0;
  }
  std::vector<Param> thetas() const {
    std::vector<Param> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.theta_after());
    return out;
  }

  friend bool operator==(const ChainTrace&, const ChainTrace&) = default;
};

inline double acceptance_probability(double log_a) {
  if (std::isnan(log_a)) throw std::domain_error("acceptance ratio is NaN");
  return log_a >= 0.0 ? 1.0 : std::exp(log_a);
}

// Accept iff log u < min{log a, 0}.
inline bool accept_move(double log_a, RandomStream& rng) {
  if (std::isnan(log_a)) throw std::domain_error("acceptance ratio is NaN");
  return std::log(rng.uniform_positive()) < std::min(log_a, 0.0);
}

namespace detail {

template <Model M>
IterationRecord<typename M::Param> finish(ChainState<M>& state,
                                          const Proposal<typename M::Param>& prop, double log_a,
                                          unsigned draws, RandomStream& accept_stream) {
  IterationRecord<typename M::Param> rec;
  rec.theta_before = state.theta;
  rec.theta_proposed = prop.theta;
  rec.log_a = log_a;
  rec.accept_prob = acceptance_probability(log_a);
  rec.accepted = accept_move(log_a, accept_stream);
  rec.draws = draws;
  if (rec.accepted) state.theta = prop.theta;
  return rec;
}

}  // namespace detail

// Plain Metropolis-Hastings with the true normalizer.
template <Model M>
IterationRecord<typename M::Param> step_mh(const M& model, ChainState<M>& state,
                                           ChainStreams& rng) {
  auto prop = model.propose(state.theta, rng.proposal);
  const auto lz = model.log_normalizer(state.theta);
  const auto lz_prime = model.log_normalizer(prop.theta);
  if (!lz || !lz_prime) throw std::logic_error("MH requires tractable likelihood");
  const double log_a = deterministic_log_ratio(model, state.theta, prop) + (*lz - *lz_prime);
  return detail::finish(state, prop, log_a, 0, rng.accept);
}

// Pseudo-marginal M-H on the joint space (theta, y).
template <Model M>
IterationRecord<typename M::Param> step_pmc_joint(const M& model, ChainState<M>& state,
                                                  ChainStreams& rng) {
  if (!state.joint_aux) throw std::logic_error("joint-space PMC needs an auxiliary state");
  auto prop = model.propose(state.theta, rng.proposal);
  auto y_prime = model.sample_likelihood(prop.theta, rng.aux);
  const double log_a = deterministic_log_ratio(model, state.theta, prop) +
                       mpmc_log_random_factor(model, state.theta, prop.theta, *state.joint_aux,
                                              y_prime);
  auto rec = detail::finish(state, prop, log_a, 1, rng.accept);
  if (rec.accepted) state.joint_aux = std::move(y_prime);
  return rec;
}

template <Model M>
IterationRecord<typename M::Param> step_mpmc(const M& model, ChainState<M>& state,
                                             ChainStreams& rng) {
  auto prop = model.propose(state.theta, rng.proposal);
  const auto draw = draw_mpmc_ratio(model, state.theta, prop, rng.aux);
  return detail::finish(state, prop, draw.log_a, 2, rng.accept);
}

template <Model M>
IterationRecord<typename M::Param> step_sve(const M& model, ChainState<M>& state,
                                            ChainStreams& rng) {
  auto prop = model.propose(state.theta, rng.proposal);
  const auto draw = draw_sve_ratio(model, state.theta, prop, rng.aux);
  return detail::finish(state, prop, draw.log_a, 1, rng.accept);
}

// Auxiliary draws for one direction of the decision: y ~ pi(.|x, from),
// y' ~ p_to, w ~ p_to.
template <class Obs>
struct DecisionDraws {
  Obs y;
  Obs y_prime;
  Obs w;
};

// The decision for the move theta -> prop.theta given forward draws and
// reverse draws (the latter generated for the move prop.theta -> theta).
template <Model M>
Estimator decide_from_draws(const DecisionRule& rule, const M& model,
                            const typename M::Param& theta,
                            const Proposal<typename M::Param>& prop,
                            const DecisionDraws<typename M::Obs>& forward,
                            const DecisionDraws<typename M::Obs>& reverse) {
  switch (rule.kind()) {
    case DecisionRule::Kind::always_mpmc:
      return Estimator::mpmc;
    case DecisionRule::Kind::always_sve:
      return Estimator::sve;
    case DecisionRule::Kind::max_min:
    case DecisionRule::Kind::invalid_max:
      break;
  }
  const auto& theta_prime = prop.theta;
  const double det = deterministic_log_ratio(model, theta, prop);
  const double a1 = det + mpmc_log_random_factor(model, theta, theta_prime, forward.y,
                                                 forward.y_prime);
  const double a2 = det + sve_log_random_factor(model, theta, theta_prime, forward.w);
  if (rule.kind() == DecisionRule::Kind::invalid_max)
    return a2 > a1 + decision_tie_tolerance ? Estimator::sve : Estimator::mpmc;

  const double det_rev = deterministic_log_ratio(model, theta_prime, reversed(theta, prop));
  const double b1 = det_rev + mpmc_log_random_factor(model, theta_prime, theta, reverse.y,
                                                     reverse.y_prime);
  const double b2 = det_rev + sve_log_random_factor(model, theta_prime, theta, reverse.w);
  // min{r_i, r~_i} in the log domain
  const double m1 = std::min({a1, b1, 0.0});
  const double m2 = std::min({a2, b2, 0.0});
  return m2 > m1 + decision_tie_tolerance ? Estimator::sve : Estimator::mpmc;
}

template <class Obs>
struct Decision {
  Estimator choice;
  unsigned draws;
};

// Draws the decision auxiliaries from `rng` and applies the rule. The draws
// are discarded; acceptance uses fresh ones.
template <Model M>
Decision<typename M::Obs> decide(const DecisionRule& rule, const M& model,
                                 const typename M::Param& theta,
                                 const Proposal<typename M::Param>& prop, RandomStream& rng) {
  using Obs = typename M::Obs;
  switch (rule.kind()) {
    case DecisionRule::Kind::always_mpmc:
      return {Estimator::mpmc, 0};
    case DecisionRule::Kind::always_sve:
      return {Estimator::sve, 0};
    default:
      break;
  }
  const auto& theta_prime = prop.theta;
  DecisionDraws<Obs> forward{model.sample_aux(theta, rng), model.sample_likelihood(theta_prime, rng),
                             model.sample_likelihood(theta_prime, rng)};
  if (rule.kind() == DecisionRule::Kind::invalid_max)
    return {decide_from_draws(rule, model, theta, prop, forward, forward), 3};
  DecisionDraws<Obs> reverse{model.sample_aux(theta_prime, rng), model.sample_likelihood(theta, rng),
                             model.sample_likelihood(theta, rng)};
  return {decide_from_draws(rule, model, theta, prop, forward, reverse), 6};
}

namespace detail {

template <Model M>
IterationRecord<typename M::Param> step_mabmc_any(const M& model, ChainState<M>& state,
                                                  const DecisionRule& rule, ChainStreams& rng) {
  auto prop = model.propose(state.theta, rng.proposal);
  const auto decision = decide(rule, model, state.theta, prop, rng.decision);
  const auto draw = draw_ratio(decision.choice, model, state.theta, prop, rng.aux);
  const unsigned accept_draws = decision.choice == Estimator::mpmc ? 2 : 1;
  auto rec = finish(state, prop, draw.log_a, decision.draws + accept_draws, rng.accept);
  rec.decision = decision.choice;
  return rec;
}

}  // namespace detail

// Multi-armed bandit MCMC: one proposal, a rule-driven choice between the MPMC
// and SVE ratios, then accept/reject with fresh auxiliaries for the chosen one.
template <Model M>
IterationRecord<typename M::Param> step_mabmc(const M& model, ChainState<M>& state,
                                              const DecisionRule& rule, ChainStreams& rng) {
  if (!rule.valid()) throw std::invalid_argument("step_mabmc: decision rule is not symmetric");
  return detail::step_mabmc_any(model, state, rule, rng);
}

namespace diagnostics {

// Same kernel as step_mabmc but accepts the asymmetric rule.
template <Model M>
IterationRecord<typename M::Param> step_mabmc_unchecked(const M& model, ChainState<M>& state,
                                                        const DecisionRule& rule,
                                                        ChainStreams& rng) {
  return detail::step_mabmc_any(model, state, rule, rng);
}

}  // namespace diagnostics

template <Model M>
IterationRecord<typename M::Param> step(SamplerKind kind, const DecisionRule& rule, const M& model,
                                        ChainState<M>& state, ChainStreams& rng) {
  switch (kind) {
    case SamplerKind::mh:
      return step_mh(model, state, rng);
    case SamplerKind::pmc:
      return step_pmc_joint(model, state, rng);
    case SamplerKind::mpmc:
      return step_mpmc(model, state, rng);
    case SamplerKind::sve:
      return step_sve(model, state, rng);
    case SamplerKind::mabmc:
      return detail::step_mabmc_any(model, state, rule, rng);
  }
  throw std::logic_error("unknown sampler kind");
}

namespace detail {

template <Model M>
ChainTrace<typename M::Param> run_chain_any(const M& model, SamplerKind kind,
                                            const DecisionRule& rule, std::size_t iterations,
                                            const typename M::Param& initial,
                                            const RandomStream& chain) {
  if (iterations < 1) throw std::invalid_argument("run_chain: iterations must be >= 1");
  if (kind == SamplerKind::mh && !model.log_normalizer(initial))
    throw std::logic_error("MH requires tractable likelihood");
  ChainStreams rng(chain);
  ChainState<M> state{initial, std::nullopt};
  if (kind == SamplerKind::pmc) state.joint_aux = model.sample_aux(initial, rng.aux);

  ChainTrace<typename M::Param> trace{kind, rule, chain.seed(), chain.stream_id(), {}};
  trace.records.reserve(iterations);
  for (std::size_t t = 0; t < iterations; ++t) {
    auto rec = step(kind, rule, model, state, rng);
    rec.iter = t;
    trace.records.push_back(std::move(rec));
  }
  return trace;
}

}  // namespace detail

template <Model M>
ChainTrace<typename M::Param> run_chain(const M& model, SamplerKind kind, const DecisionRule& rule,
                                        std::size_t iterations, const typename M::Param& initial,
                                        const RandomStream& chain) {
  if (kind == SamplerKind::mabmc && !rule.valid())
    throw std::invalid_argument("run_chain: decision rule is not symmetric");
  return detail::run_chain_any(model, kind, rule, iterations, initial, chain);
}

namespace diagnostics {

template <Model M>
ChainTrace<typename M::Param> run_chain_unchecked(const M& model, SamplerKind kind,
                                                  const DecisionRule& rule, std::size_t iterations,
                                                  const typename M::Param& initial,
                                                  const RandomStream& chain) {
  return detail::run_chain_any(model, kind, rule, iterations, initial, chain);
}

}  // namespace diagnostics

}  // namespace dimc
