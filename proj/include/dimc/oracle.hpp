#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "dimc/estimators.hpp"
#include "dimc/models/toy.hpp"
#include "dimc/rational.hpp"
#include "dimc/samplers.hpp"

// Exact computations on finite models by brute-force enumeration over every
// auxiliary-variable outcome. Works from the ToySpec probability tables in
// rational arithmetic and shares no code path with the samplers.
namespace dimc::oracle {

struct TransitionMatrix {
  std::vector<std::string> states;
  std::vector<std::vector<Rational>> probs;  // row-stochastic

  std::size_t size() const { return states.size(); }
};

struct EnumerationOptions {
  std::uint64_t max_terms = 100'000'000;
};

class EnumerationTooLarge : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Flow {
  std::size_t from;
  std::size_t to;
  double forward;   // pi_i P_ij
  double backward;  // pi_j P_ji
  double residual;
};

struct BalanceReport {
  double max_residual = 0.0;
  std::size_t worst_from = 0;
  std::size_t worst_to = 0;
  std::vector<Flow> flows;  // i < j pairs
};

struct EstimatorMoments {
  Rational mean;                     // E[random factor]
  Rational relative_second_moment;   // E[(a_hat / a - 1)^2]
};

// pi(theta | x) over the labels.
std::vector<Rational> exact_posterior(const ToySpec& spec);
// pi(theta | x) pi(y | x, theta) over joint states (theta major, y minor).
std::vector<Rational> joint_posterior(const ToySpec& spec);

// Z(theta) / Z(theta') = sum_y f_theta(y) / sum_y f_theta'(y).
Rational normalizer_ratio(const ToySpec& spec, std::size_t theta, std::size_t theta_prime);

// E min{a_hat(theta, theta'), 1} for one estimator (proposal factor excluded).
Rational acceptance(const ToySpec& spec, std::size_t theta, std::size_t theta_prime, Estimator kind);
// E min{a, 1} with the exact M-H ratio.
Rational mh_acceptance(const ToySpec& spec, std::size_t theta, std::size_t theta_prime);
// P(D = MPMC | theta, theta') over all decision-draw outcomes.
Rational decision_probability(const ToySpec& spec, std::size_t theta, std::size_t theta_prime,
                              const DecisionRule& rule);
// Acceptance of the rule-mixed kernel: P(D=1) r_1 + P(D=2) r_2.
Rational mabmc_acceptance(const ToySpec& spec, std::size_t theta, std::size_t theta_prime,
                          const DecisionRule& rule);

// Over the parameter labels for mh/mpmc/sve/mabmc; over (theta, y) states for
// pmc. Throws EnumerationTooLarge ("enumeration too large") past the cap.
TransitionMatrix enumerate_transition_matrix(const ToySpec& spec, SamplerKind kind,
                                             const DecisionRule& rule,
                                             const EnumerationOptions& options = {});

// Throws std::invalid_argument on dimension mismatch or non-positive mass.
BalanceReport check_detailed_balance(const TransitionMatrix& tm,
                                     const std::vector<Rational>& posterior);

EstimatorMoments exact_estimator_moments(const ToySpec& spec, std::size_t theta,
                                         std::size_t theta_prime, Estimator kind);

// Exact left eigenvector for eigenvalue 1. Throws std::invalid_argument for a
// reducible chain.
std::vector<Rational> stationary_distribution(const TransitionMatrix& tm);

// Posterior-weighted average acceptance: sum_t pi(t|x) sum_t' q(t'|t) P(accept).
Rational average_acceptance(const ToySpec& spec, SamplerKind kind, const DecisionRule& rule);

void write_balance_report(std::ostream& out, const TransitionMatrix& tm, const BalanceReport& report);
void write_transition_csv(std::ostream& out, const TransitionMatrix& tm);

}  // namespace dimc::oracle
