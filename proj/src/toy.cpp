#include "dimc/models/toy.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace dimc {

namespace {

double log_of(const Rational& r) {
  return r > 0 ? std::log(to_double(r)) : neg_inf;
}

void require_distribution(const std::vector<Rational>& row, const std::string& what) {
  Rational total = 0;
  for (const auto& v : row) {
    if (v < 0) throw std::invalid_argument(what + ": negative probability");
    total += v;
  }
  if (total != 1) throw std::invalid_argument(what + ": probabilities must sum to 1");
}

std::vector<Rational> row(std::initializer_list<std::pair<int, int>> fractions) {
  std::vector<Rational> out;
  for (auto [num, den] : fractions) out.emplace_back(num, den);
  return out;
}

ToySpec two_point_spec(std::string name, std::vector<std::vector<Rational>> likelihood,
                       std::size_t observed) {
  const std::size_t nx = likelihood.front().size();
  ToySpec s;
  s.name = std::move(name);
  s.labels = {"a", "b"};
  s.likelihood = std::move(likelihood);
  s.scale = {Rational(2), Rational(5)};
  s.prior = row({{1, 2}, {1, 2}});
  s.proposal = {row({{1, 2}, {1, 2}}), row({{1, 2}, {1, 2}})};
  s.aux.assign(2, std::vector<Rational>(nx, Rational(1, static_cast<int>(nx))));
  s.observed = observed;
  s.validate();
  return s;
}

}  // namespace

void ToySpec::validate() const {
  const std::size_t n = num_params();
  const std::size_t nx = num_outcomes();
  if (n == 0 || nx == 0) throw std::invalid_argument("toy model: empty parameter or sample space");
  if (likelihood.size() != n || scale.size() != n || prior.size() != n || proposal.size() != n ||
      aux.size() != n)
    throw std::invalid_argument("toy model: table sizes disagree with label count");
  if (observed >= nx) throw std::invalid_argument("toy model: observed value outside sample space");
  require_distribution(prior, "toy model prior");
  for (std::size_t t = 0; t < n; ++t) {
    if (likelihood[t].size() != nx || aux[t].size() != nx || proposal[t].size() != n)
      throw std::invalid_argument("toy model: ragged table for label " + labels[t]);
    require_distribution(likelihood[t], "toy model likelihood " + labels[t]);
    require_distribution(aux[t], "toy model auxiliary " + labels[t]);
    require_distribution(proposal[t], "toy model proposal " + labels[t]);
    if (scale[t] <= 0) throw std::invalid_argument("toy model: scale must be positive");
    for (const auto& v : aux[t])
      if (v <= 0) throw std::invalid_argument("toy model: auxiliary must have full support");
  }
}

ToySpec toy_spec_1() {
  return two_point_spec("toy1", {row({{3, 10}, {7, 10}}), row({{4, 10}, {6, 10}})}, 1);
}

ToySpec toy_spec_2() {
  return two_point_spec(
      "toy2", {row({{1, 10}, {8, 10}, {1, 10}}), row({{8, 10}, {1, 10}, {1, 10}})}, 2);
}

ToyModel::ToyModel(ToySpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  const std::size_t n = spec_.num_params();
  const std::size_t nx = spec_.num_outcomes();
  auto to_doubles = [](const std::vector<std::vector<Rational>>& table) {
    std::vector<std::vector<double>> out;
    for (const auto& r : table) {
      auto& dst = out.emplace_back();
      for (const auto& v : r) dst.push_back(to_double(v));
    }
    return out;
  };
  auto to_logs = [](const std::vector<std::vector<Rational>>& table) {
    std::vector<std::vector<double>> out;
    for (const auto& r : table) {
      auto& dst = out.emplace_back();
      for (const auto& v : r) dst.push_back(log_of(v));
    }
    return out;
  };
  likelihood_ = to_doubles(spec_.likelihood);
  aux_ = to_doubles(spec_.aux);
  proposal_ = to_doubles(spec_.proposal);
  log_aux_ = to_logs(spec_.aux);
  log_proposal_ = to_logs(spec_.proposal);
  log_f_.assign(n, std::vector<double>(nx));
  for (std::size_t t = 0; t < n; ++t) {
    log_prior_.push_back(log_of(spec_.prior[t]));
    log_scale_.push_back(log_of(spec_.scale[t]));
    for (std::size_t y = 0; y < nx; ++y) log_f_[t][y] = log_of(spec_.f(t, y));
  }
}

LogDensity ToyModel::log_prior(Param theta) const {
  if (theta >= num_params()) return {neg_inf};
  return {log_prior_[theta]};
}

LogDensity ToyModel::log_f(Param theta, Obs y) const { return {log_f_.at(theta).at(y)}; }

ToyModel::Obs ToyModel::sample_likelihood(Param theta, RandomStream& rng) const {
  return rng.discrete(likelihood_.at(theta));
}

ToyModel::Obs ToyModel::sample_aux(Param theta, RandomStream& rng) const {
  return rng.discrete(aux_.at(theta));
}

LogDensity ToyModel::aux_log_density(Obs y, Param theta) const {
  return {log_aux_.at(theta).at(y)};
}

Proposal<ToyModel::Param> ToyModel::propose(Param theta, RandomStream& rng) const {
  const Param next = rng.discrete(proposal_.at(theta));
  return {next, log_proposal_[theta][next], log_proposal_[next][theta]};
}

std::optional<double> ToyModel::log_normalizer(Param theta) const {
  // Z(theta) = sum_y c_theta p_theta(y) = c_theta
  return log_scale_.at(theta);
}

ToyModel build_toy_1() { return ToyModel(toy_spec_1()); }
ToyModel build_toy_2() { return ToyModel(toy_spec_2()); }

}  // namespace dimc
