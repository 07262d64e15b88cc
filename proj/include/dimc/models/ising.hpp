#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dimc/model.hpp"

namespace dimc {

// N x N lattice of +-1 spins, row-major, open (free) boundaries.
class SpinConfiguration {
public:
  explicit SpinConfiguration(std::size_t side, std::int8_t fill = 1);
  SpinConfiguration(std::size_t side, std::vector<std::int8_t> spins);

  static SpinConfiguration random(std::size_t side, RandomStream& rng);
  static SpinConfiguration checkerboard(std::size_t side);

  std::size_t side() const { return side_; }
  std::size_t size() const { return spins_.size(); }
  std::int8_t operator[](std::size_t site) const { return spins_[site]; }
  std::int8_t at(std::size_t row, std::size_t col) const { return spins_[row * side_ + col]; }
  void flip(std::size_t site) { spins_[site] = static_cast<std::int8_t>(-spins_[site]); }
  std::span<const std::int8_t> spins() const { return spins_; }

  // Sum of the nearest-neighbour spins of `site`.
  int neighbour_sum(std::size_t site) const;

  friend bool operator==(const SpinConfiguration&, const SpinConfiguration&) = default;

private:
  std::size_t side_;
  std::vector<std::int8_t> spins_;
};

using IsingData = std::vector<SpinConfiguration>;

// Sum over nearest-neighbour bonds of s_i * s_j, each bond once.
long bond_sum(const SpinConfiguration& config);
// H(s) = -J * bond_sum(s).
double ising_energy(double coupling, const SpinConfiguration& config);
double total_energy(double coupling, const IsingData& data);

struct WolffWorkspace {
  std::vector<std::size_t> stack;
  std::vector<char> in_cluster;
};

// One Wolff cluster flip targeting p_beta(s) ~ exp(-beta H(s)). Bonds join
// neighbours whose spins agree with sign(beta J) times the current site spin,
// with probability 1 - exp(-2 |beta J|); for beta J < 0 this is the
// sublattice-gauged cluster move, which is exact on the bipartite lattice.
// Returns the cluster size.
std::size_t wolff_update(SpinConfiguration& config, double beta, double coupling, RandomStream& rng,
                         WolffWorkspace& workspace);
std::size_t wolff_update(SpinConfiguration& config, double beta, double coupling,
                         RandomStream& rng);

// Independent draws, each from a uniform random start followed by `updates`
// Wolff updates.
IsingData sample_ising(std::size_t side, double coupling, double beta, std::size_t count,
                       std::size_t updates, RandomStream& rng);

struct PseudoLikelihood {
  double value;
  double gradient;
  double hessian;
};

PseudoLikelihood pseudo_log_likelihood(double coupling, const IsingData& data, double beta);

struct MpleResult {
  double beta_hat = 0.0;
  bool clamped = false;
  bool concave_at_every_iterate = true;
  std::vector<double> iterates;
  std::vector<double> hessians;
};

// Maximum pseudo-likelihood estimate of beta by safeguarded Newton, confined
// to |beta| <= clamp / J.
MpleResult ising_mple(double coupling, const IsingData& data, double clamp = 50.0);

struct IsingSpec {
  std::size_t side = 5;
  double coupling = 0.1;
  double prior_mean = 0.0;
  double prior_sd = 1.0;
  double proposal_sd = 0.05;
  std::size_t wolff_burn_in = 200;
  IsingData dataset;

  void validate() const;
};

// Posterior over beta given a dataset of configurations. f_beta(data) =
// exp(-beta sum_m H(s_m)); the auxiliary density is p_{beta_hat} at the MPLE,
// evaluated up to the constant -count * log Z(beta_hat).
class IsingModel {
public:
  using Param = double;
  using Obs = IsingData;

  explicit IsingModel(IsingSpec spec);

  const IsingSpec& spec() const { return spec_; }
  double mple() const { return mple_.beta_hat; }
  const MpleResult& mple_result() const { return mple_; }

  LogDensity log_prior(Param beta) const;
  LogDensity log_f(Param beta, const Obs& data) const;
  Obs sample_likelihood(Param beta, RandomStream& rng) const;
  Obs sample_aux(Param beta, RandomStream& rng) const;
  LogDensity aux_log_density(const Obs& y, Param beta) const;
  Proposal<Param> propose(Param beta, RandomStream& rng) const;
  const Obs& observed() const { return spec_.dataset; }
  std::optional<double> log_normalizer(Param) const { return std::nullopt; }
  bool likelihood_sampler_exact() const { return false; }
  std::string describe(Param beta) const;

private:
  IsingSpec spec_;
  MpleResult mple_;
};

IsingModel build_ising(IsingSpec spec);

// Plain-text dataset: "ising N J count", then one row-major line of +-1 per
// configuration.
struct IsingDatasetFile {
  std::size_t side = 0;
  double coupling = 0.0;
  IsingData configs;
};

void write_ising_dataset(std::ostream& out, double coupling, const IsingData& data);
// Throws std::runtime_error with a line number on malformed input.
IsingDatasetFile read_ising_dataset(std::istream& in);

}  // namespace dimc
