#include "wolff_kernel.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace dimc::testing {

SpinConfiguration config_from_index(std::size_t side, std::size_t index) {
  std::vector<std::int8_t> spins(side * side);
  for (std::size_t i = 0; i < spins.size(); ++i) spins[i] = (index >> i) & 1u ? 1 : -1;
  return SpinConfiguration(side, std::move(spins));
}

std::size_t index_of(const SpinConfiguration& config) {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < config.size(); ++i)
    if (config[i] > 0) idx |= std::size_t{1} << i;
  return idx;
}

std::vector<double> boltzmann_weights(std::size_t side, double coupling, double beta) {
  const std::size_t states = std::size_t{1} << (side * side);
  std::vector<double> w(states);
  for (std::size_t s = 0; s < states; ++s)
    w[s] = std::exp(-beta * ising_energy(coupling, config_from_index(side, s)));
  const double z = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& v : w) v /= z;
  return w;
}

namespace {

std::vector<std::pair<std::size_t, std::size_t>> lattice_bonds(std::size_t side) {
  std::vector<std::pair<std::size_t, std::size_t>> bonds;
  for (std::size_t r = 0; r < side; ++r)
    for (std::size_t c = 0; c < side; ++c) {
      const std::size_t i = r * side + c;
      if (c + 1 < side) bonds.emplace_back(i, i + 1);
      if (r + 1 < side) bonds.emplace_back(i, i + side);
    }
  return bonds;
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t i) {
  while (parent[i] != i) i = parent[i] = parent[parent[i]];
  return i;
}

}  // namespace

Matrix wolff_kernel(std::size_t side, double coupling, double beta) {
  const std::size_t sites = side * side;
  if (sites > 16) throw std::invalid_argument("wolff_kernel: lattice too large to enumerate");
  const std::size_t states = std::size_t{1} << sites;
  const double bj = beta * coupling;
  const double p = -std::expm1(-2.0 * std::abs(bj));
  const int relation = bj < 0.0 ? -1 : 1;
  const auto bonds = lattice_bonds(side);

  Matrix k(states, std::vector<double>(states, 0.0));
  std::vector<std::size_t> parent(sites);
  for (std::size_t s = 0; s < states; ++s) {
    const auto cfg = config_from_index(side, s);
    std::vector<std::size_t> eligible;
    for (std::size_t b = 0; b < bonds.size(); ++b)
      if (cfg[bonds[b].second] == relation * cfg[bonds[b].first]) eligible.push_back(b);
    const std::size_t patterns = std::size_t{1} << eligible.size();
    for (std::size_t open = 0; open < patterns; ++open) {
      const auto n_open = static_cast<int>(__builtin_popcountll(open));
      const double w = std::pow(p, n_open) *
                       std::pow(1.0 - p, static_cast<int>(eligible.size()) - n_open);
      if (w == 0.0) continue;
      std::iota(parent.begin(), parent.end(), std::size_t{0});
      for (std::size_t e = 0; e < eligible.size(); ++e)
        if (open >> e & 1u) {
          const auto [a, b] = bonds[eligible[e]];
          parent[find_root(parent, a)] = find_root(parent, b);
        }
      for (std::size_t seed = 0; seed < sites; ++seed) {
        const std::size_t root = find_root(parent, seed);
        std::size_t next = s;
        for (std::size_t i = 0; i < sites; ++i)
          if (find_root(parent, i) == root) next ^= std::size_t{1} << i;
        k[s][next] += w / static_cast<double>(sites);
      }
    }
  }
  return k;
}

double invariance_residual(const Matrix& kernel, const std::vector<double>& pi) {
  double worst = 0.0;
  for (std::size_t t = 0; t < pi.size(); ++t) {
    double mass = 0.0;
    for (std::size_t s = 0; s < pi.size(); ++s) mass += pi[s] * kernel[s][t];
    worst = std::max(worst, std::abs(mass - pi[t]));
  }
  return worst;
}

}  // namespace dimc::testing
