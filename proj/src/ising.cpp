#include "dimc/models/ising.hpp"

#include <fmt/format.h>

#include <array>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "dimc/models/gaussian.hpp"

namespace dimc {

SpinConfiguration::SpinConfiguration(std::size_t side, std::int8_t fill)
    : side_(side), spins_(side * side, fill) {
  if (side < 2) throw std::invalid_argument("spin configuration: side must be >= 2");
  if (fill != 1 && fill != -1) throw std::invalid_argument("spin configuration: spins must be +-1");
}

SpinConfiguration::SpinConfiguration(std::size_t side, std::vector<std::int8_t> spins)
    : side_(side), spins_(std::move(spins)) {
  if (side < 2) throw std::invalid_argument("spin configuration: side must be >= 2");
  if (spins_.size() != side * side)
    throw std::invalid_argument("spin configuration: expected side*side spins");
  for (auto s : spins_)
    if (s != 1 && s != -1) throw std::invalid_argument("spin configuration: spins must be +-1");
}

SpinConfiguration SpinConfiguration::random(std::size_t side, RandomStream& rng) {
  std::vector<std::int8_t> spins(side * side);
  for (auto& s : spins) s = (rng() >> 63) ? 1 : -1;
  return SpinConfiguration(side, std::move(spins));
}

SpinConfiguration SpinConfiguration::checkerboard(std::size_t side) {
  std::vector<std::int8_t> spins(side * side);
  for (std::size_t r = 0; r < side; ++r)
    for (std::size_t c = 0; c < side; ++c) spins[r * side + c] = ((r + c) % 2 == 0) ? 1 : -1;
  return SpinConfiguration(side, std::move(spins));
}

int SpinConfiguration::neighbour_sum(std::size_t site) const {
  const std::size_t r = site / side_;
  const std::size_t c = site % side_;
  int sum = 0;
  if (r > 0) sum += spins_[site - side_];
  if (r + 1 < side_) sum += spins_[site + side_];
  if (c > 0) sum += spins_[site - 1];
  if (c + 1 < side_) sum += spins_[site + 1];
  return sum;
}

long bond_sum(const SpinConfiguration& config) {
  const std::size_t n = config.side();
  long sum = 0;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const int s = config.at(r, c);
      if (c + 1 < n) sum += s * config.at(r, c + 1);
      if (r + 1 < n) sum += s * config.at(r + 1, c);
    }
  }
  return sum;
}

double ising_energy(double coupling, const SpinConfiguration& config) {
  return -coupling * static_cast<double>(bond_sum(config));
}

double total_energy(double coupling, const IsingData& data) {
  long bonds = 0;
  for (const auto& c : data) bonds += bond_sum(c);
  return -coupling * static_cast<double>(bonds);
}

std::size_t wolff_update(SpinConfiguration& config, double beta, double coupling, RandomStream& rng,
                         WolffWorkspace& ws) {
  const std::size_t n = config.side();
  const std::size_t sites = config.size();
  const double bj = beta * coupling;
  const double p_bond = -std::expm1(-2.0 * std::abs(bj));
  const int relation = bj < 0.0 ? -1 : 1;

  ws.in_cluster.assign(sites, 0);
  ws.stack.clear();
  const std::size_t seed = rng.index(sites);
  ws.in_cluster[seed] = 1;
  ws.stack.push_back(seed);
  std::size_t cluster = 1;

  auto consider = [&](std::size_t from, std::size_t to) {
    if (ws.in_cluster[to]) return;
    if (config[to] != relation * config[from]) return;
    if (!(p_bond > 0.0) || rng.uniform() >= p_bond) return;
    ws.in_cluster[to] = 1;
    ws.stack.push_back(to);
    ++cluster;
  };

  while (!ws.stack.empty()) {
    const std::size_t site = ws.stack.back();
    ws.stack.pop_back();
    const std::size_t r = site / n;
    const std::size_t c = site % n;
    if (r > 0) consider(site, site - n);
    if (r + 1 < n) consider(site, site + n);
    if (c > 0) consider(site, site - 1);
    if (c + 1 < n) consider(site, site + 1);
  }
  for (std::size_t s = 0; s < sites; ++s)
    if (ws.in_cluster[s]) config.flip(s);
  return cluster;
}

std::size_t wolff_update(SpinConfiguration& config, double beta, double coupling,
                         RandomStream& rng) {
  WolffWorkspace ws;
  return wolff_update(config, beta, coupling, rng, ws);
}

IsingData sample_ising(std::size_t side, double coupling, double beta, std::size_t count,
                       std::size_t updates, RandomStream& rng) {
  IsingData out;
  out.reserve(count);
  WolffWorkspace ws;
  for (std::size_t m = 0; m < count; ++m) {
    auto config = SpinConfiguration::random(side, rng);
    for (std::size_t u = 0; u < updates; ++u) wolff_update(config, beta, coupling, rng, ws);
    out.push_back(std::move(config));
  }
  return out;
}

namespace {

// log(2 cosh z) without overflow
double log_two_cosh(double z) {
  const double a = std::abs(z);
  return a + std::log1p(std::exp(-2.0 * a));
}

// counts[n + 4][s > 0]: how many sites have neighbour sum n and spin s
using SiteHistogram = std::array<std::array<long, 2>, 9>;

SiteHistogram site_histogram(const IsingData& data) {
  SiteHistogram h{};
  for (const auto& config : data)
    for (std::size_t k = 0; k < config.size(); ++k)
      ++h[static_cast<std::size_t>(config.neighbour_sum(k) + 4)][config[k] > 0 ? 1 : 0];
  return h;
}

PseudoLikelihood evaluate(double coupling, const SiteHistogram& h, double beta) {
  PseudoLikelihood pl{0.0, 0.0, 0.0};
  for (int n = -4; n <= 4; ++n) {
    for (int up = 0; up < 2; ++up) {
      const long count = h[static_cast<std::size_t>(n + 4)][static_cast<std::size_t>(up)];
      if (count == 0) continue;
      const double s = up ? 1.0 : -1.0;
      const double z = beta * coupling * n;
      const double t = std::tanh(z);
      pl.value += count * (z * s - log_two_cosh(z));
      pl.gradient += count * coupling * n * (s - t);
      pl.hessian -= count * coupling * coupling * n * n * (1.0 - t * t);
    }
  }
  return pl;
}

}  // namespace

PseudoLikelihood pseudo_log_likelihood(double coupling, const IsingData& data, double beta) {
  return evaluate(coupling, site_histogram(data), beta);
}

MpleResult ising_mple(double coupling, const IsingData& data, double clamp) {
  if (data.empty()) throw std::invalid_argument("ising_mple: empty dataset");
  if (coupling == 0.0) throw std::invalid_argument("ising_mple: coupling must be non-zero");
  const auto h = site_histogram(data);
  const double bound = clamp / std::abs(coupling);
  MpleResult result;

  auto record = [&](double beta) {
    const auto pl = evaluate(coupling, h, beta);
    result.iterates.push_back(beta);
    result.hessians.push_back(pl.hessian);
    if (pl.hessian > 0.0) result.concave_at_every_iterate = false;
    return pl;
  };

  const auto at_zero = record(0.0);
  if (at_zero.hessian == 0.0) {
    // every neighbour sum vanishes: the pseudo-likelihood is flat
    result.beta_hat = 0.0;
    return result;
  }
  if (record(bound).gradient >= 0.0) {
    result.beta_hat = bound;
    result.clamped = true;
    return result;
  }
  if (record(-bound).gradient <= 0.0) {
    result.beta_hat = -bound;
    result.clamped = true;
    return result;
  }

  double lo = -bound, hi = bound;
  double beta = 0.0;
  PseudoLikelihood pl = at_zero;
  for (int iter = 0; iter < 200; ++iter) {
    if (pl.gradient > 0.0) lo = beta; else hi = beta;
    double next = pl.hessian < 0.0 ? beta - pl.gradient / pl.hessian : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = next - beta;
    beta = next;
    pl = record(beta);
    if (std::abs(step) <= 1e-13 * std::max(1.0, std::abs(beta)) || pl.gradient == 0.0) break;
  }
  result.beta_hat = beta;
  return result;
}

void IsingSpec::validate() const {
  if (side < 2) throw std::invalid_argument("ising model: side must be >= 2");
  if (!std::isfinite(coupling) || coupling == 0.0)
    throw std::invalid_argument("ising model: coupling must be finite and non-zero");
  if (!(prior_sd > 0.0) || !(proposal_sd > 0.0))
    throw std::invalid_argument("ising model: prior and proposal sd must be positive");
  if (dataset.empty()) throw std::invalid_argument("ising model: dataset must be non-empty");
  for (const auto& c : dataset)
    if (c.side() != side) throw std::invalid_argument("ising model: configuration side mismatch");
}

IsingModel::IsingModel(IsingSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  mple_ = ising_mple(spec_.coupling, spec_.dataset);
}

LogDensity IsingModel::log_prior(Param beta) const {
  return {normal_log_pdf(beta, spec_.prior_mean, spec_.prior_sd)};
}

LogDensity IsingModel::log_f(Param beta, const Obs& data) const {
  return {-beta * total_energy(spec_.coupling, data)};
}

IsingModel::Obs IsingModel::sample_likelihood(Param beta, RandomStream& rng) const {
  return sample_ising(spec_.side, spec_.coupling, beta, spec_.dataset.size(), spec_.wolff_burn_in,
                      rng);
}

IsingModel::Obs IsingModel::sample_aux(Param, RandomStream& rng) const {
  return sample_ising(spec_.side, spec_.coupling, mple_.beta_hat, spec_.dataset.size(),
                      spec_.wolff_burn_in, rng);
}

LogDensity IsingModel::aux_log_density(const Obs& y, Param) const {
  return {-mple_.beta_hat * total_energy(spec_.coupling, y), DensityTag::up_to_constant};
}

Proposal<IsingModel::Param> IsingModel::propose(Param beta, RandomStream& rng) const {
  const double next = rng.normal(beta, spec_.proposal_sd);
  const double lq = normal_log_pdf(next, beta, spec_.proposal_sd);
  return {next, lq, lq};
}

std::string IsingModel::describe(Param beta) const { return fmt::format("{:.17g}", beta); }

IsingModel build_ising(IsingSpec spec) { return IsingModel(std::move(spec)); }

void write_ising_dataset(std::ostream& out, double coupling, const IsingData& data) {
  if (data.empty()) throw std::invalid_argument("write_ising_dataset: empty dataset");
  out << fmt::format("ising {} {:.17g} {}\n", data.front().side(), coupling, data.size());
  for (const auto& config : data) {
    std::string line;
    for (std::size_t k = 0; k < config.size(); ++k) {
      if (k) line += ' ';
      line += config[k] > 0 ? "1" : "-1";
    }
    out << line << '\n';
  }
}

IsingDatasetFile read_ising_dataset(std::istream& in) {
  IsingDatasetFile file;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw std::runtime_error(fmt::format("ising dataset line {}: {}", line_no, what));
  };
  if (!std::getline(in, line)) {
    line_no = 1;
    fail("missing header");
  }
  ++line_no;
  std::istringstream header(line);
  std::string magic;
  std::size_t count = 0;
  if (!(header >> magic >> file.side >> file.coupling >> count) || magic != "ising")
    fail("expected header 'ising N J count'");
  if (file.side < 2) fail("N must be >= 2");
  for (std::size_t m = 0; m < count; ++m) {
    if (!std::getline(in, line)) {
      ++line_no;
      fail(fmt::format("expected {} configurations, found {}", count, m));
    }
    ++line_no;
    std::istringstream row(line);
    std::vector<std::int8_t> spins;
    int v = 0;
    while (row >> v) {
      if (v != 1 && v != -1) fail("spins must be 1 or -1");
      spins.push_back(static_cast<std::int8_t>(v));
    }
    if (!row.eof()) fail("non-integer token");
    if (spins.size() != file.side * file.side)
      fail(fmt::format("expected {} spins, found {}", file.side * file.side, spins.size()));
    file.configs.emplace_back(file.side, std::move(spins));
  }
  return file;
}

}  // namespace dimc
