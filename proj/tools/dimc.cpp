// dimc: command-line runner for the doubly-intractable MCMC experiments.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "dimc/experiments/config.hpp"
#include "dimc/experiments/runner.hpp"
#include "dimc/models/ising.hpp"

namespace {

enum Exit { ok = 0, config_error = 1, runtime_error = 2, oracle_mismatch = 3 };

std::filesystem::path default_output_dir() {
  const char* env = std::getenv("DIMC_OUTPUT_DIR");
  return env && *env ? std::filesystem::path(env) : std::filesystem::path("dimc-out");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Doubly-intractable MCMC experiments (MPMC, SVE, MABMC)"};
  app.require_subcommand(1);

  std::string config_path, seeds, grid, samplers, out_dir;
  std::size_t iterations = 0;
  bool oracle_check = false;
  auto* run = app.add_subcommand("run", "run every experiment section of a config file");
  run->add_option("config", config_path, "config file")->required();
  run->add_option("--seed", seeds, "comma-separated seeds");
  run->add_option("--iterations", iterations, "iterations per chain");
  run->add_option("--out", out_dir, "output directory (default $DIMC_OUTPUT_DIR or dimc-out)");
  run->add_option("--grid", grid, "comma-separated grid or start:stop:step");
  run->add_option("--samplers", samplers, "comma-separated subset of mh,pmc,mpmc,sve,mabmc");
  run->add_flag("--oracle-check", oracle_check, "also run the exact toy-model oracle");

  std::string oracle_out;
  auto* oracle = app.add_subcommand("oracle", "exact toy-model acceptance and balance reports");
  oracle->add_option("--out", oracle_out, "output directory");

  std::size_t side = 10, count = 10, burn_in = 1000;
  double coupling = 0.1, beta = 0.0;
  std::uint64_t seed = 1;
  std::string data_path;
  auto* gen = app.add_subcommand("ising-generate", "write a synthetic Ising dataset");
  gen->add_option("--side", side, "lattice side N")->check(CLI::Range(2, 100000));
  gen->add_option("--coupling", coupling, "coupling J");
  gen->add_option("--beta", beta, "inverse temperature")->required();
  gen->add_option("--count", count, "number of configurations")->check(CLI::PositiveNumber);
  gen->add_option("--burn-in", burn_in, "Wolff updates per configuration");
  gen->add_option("--seed", seed, "seed");
  gen->add_option("output", data_path, "dataset file")->required();

  std::string mple_path;
  auto* mple = app.add_subcommand("ising-mple", "maximum pseudo-likelihood estimate of beta");
  mple->add_option("dataset", mple_path, "dataset file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : config_error;
  }

  try {
    if (*run) {
      dimc::ConfigOverrides o;
      if (!seeds.empty()) o.seeds = dimc::parse_seed_list(seeds);
      if (iterations) o.iterations = iterations;
      if (!out_dir.empty()) o.output_dir = out_dir;
      if (!grid.empty()) o.grid = dimc::parse_real_list(grid, "grid");
      if (!samplers.empty()) o.samplers = dimc::parse_sampler_list(samplers);
      o.oracle_check = oracle_check;
      auto configs = dimc::load_config(config_path, default_output_dir());
      for (auto& c : configs) dimc::apply_overrides(c, o);
      bool mismatch = false;
      for (const auto& c : configs) mismatch |= dimc::run_experiment(c, std::cout).oracle_mismatch;
      if (mismatch) {
        std::cerr << "oracle check: exact values disagree with the reference values\n";
        return oracle_mismatch;
      }
      return ok;
    }
    if (*oracle) {
      dimc::ExperimentConfig c;
      c.name = "oracle";
      c.experiment = dimc::ExperimentKind::oracle_check;
      c.output_dir = oracle_out.empty() ? default_output_dir() : std::filesystem::path(oracle_out);
      if (dimc::run_experiment(c, std::cout).oracle_mismatch) {
        std::cerr << "oracle check: exact values disagree with the reference values\n";
        return oracle_mismatch;
      }
      return ok;
    }
    if (*gen) {
      dimc::RandomStream rng(seed);
      const auto data = dimc::sample_ising(side, coupling, beta, count, burn_in, rng);
      std::ofstream f(data_path, std::ios::binary);
      if (!f) throw std::runtime_error(fmt::format("cannot write '{}'", data_path));
      dimc::write_ising_dataset(f, coupling, data);
      if (!f) throw std::runtime_error(fmt::format("write failed for '{}'", data_path));
      return ok;
    }
    if (*mple) {
      std::ifstream f(mple_path);
      if (!f) throw std::runtime_error(fmt::format("cannot read '{}'", mple_path));
      const auto file = dimc::read_ising_dataset(f);
      const auto r = dimc::ising_mple(file.coupling, file.configs);
      std::cout << fmt::format("{:.10g}\n", r.beta_hat);
      if (r.clamped) std::cerr << "warning: estimate clamped to the boundary\n";
      return ok;
    }
  } catch (const dimc::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return config_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return runtime_error;
  }
  return ok;
}
