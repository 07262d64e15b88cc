#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dimc/estimators.hpp"
#include "dimc/experiments/config.hpp"
#include "dimc/experiments/output.hpp"
#include "dimc/rational.hpp"

namespace dimc {

// Pooled post-burn-in draws for one (grid point, sampler).
struct PosteriorRow {
  std::string grid_label;
  SamplerKind sampler = SamplerKind::mpmc;
  double mean = 0.0;
  double sd = 0.0;
  double q025 = 0.0;
  double q975 = 0.0;
  std::size_t draws = 0;
  std::optional<double> exact_mean;
  std::optional<double> exact_sd;
};

// One of the eight reference acceptance probabilities of the two toy models.
struct OracleValue {
  std::string toy;        // "toy1" / "toy2"
  std::string direction;  // "a->b" / "b->a"
  Estimator estimator = Estimator::mpmc;
  Rational exact;
  Rational reference;
  bool matches() const { return exact == reference; }
};

// Exact toy move probabilities q(t'|t) E min{a_hat, 1} next to the reference values.
std::vector<OracleValue> oracle_reference_check();

struct ExperimentResult {
  SweepSummary summary;
  std::vector<PosteriorRow> posterior;
  std::vector<OracleValue> oracle;
  std::filesystem::path directory;
  std::vector<std::filesystem::path> files;
  bool oracle_mismatch = false;
};

// Runs every (grid point x sampler x seed) chain and writes the artifacts
// under config.output_dir / config.name. Progress goes to `log`.
ExperimentResult run_experiment(const ExperimentConfig& config, std::ostream& log);

// Formats a sweep grid value as used in file names and CSV rows.
std::string grid_label(double value);

}  // namespace dimc
