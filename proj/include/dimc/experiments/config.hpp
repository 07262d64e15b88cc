#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dimc/samplers.hpp"

namespace dimc {

enum class ExperimentKind { toy1, toy2, gaussian_sweep, ising_sweep, oracle_check };

std::string_view to_string(ExperimentKind kind);
std::optional<ExperimentKind> parse_experiment_kind(std::string_view name);

// One run. Every knob has a default (J = 0.1, N = 10, 20000 iterations,
// sigma2 grid 0.1..1.0).
struct ExperimentConfig {
  std::string name = "experiment";
  ExperimentKind experiment = ExperimentKind::gaussian_sweep;
  std::vector<SamplerKind> samplers{SamplerKind::mpmc, SamplerKind::sve, SamplerKind::mabmc};
  DecisionRule rule = DecisionRule::max_min();
  std::size_t iterations = 20000;
  std::vector<std::uint64_t> seeds{1};
  std::vector<double> grid;  // sigma2 (gaussian) or beta (ising)
  double burn_in_fraction = 0.2;

  // gaussian
  double observation = 1.0;
  double gaussian_proposal_sd = 1.0;

  // ising
  std::size_t side = 10;
  double coupling = 0.1;
  double prior_mean = 0.0;
  double prior_sd = 1.0;
  double proposal_sd = 0.05;
  std::size_t wolff_burn_in = 200;
  std::size_t data_burn_in = 1000;
  std::size_t configs = 10;
  std::uint64_t data_seed = 20190101;

  std::filesystem::path output_dir = "dimc-out";
  bool oracle_check = false;
  bool write_traces = true;
  std::size_t threads = 0;  // 0: hardware concurrency

  bool is_sweep() const {
    return experiment == ExperimentKind::gaussian_sweep || experiment == ExperimentKind::ising_sweep;
  }
};

// Carries the config line (0 when not tied to one) and the field name.
class ConfigError : public std::runtime_error {
public:
  ConfigError(std::size_t line, std::string field, const std::string& message);
  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }
  const std::string& message() const { return message_; }

private:
  std::size_t line_;
  std::string field_;
  std::string message_;
};

// Flat "key = value" text with one [section] per experiment. Keys before the
// first section are shared defaults. '#' and ';' start comments.
std::vector<ExperimentConfig> parse_config(std::string_view text,
                                           const std::filesystem::path& default_output_dir = "dimc-out");
std::vector<ExperimentConfig> load_config(const std::filesystem::path& path,
                                          const std::filesystem::path& default_output_dir = "dimc-out");

// Throws ConfigError.
void validate(const ExperimentConfig& config);

struct ConfigOverrides {
  std::optional<std::vector<std::uint64_t>> seeds;
  std::optional<std::size_t> iterations;
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::vector<double>> grid;
  std::optional<std::vector<SamplerKind>> samplers;
  bool oracle_check = false;
};

void apply_overrides(ExperimentConfig& config, const ConfigOverrides& overrides);

// Comma-separated list parsers shared with the CLI; throw ConfigError.
std::vector<double> parse_real_list(std::string_view text, std::string_view field, std::size_t line = 0);
std::vector<std::uint64_t> parse_seed_list(std::string_view text, std::size_t line = 0);
std::vector<SamplerKind> parse_sampler_list(std::string_view text, std::size_t line = 0);

}  // namespace dimc
