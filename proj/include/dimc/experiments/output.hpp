#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dimc/samplers.hpp"

namespace dimc {

struct SummaryRow {
  std::string grid_label;  // as written in the CSV
  double grid_value = 0.0; // x coordinate for plots
  SamplerKind sampler = SamplerKind::mpmc;
  double avg_accept = 0.0;  // mean of min{a_hat, 1} over iterations and seeds
  double se = 0.0;
  std::optional<double> accept_per_draw;
  std::optional<double> decision_mpmc_frac;  // MABMC only
  std::optional<double> decision_sve_frac;
  std::size_t seed_count = 0;
};

struct SweepSummary {
  std::string title;
  std::string x_label;
  std::vector<SummaryRow> rows;

  const SummaryRow* find(const std::string& grid_label, SamplerKind sampler) const;
  std::vector<SamplerKind> samplers() const;  // in first-appearance order
};

inline constexpr const char* summary_header =
    "grid_value,sampler,avg_accept,se,accept_per_draw,decision_mpmc_frac,decision_sve_frac,seed_count";
inline constexpr const char* trace_header =
    "iter,theta_before,theta_proposed,decision,log_a,accepted,accept_prob,draws";

// 10 significant digits.
std::string format_number(double v);

void write_summary_csv(std::ostream& out, const SweepSummary& summary);
void write_plot_svg(std::ostream& out, const SweepSummary& summary);

// Throws std::runtime_error naming the path on I/O failure.
void write_file(const std::filesystem::path& path, const std::string& contents);
void emit_summary_csv(const SweepSummary& summary, const std::filesystem::path& path);
void emit_plot_svg(const SweepSummary& summary, const std::filesystem::path& path);

// One trace row; `format` turns a parameter into its CSV field.
template <class Param, class Format>
void write_trace_rows(std::string& out, const ChainTrace<Param>& trace, Format&& format);

}  // namespace dimc

#include <fmt/format.h>

namespace dimc {

template <class Param, class Format>
void write_trace_rows(std::string& out, const ChainTrace<Param>& trace, Format&& format) {
  auto it = std::back_inserter(out);
  for (const auto& r : trace.records) {
    fmt::format_to(it, "{},{},{},{},{:.17g},{},{:.17g},{}\n", r.iter, format(r.theta_before),
                   format(r.theta_proposed), r.decision ? to_string(*r.decision) : "", r.log_a,
                   r.accepted ? 1 : 0, r.accept_prob, r.draws);
  }
}

}  // namespace dimc
