#include "dimc/experiments/config.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace dimc {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

[[noreturn]] void fail(std::size_t line, std::string_view field, const std::string& what) {
  throw ConfigError(line, std::string(field), what);
}

double parse_real(std::string_view text, std::string_view field, std::size_t line) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(v))
    fail(line, field, fmt::format("'{}' is not a finite number", text));
  return v;
}

std::uint64_t parse_unsigned(std::string_view text, std::string_view field, std::size_t line) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end)
    fail(line, field, fmt::format("'{}' is not a non-negative integer", text));
  return v;
}

bool parse_bool(std::string_view text, std::string_view field, std::size_t line) {
  if (text == "true" || text == "yes" || text == "1" || text == "on") return true;
  if (text == "false" || text == "no" || text == "0" || text == "off") return false;
  fail(line, field, fmt::format("'{}' is not a boolean", text));
}

struct Entry {
  std::string value;
  std::size_t line;
};

using Section = std::map<std::string, Entry, std::less<>>;

void set_defaults_for(ExperimentConfig& c) {
  switch (c.experiment) {
    case ExperimentKind::gaussian_sweep:
      c.grid = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
      break;
    case ExperimentKind::ising_sweep:
      c.grid = {0.1, 0.3, 0.5, 0.7, 0.9};
      break;
    case ExperimentKind::toy1:
    case ExperimentKind::toy2:
      c.samplers = {SamplerKind::mh, SamplerKind::pmc, SamplerKind::mpmc, SamplerKind::sve,
                    SamplerKind::mabmc};
      c.iterations = 100000;
      break;
    case ExperimentKind::oracle_check:
      c.samplers = {SamplerKind::mpmc, SamplerKind::sve, SamplerKind::mabmc};
      c.oracle_check = true;
      break;
  }
}

void apply_entry(ExperimentConfig& c, const std::string& key, const Entry& e) {
  const std::string_view v = e.value;
  const std::size_t line = e.line;
  if (key == "experiment") return;  // handled before defaults
  if (key == "samplers") c.samplers = parse_sampler_list(v, line);
  else if (key == "rule") {
    auto rule = DecisionRule::parse(v);
    if (!rule) fail(line, key, fmt::format("unknown decision rule '{}' (constant-1, constant-2, max-min)", v));
    c.rule = *rule;
  } else if (key == "iterations") c.iterations = parse_unsigned(v, key, line);
  else if (key == "seeds") c.seeds = parse_seed_list(v, line);
  else if (key == "grid") c.grid = parse_real_list(v, key, line);
  else if (key == "burn_in_fraction") c.burn_in_fraction = parse_real(v, key, line);
  else if (key == "observation") c.observation = parse_real(v, key, line);
  else if (key == "gaussian_proposal_sd") c.gaussian_proposal_sd = parse_real(v, key, line);
  else if (key == "n" || key == "side") c.side = parse_unsigned(v, key, line);
  else if (key == "j" || key == "coupling") c.coupling = parse_real(v, key, line);
  else if (key == "prior_mean") c.prior_mean = parse_real(v, key, line);
  else if (key == "prior_sd") c.prior_sd = parse_real(v, key, line);
  else if (key == "proposal_sd") c.proposal_sd = parse_real(v, key, line);
  else if (key == "wolff_burn_in") c.wolff_burn_in = parse_unsigned(v, key, line);
  else if (key == "data_burn_in") c.data_burn_in = parse_unsigned(v, key, line);
  else if (key == "configs") c.configs = parse_unsigned(v, key, line);
  else if (key == "data_seed") c.data_seed = parse_unsigned(v, key, line);
  else if (key == "output_dir") c.output_dir = std::string(v);
  else if (key == "oracle_check") c.oracle_check = parse_bool(v, key, line);
  else if (key == "write_traces") c.write_traces = parse_bool(v, key, line);
  else if (key == "threads") c.threads = parse_unsigned(v, key, line);
  else fail(line, key, "unknown key");
}

const Entry* find(const Section& s, std::string_view key) {
  auto it = s.find(key);
  return it == s.end() ? nullptr : &it->second;
}

std::size_t line_of(const Section& globals, const Section& local, std::string_view key) {
  if (const auto* e = find(local, key)) return e->line;
  if (const auto* e = find(globals, key)) return e->line;
  return 0;
}

}  // namespace

ConfigError::ConfigError(std::size_t line, std::string field, const std::string& message)
    : std::runtime_error(line ? fmt::format("config line {}: field '{}': {}", line, field, message)
                              : fmt::format("config: field '{}': {}", field, message)),
      line_(line), field_(std::move(field)), message_(message) {}

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::toy1: return "toy1";
    case ExperimentKind::toy2: return "toy2";
    case ExperimentKind::gaussian_sweep: return "gaussian-sweep";
    case ExperimentKind::ising_sweep: return "ising-sweep";
    case ExperimentKind::oracle_check: return "oracle-check";
  }
  return "unknown";
}

std::optional<ExperimentKind> parse_experiment_kind(std::string_view name) {
  for (auto k : {ExperimentKind::toy1, ExperimentKind::toy2, ExperimentKind::gaussian_sweep,
                 ExperimentKind::ising_sweep, ExperimentKind::oracle_check})
    if (to_string(k) == name) return k;
  return std::nullopt;
}

std::vector<double> parse_real_list(std::string_view text, std::string_view field, std::size_t line) {
  std::vector<double> out;
  if (trim(text).empty()) return out;
  for (auto item : split(text, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() == 1) {
      out.push_back(parse_real(item, field, line));
    } else if (parts.size() == 3) {
      // start:stop:step, inclusive of stop up to rounding
      const double start = parse_real(parts[0], field, line);
      const double stop = parse_real(parts[1], field, line);
      const double step = parse_real(parts[2], field, line);
      if (!(step > 0.0) || stop < start) fail(line, field, fmt::format("bad range '{}'", item));
      const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
      for (std::size_t i = 0; i < count; ++i)
        out.push_back(std::round((start + static_cast<double>(i) * step) * 1e12) / 1e12);
    } else {
      fail(line, field, fmt::format("bad list item '{}'", item));
    }
  }
  return out;
}

std::vector<std::uint64_t> parse_seed_list(std::string_view text, std::size_t line) {
  std::vector<std::uint64_t> out;
  if (trim(text).empty()) return out;
  for (auto item : split(text, ',')) out.push_back(parse_unsigned(item, "seeds", line));
  return out;
}

std::vector<SamplerKind> parse_sampler_list(std::string_view text, std::size_t line) {
  std::vector<SamplerKind> out;
  if (trim(text).empty()) return out;
  for (auto item : split(text, ',')) {
    const auto kind = parse_sampler_kind(item);
    if (!kind) fail(line, "samplers", fmt::format("unknown sampler '{}' (mh, pmc, mpmc, sve, mabmc)", item));
    out.push_back(*kind);
  }
  return out;
}

std::vector<ExperimentConfig> parse_config(std::string_view text,
                                           const std::filesystem::path& default_output_dir) {
  Section globals;
  std::vector<std::pair<std::string, Section>> sections;
  std::vector<std::size_t> section_lines;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto c = line.find_first_of("#;"); c != std::string_view::npos) line = line.substr(0, c);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) fail(line_no, "section", "malformed section header");
      sections.emplace_back(std::string(trim(line.substr(1, line.size() - 2))), Section{});
      section_lines.push_back(line_no);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) fail(line_no, std::string(line), "expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) fail(line_no, "key", "empty key");
    Section& target = sections.empty() ? globals : sections.back().second;
    if (target.count(key)) fail(line_no, key, "duplicate key");
    target[key] = Entry{std::string(trim(line.substr(eq + 1))), line_no};
  }
  if (sections.empty()) sections.emplace_back("experiment", Section{}), section_lines.push_back(0);

  std::vector<ExperimentConfig> out;
  for (std::size_t s = 0; s < sections.size(); ++s) {
    const auto& [name, local] = sections[s];
    ExperimentConfig c;
    c.name = name;
    c.output_dir = default_output_dir;
    const Entry* kind_entry = find(local, "experiment");
    if (!kind_entry) kind_entry = find(globals, "experiment");
    if (!kind_entry) fail(section_lines[s], "experiment", fmt::format("section [{}] names no experiment", name));
    const auto kind = parse_experiment_kind(kind_entry->value);
    if (!kind)
      fail(kind_entry->line, "experiment",
           fmt::format("unknown experiment '{}' (toy1, toy2, gaussian-sweep, ising-sweep, oracle-check)",
                       kind_entry->value));
    c.experiment = *kind;
    set_defaults_for(c);
    for (const auto& [key, entry] : globals) apply_entry(c, key, entry);
    for (const auto& [key, entry] : local) apply_entry(c, key, entry);
    try {
      validate(c);
    } catch (const ConfigError& e) {
      const std::size_t line = e.line() ? e.line() : line_of(globals, local, e.field());
      throw ConfigError(line, e.field(), e.message());
    }
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<ExperimentConfig> load_config(const std::filesystem::path& path,
                                          const std::filesystem::path& default_output_dir) {
  std::ifstream in(path);
  if (!in) throw ConfigError(0, "path", fmt::format("cannot read config file '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), default_output_dir);
}

void validate(const ExperimentConfig& c) {
  if (c.samplers.empty()) fail(0, "samplers", "must name at least one sampler");
  if (c.iterations < 1) fail(0, "iterations", "must be >= 1");
  if (c.seeds.empty()) fail(0, "seeds", "must list at least one seed");
  if (!(c.burn_in_fraction >= 0.0 && c.burn_in_fraction < 1.0))
    fail(0, "burn_in_fraction", "must lie in [0, 1)");
  if (c.is_sweep() && c.grid.empty()) fail(0, "grid", "sweep experiments need a non-empty grid");
  if (c.experiment == ExperimentKind::gaussian_sweep) {
    for (double g : c.grid)
      if (!(g > 0.0)) fail(0, "grid", "sigma2 values must be positive");
    if (!(c.gaussian_proposal_sd > 0.0)) fail(0, "gaussian_proposal_sd", "must be positive");
  }
  if (c.experiment == ExperimentKind::ising_sweep) {
    if (c.side < 2) fail(0, "n", "lattice side must be >= 2");
    if (c.coupling == 0.0) fail(0, "j", "coupling must be non-zero");
    if (c.configs < 1) fail(0, "configs", "must be >= 1");
    if (!(c.prior_sd > 0.0)) fail(0, "prior_sd", "must be positive");
    if (!(c.proposal_sd > 0.0)) fail(0, "proposal_sd", "must be positive");
    for (auto s : c.samplers)
      if (s == SamplerKind::mh) fail(0, "samplers", "mh needs a tractable likelihood; not available for ising-sweep");
  }
  std::vector<SamplerKind> seen;
  for (auto s : c.samplers) {
    if (std::find(seen.begin(), seen.end(), s) != seen.end())
      fail(0, "samplers", fmt::format("sampler '{}' listed twice", to_string(s)));
    seen.push_back(s);
  }
}

void apply_overrides(ExperimentConfig& c, const ConfigOverrides& o) {
  if (o.seeds) c.seeds = *o.seeds;
  if (o.iterations) c.iterations = *o.iterations;
  if (o.output_dir) c.output_dir = *o.output_dir;
  if (o.grid) c.grid = *o.grid;
  if (o.samplers) c.samplers = *o.samplers;
  if (o.oracle_check) c.oracle_check = true;
  validate(c);
}

}  // namespace dimc
