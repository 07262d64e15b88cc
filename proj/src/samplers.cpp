#include "dimc/samplers.hpp"

namespace dimc {

std::string_view to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::mh: return "mh";
    case SamplerKind::pmc: return "pmc";
    case SamplerKind::mpmc: return "mpmc";
    case SamplerKind::sve: return "sve";
    case SamplerKind::mabmc: return "mabmc";
  }
  return "unknown";
}

std::optional<SamplerKind> parse_sampler_kind(std::string_view name) {
  for (auto k : {SamplerKind::mh, SamplerKind::pmc, SamplerKind::mpmc, SamplerKind::sve,
                 SamplerKind::mabmc})
    if (to_string(k) == name) return k;
  return std::nullopt;
}

std::optional<DecisionRule> DecisionRule::parse(std::string_view name) {
  if (name == "constant-1") return always_mpmc();
  if (name == "constant-2") return always_sve();
  if (name == "max-min") return max_min();
  return std::nullopt;
}

std::string_view DecisionRule::name() const {
  switch (kind_) {
    case Kind::always_mpmc: return "constant-1";
    case Kind::always_sve: return "constant-2";
    case Kind::max_min: return "max-min";
    case Kind::invalid_max: return "invalid-max";
  }
  return "unknown";
}

namespace diagnostics {

DecisionRule invalid_max_rule() { return DecisionRule(DecisionRule::Kind::invalid_max); }

}  // namespace diagnostics

}  // namespace dimc
