#include "dimc/oracle.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace dimc::oracle {

namespace {

Rational min1(const Rational& a) { return a < 1 ? a : Rational(1); }

// pi(t') q(t|t') f_t'(x) / (pi(t) q(t'|t) f_t(x))
Rational deterministic_ratio(const ToySpec& s, std::size_t t, std::size_t tp) {
  const std::size_t x = s.observed;
  return (s.prior[tp] * s.proposal[tp][t] * s.f(tp, x)) /
         (s.prior[t] * s.proposal[t][tp] * s.f(t, x));
}

Rational mpmc_ratio(const ToySpec& s, std::size_t t, std::size_t tp, std::size_t y,
                    std::size_t yp) {
  return deterministic_ratio(s, t, tp) * (s.f(t, y) * s.aux[tp][yp]) /
         (s.f(tp, yp) * s.aux[t][y]);
}

Rational sve_ratio(const ToySpec& s, std::size_t t, std::size_t tp, std::size_t w) {
  return deterministic_ratio(s, t, tp) * s.f(t, w) / s.f(tp, w);
}

// Distribution of r_1 = min{a_mpmc, 1} for the move t -> tp as (value, weight).
std::vector<std::pair<Rational, Rational>> mpmc_outcomes(const ToySpec& s, std::size_t t,
                                                        std::size_t tp) {
  std::vector<std::pair<Rational, Rational>> out;
  const std::size_t nx = s.num_outcomes();
  for (std::size_t y = 0; y < nx; ++y)
    for (std::size_t yp = 0; yp < nx; ++yp) {
      const Rational w = s.aux[t][y] * s.likelihood[tp][yp];
      if (w != 0) out.emplace_back(min1(mpmc_ratio(s, t, tp, y, yp)), w);
    }
  return out;
}

std::vector<std::pair<Rational, Rational>> sve_outcomes(const ToySpec& s, std::size_t t,
                                                       std::size_t tp) {
  std::vector<std::pair<Rational, Rational>> out;
  for (std::size_t w = 0; w < s.num_outcomes(); ++w)
    if (s.likelihood[tp][w] != 0) out.emplace_back(min1(sve_ratio(s, t, tp, w)), s.likelihood[tp][w]);
  return out;
}

std::uint64_t ipow(std::uint64_t base, unsigned exp) {
  std::uint64_t r = 1;
  for (unsigned i = 0; i < exp; ++i) r *= base;
  return r;
}

void check_cap(std::uint64_t terms, const EnumerationOptions& options) {
  if (terms > options.max_terms)
    throw EnumerationTooLarge(
        fmt::format("enumeration too large: {} terms exceeds cap {}", terms, options.max_terms));
}

Rational move_probability(const ToySpec& s, SamplerKind kind, const DecisionRule& rule,
                          std::size_t t, std::size_t tp) {
  const Rational& q = s.proposal[t][tp];
  if (q == 0) return 0;
  switch (kind) {
    case SamplerKind::mh: return q * mh_acceptance(s, t, tp);
    case SamplerKind::mpmc: return q * acceptance(s, t, tp, Estimator::mpmc);
    case SamplerKind::sve: return q * acceptance(s, t, tp, Estimator::sve);
    case SamplerKind::mabmc: return q * mabmc_acceptance(s, t, tp, rule);
    case SamplerKind::pmc: break;
  }
  throw std::logic_error("move_probability: joint-space sampler");
}

}  // namespace

std::vector<Rational> exact_posterior(const ToySpec& s) {
  std::vector<Rational> post;
  Rational total = 0;
  for (std::size_t t = 0; t < s.num_params(); ++t) {
    post.push_back(s.prior[t] * s.likelihood[t][s.observed]);
    total += post.back();
  }
  for (auto& p : post) p /= total;
  return post;
}

std::vector<Rational> joint_posterior(const ToySpec& s) {
  const auto post = exact_posterior(s);
  std::vector<Rational> out;
  for (std::size_t t = 0; t < s.num_params(); ++t)
    for (std::size_t y = 0; y < s.num_outcomes(); ++y) out.push_back(post[t] * s.aux[t][y]);
  return out;
}

Rational normalizer_ratio(const ToySpec& s, std::size_t t, std::size_t tp) {
  Rational zt = 0, ztp = 0;
  for (std::size_t y = 0; y < s.num_outcomes(); ++y) {
    zt += s.f(t, y);
    ztp += s.f(tp, y);
  }
  return zt / ztp;
}

Rational acceptance(const ToySpec& s, std::size_t t, std::size_t tp, Estimator kind) {
  Rational e = 0;
  const auto outcomes = kind == Estimator::mpmc ? mpmc_outcomes(s, t, tp) : sve_outcomes(s, t, tp);
  for (const auto& [r, w] : outcomes) e += w * r;
  return e;
}

Rational mh_acceptance(const ToySpec& s, std::size_t t, std::size_t tp) {
  return min1(deterministic_ratio(s, t, tp) * normalizer_ratio(s, t, tp));
}

Rational decision_probability(const ToySpec& s, std::size_t t, std::size_t tp,
                              const DecisionRule& rule) {
  switch (rule.kind()) {
    case DecisionRule::Kind::always_mpmc: return 1;
    case DecisionRule::Kind::always_sve: return 0;
    default: break;
  }
  const std::size_t nx = s.num_outcomes();
  Rational p_mpmc = 0;
  if (rule.kind() == DecisionRule::Kind::invalid_max) {
    // D = argmax of the two forward ratios
    for (std::size_t y = 0; y < nx; ++y)
      for (std::size_t yp = 0; yp < nx; ++yp)
        for (std::size_t w = 0; w < nx; ++w) {
          const Rational weight = s.aux[t][y] * s.likelihood[tp][yp] * s.likelihood[tp][w];
          if (weight == 0) continue;
          if (!(sve_ratio(s, t, tp, w) > mpmc_ratio(s, t, tp, y, yp))) p_mpmc += weight;
        }
    return p_mpmc;
  }
  // max-min: the full six-tuple (y, y', w, y~, y~', w~)
  for (std::size_t y = 0; y < nx; ++y)
    for (std::size_t yp = 0; yp < nx; ++yp)
      for (std::size_t w = 0; w < nx; ++w)
        for (std::size_t ry = 0; ry < nx; ++ry)
          for (std::size_t ryp = 0; ryp < nx; ++ryp)
            for (std::size_t rw = 0; rw < nx; ++rw) {
              const Rational weight = s.aux[t][y] * s.likelihood[tp][yp] * s.likelihood[tp][w] *
                                      s.aux[tp][ry] * s.likelihood[t][ryp] * s.likelihood[t][rw];
              if (weight == 0) continue;
              const Rational m1 =
                  std::min(min1(mpmc_ratio(s, t, tp, y, yp)), min1(mpmc_ratio(s, tp, t, ry, ryp)));
              const Rational m2 =
                  std::min(min1(sve_ratio(s, t, tp, w)), min1(sve_ratio(s, tp, t, rw)));
              if (!(m2 > m1)) p_mpmc += weight;
            }
  return p_mpmc;
}

Rational mabmc_acceptance(const ToySpec& s, std::size_t t, std::size_t tp,
                          const DecisionRule& rule) {
  const Rational p1 = decision_probability(s, t, tp, rule);
  return p1 * acceptance(s, t, tp, Estimator::mpmc) +
         (1 - p1) * acceptance(s, t, tp, Estimator::sve);
}

TransitionMatrix enumerate_transition_matrix(const ToySpec& s, SamplerKind kind,
                                             const DecisionRule& rule,
                                             const EnumerationOptions& options) {
  s.validate();
  const std::size_t n = s.num_params();
  const std::size_t nx = s.num_outcomes();
  TransitionMatrix tm;

  if (kind == SamplerKind::pmc) {
    check_cap(static_cast<std::uint64_t>(n * nx) * (n * nx), options);
    for (std::size_t t = 0; t < n; ++t)
      for (std::size_t y = 0; y < nx; ++y) tm.states.push_back(fmt::format("{}/{}", s.labels[t], y));
    const std::size_t m = tm.states.size();
    tm.probs.assign(m, std::vector<Rational>(m, Rational(0)));
    for (std::size_t t = 0; t < n; ++t)
      for (std::size_t y = 0; y < nx; ++y) {
        const std::size_t i = t * nx + y;
        Rational off = 0;
        for (std::size_t tp = 0; tp < n; ++tp)
          for (std::size_t yp = 0; yp < nx; ++yp) {
            const std::size_t j = tp * nx + yp;
            if (j == i) continue;
            const Rational w = s.proposal[t][tp] * s.likelihood[tp][yp];
            if (w == 0) continue;
            tm.probs[i][j] = w * min1(mpmc_ratio(s, t, tp, y, yp));
            off += tm.probs[i][j];
          }
        tm.probs[i][i] = 1 - off;
      }
    return tm;
  }

  std::uint64_t per_pair = nx * nx + nx;
  if (kind == SamplerKind::mabmc) {
    if (rule.kind() == DecisionRule::Kind::max_min) per_pair += ipow(nx, 6);
    if (rule.kind() == DecisionRule::Kind::invalid_max) per_pair += ipow(nx, 3);
  }
  check_cap(static_cast<std::uint64_t>(n) * n * per_pair, options);

  tm.states = s.labels;
  tm.probs.assign(n, std::vector<Rational>(n, Rational(0)));
  for (std::size_t t = 0; t < n; ++t) {
    Rational off = 0;
    for (std::size_t tp = 0; tp < n; ++tp) {
      if (tp == t) continue;
      tm.probs[t][tp] = move_probability(s, kind, rule, t, tp);
      off += tm.probs[t][tp];
    }
    tm.probs[t][t] = 1 - off;
  }
  return tm;
}

BalanceReport check_detailed_balance(const TransitionMatrix& tm,
                                     const std::vector<Rational>& posterior) {
  const std::size_t n = tm.size();
  if (posterior.size() != n || tm.probs.size() != n)
    throw std::invalid_argument("check_detailed_balance: dimension mismatch");
  for (const auto& p : posterior)
    if (p <= 0) throw std::invalid_argument("check_detailed_balance: posterior must be positive");
  BalanceReport report;
  for (std::size_t i = 0; i < n; ++i) {
    if (tm.probs[i].size() != n) throw std::invalid_argument("check_detailed_balance: ragged matrix");
    for (std::size_t j = i + 1; j < n; ++j) {
      const Rational fwd = posterior[i] * tm.probs[i][j];
      const Rational bwd = posterior[j] * tm.probs[j][i];
      const Rational diff = fwd > bwd ? fwd - bwd : bwd - fwd;
      const double residual = to_double(diff);
      report.flows.push_back({i, j, to_double(fwd), to_double(bwd), residual});
      if (report.flows.size() == 1 || residual > report.max_residual) {
        report.max_residual = residual;
        report.worst_from = i;
        report.worst_to = j;
      }
    }
  }
  return report;
}

EstimatorMoments exact_estimator_moments(const ToySpec& s, std::size_t t, std::size_t tp,
                                         Estimator kind) {
  const std::size_t nx = s.num_outcomes();
  const Rational z = normalizer_ratio(s, t, tp);
  EstimatorMoments m{0, 0};
  auto add = [&](const Rational& weight, const Rational& factor) {
    m.mean += weight * factor;
    const Rational rel = factor / z - 1;
    m.relative_second_moment += weight * rel * rel;
  };
  if (kind == Estimator::sve) {
    for (std::size_t w = 0; w < nx; ++w)
      if (s.likelihood[tp][w] != 0) add(s.likelihood[tp][w], s.f(t, w) / s.f(tp, w));
  } else {
    for (std::size_t y = 0; y < nx; ++y)
      for (std::size_t yp = 0; yp < nx; ++yp) {
        const Rational weight = s.aux[t][y] * s.likelihood[tp][yp];
        if (weight == 0) continue;
        add(weight, (s.f(t, y) * s.aux[tp][yp]) / (s.f(tp, yp) * s.aux[t][y]));
      }
  }
  return m;
}

std::vector<Rational> stationary_distribution(const TransitionMatrix& tm) {
  const std::size_t n = tm.size();
  if (n == 0) throw std::invalid_argument("stationary_distribution: empty matrix");
  // strong connectivity of the positive-entry graph
  for (std::size_t src = 0; src < n; ++src) {
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> stack{src};
    seen[src] = 1;
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      for (std::size_t j = 0; j < n; ++j)
        if (!seen[j] && tm.probs[i][j] > 0) {
          seen[j] = 1;
          stack.push_back(j);
        }
    }
    if (std::count(seen.begin(), seen.end(), 1) != static_cast<long>(n))
      throw std::invalid_argument("stationary_distribution: chain is reducible");
  }
  // pi (P - I) = 0 with the last equation replaced by sum(pi) = 1
  std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n + 1, Rational(0)));
  for (std::size_t eq = 0; eq < n; ++eq)
    for (std::size_t i = 0; i < n; ++i) a[eq][i] = tm.probs[i][eq] - (i == eq ? 1 : 0);
  for (std::size_t i = 0; i < n; ++i) a[n - 1][i] = 1;
  a[n - 1][n] = 1;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && a[pivot][col] == 0) ++pivot;
    if (pivot == n) throw std::invalid_argument("stationary_distribution: singular system");
    std::swap(a[pivot], a[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0) continue;
      const Rational factor = a[r][col] / a[col][col];
      for (std::size_t c = col; c <= n; ++c) a[r][c] -= factor * a[col][c];
    }
  }
  std::vector<Rational> pi(n);
  for (std::size_t i = 0; i < n; ++i) pi[i] = a[i][n] / a[i][i];
  return pi;
}

Rational average_acceptance(const ToySpec& s, SamplerKind kind, const DecisionRule& rule) {
  if (kind == SamplerKind::pmc)
    throw std::invalid_argument("average_acceptance: defined on the parameter space only");
  const auto post = exact_posterior(s);
  Rational avg = 0;
  for (std::size_t t = 0; t < s.num_params(); ++t)
    for (std::size_t tp = 0; tp < s.num_params(); ++tp) {
      if (s.proposal[t][tp] == 0) continue;
      Rational acc;
      switch (kind) {
        case SamplerKind::mh: acc = mh_acceptance(s, t, tp); break;
        case SamplerKind::mpmc: acc = acceptance(s, t, tp, Estimator::mpmc); break;
        case SamplerKind::sve: acc = acceptance(s, t, tp, Estimator::sve); break;
        default: acc = mabmc_acceptance(s, t, tp, rule); break;
      }
      avg += post[t] * s.proposal[t][tp] * acc;
    }
  return avg;
}

void write_balance_report(std::ostream& out, const TransitionMatrix& tm,
                          const BalanceReport& report) {
  out << fmt::format("detailed balance: max residual {:.3e} at {} <-> {}\n", report.max_residual,
                     tm.states.at(report.worst_from), tm.states.at(report.worst_to));
  for (const auto& f : report.flows)
    out << fmt::format("  {:>6} -> {:<6} flow {:.12g}  reverse {:.12g}  residual {:.3e}\n",
                       tm.states[f.from], tm.states[f.to], f.forward, f.backward, f.residual);
}

void write_transition_csv(std::ostream& out, const TransitionMatrix& tm) {
  out << "from,to,probability,exact\n";
  for (std::size_t i = 0; i < tm.size(); ++i)
    for (std::size_t j = 0; j < tm.size(); ++j)
      out << fmt::format("{},{},{:.10g},{}\n", tm.states[i], tm.states[j],
                         to_double(tm.probs[i][j]), tm.probs[i][j].str());
}

}  // namespace dimc::oracle
