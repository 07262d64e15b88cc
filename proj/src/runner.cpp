#include "dimc/experiments/runner.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "dimc/models/gaussian.hpp"
#include "dimc/models/ising.hpp"
#include "dimc/models/toy.hpp"
#include "dimc/oracle.hpp"
#include "dimc/stats.hpp"

namespace dimc {

namespace fs = std::filesystem;

namespace {

// Runs work(i) for i in [0, n) on `threads` workers and hands the results to
// consume(i, result) on the calling thread in index order.
template <class R, class Work, class Consume>
void ordered_parallel(std::size_t n, std::size_t threads, Work&& work, Consume&& consume) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) consume(i, work(i));
    return;
  }
  std::mutex m;
  std::condition_variable cv;
  std::vector<std::optional<R>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  std::vector<char> done(n, 0);
  std::size_t next = 0, consumed = 0;
  bool stop = false;
  const std::size_t window = 2 * threads;

  auto worker = [&] {
    while (true) {
      std::size_t i;
      {
        std::unique_lock lk(m);
        cv.wait(lk, [&] { return stop || next >= n || next < consumed + window; });
        if (stop || next >= n) return;
        i = next++;
      }
      std::optional<R> r;
      std::exception_ptr e;
      try {
        r.emplace(work(i));
      } catch (...) {
        e = std::current_exception();
      }
      {
        std::lock_guard lk(m);
        slots[i] = std::move(r);
        errors[i] = e;
        done[i] = 1;
      }
      cv.notify_all();
    }
  };

  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  auto shutdown = [&] {
    {
      std::lock_guard lk(m);
      stop = true;
    }
    cv.notify_all();
    for (auto& t : pool) t.join();
  };
  try {
    for (std::size_t i = 0; i < n; ++i) {
      std::optional<R> r;
      std::exception_ptr e;
      {
        std::unique_lock lk(m);
        cv.wait(lk, [&] { return done[i] != 0; });
        r = std::move(slots[i]);
        slots[i].reset();
        e = errors[i];
        consumed = i + 1;
      }
      cv.notify_all();
      if (e) std::rethrow_exception(e);
      consume(i, std::move(*r));
    }
  } catch (...) {
    shutdown();
    throw;
  }
  shutdown();
}

struct ChainOutput {
  double mean_accept = 0.0;
  double batch_se = 0.0;
  double mean_draws = 0.0;
  std::optional<double> decision_mpmc;
  std::optional<double> decision_sve;
  std::vector<double> kept;  // post-burn-in parameter values
  std::string trace_csv;
};

template <Model M, class Format, class ToReal>
ChainOutput run_one(const M& model, SamplerKind kind, const DecisionRule& rule,
                    const ExperimentConfig& c, const typename M::Param& initial,
                    const RandomStream& chain, Format&& format, ToReal&& to_real) {
  const auto trace = run_chain(model, kind, rule, c.iterations, initial, chain);
  ChainOutput out;
  std::vector<double> probs;
  probs.reserve(trace.records.size());
  for (const auto& r : trace.records) probs.push_back(r.accept_prob);
  out.mean_accept = mean(probs);
  out.batch_se = probs.size() >= 4 ? batch_means_se(probs) : 0.0;
  out.mean_draws = trace.mean_draws();
  if (kind == SamplerKind::mabmc) {
    out.decision_mpmc = trace.decision_fraction(Estimator::mpmc);
    out.decision_sve = trace.decision_fraction(Estimator::sve);
  }
  const auto skip = static_cast<std::size_t>(
      std::floor(c.burn_in_fraction * static_cast<double>(trace.records.size())));
  out.kept.reserve(trace.records.size() - skip);
  for (std::size_t i = skip; i < trace.records.size(); ++i)
    out.kept.push_back(to_real(trace.records[i].theta_after()));
  if (c.write_traces) {
    out.trace_csv = std::string(trace_header) + "\n";
    write_trace_rows(out.trace_csv, trace, format);
  }
  return out;
}

std::size_t worker_count(const ExperimentConfig& c, std::size_t tasks) {
  std::size_t t = c.threads ? c.threads : std::max(1u, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(t, tasks));
}

struct Artifacts {
  fs::path dir;
  ExperimentResult& result;

  void write(const fs::path& relative, const std::string& contents) {
    const auto path = dir / relative;
    fs::create_directories(path.parent_path());
    write_file(path, contents);
    result.files.push_back(path);
  }
};

// Runs all chains over the grid. `models[g]` is the model at grid point g.
template <Model M, class Format, class ToReal, class Initial>
void run_sweep(const ExperimentConfig& c, const std::vector<std::string>& labels,
               const std::vector<double>& xs, const std::vector<M>& models, Initial&& initial,
               Format&& format, ToReal&& to_real, Artifacts& art, std::ostream& log,
               const std::function<void(std::size_t, SamplerKind, const std::vector<double>&)>&
                   on_pooled) {
  const std::size_t ns = c.samplers.size(), nk = c.seeds.size();
  const std::size_t n = labels.size() * ns * nk;
  struct Group {
    std::vector<double> accepts, batch_ses, draws, dmpmc, dsve, pooled;
  } group;

  auto work = [&](std::size_t i) {
    const std::size_t g = i / (ns * nk), s = (i / nk) % ns, k = i % nk;
    // stream ids are shared across samplers at a grid point
    const RandomStream chain(c.seeds[k], g);
    return run_one(models[g], c.samplers[s], c.rule, c, initial(g), chain, format, to_real);
  };
  auto consume = [&](std::size_t i, ChainOutput out) {
    const std::size_t g = i / (ns * nk), s = (i / nk) % ns, k = i % nk;
    const SamplerKind kind = c.samplers[s];
    if (c.write_traces) {
      const std::string prefix = c.is_sweep() ? labels[g] + "_" : std::string();
      art.write(fs::path("traces") /
                    fmt::format("{}{}_seed{}.csv", prefix, to_string(kind), c.seeds[k]),
                out.trace_csv);
    }
    group.accepts.push_back(out.mean_accept);
    group.batch_ses.push_back(out.batch_se);
    group.draws.push_back(out.mean_draws);
    if (out.decision_mpmc) group.dmpmc.push_back(*out.decision_mpmc);
    if (out.decision_sve) group.dsve.push_back(*out.decision_sve);
    group.pooled.insert(group.pooled.end(), out.kept.begin(), out.kept.end());
    if (k + 1 < nk) return;

    SummaryRow row;
    row.grid_label = labels[g];
    row.grid_value = xs[g];
    row.sampler = kind;
    row.avg_accept = mean(group.accepts);
    row.se = nk >= 2 ? std::sqrt(variance(group.accepts) / static_cast<double>(nk))
                     : group.batch_ses.front();
    const double draws = mean(group.draws);
    if (kind != SamplerKind::mh && draws > 0.0) row.accept_per_draw = row.avg_accept / draws;
    if (kind == SamplerKind::mabmc) {
      row.decision_mpmc_frac = mean(group.dmpmc);
      row.decision_sve_frac = mean(group.dsve);
    }
    row.seed_count = nk;
    log << fmt::format("  {:>8} {:<6} avg_accept {:.4f} (se {:.4f})\n", labels[g],
                       to_string(kind), row.avg_accept, row.se);
    art.result.summary.rows.push_back(row);
    on_pooled(g, kind, group.pooled);
    group = Group{};
  };
  ordered_parallel<ChainOutput>(n, worker_count(c, n), work, consume);
}

PosteriorRow summarize_draws(const std::string& label, SamplerKind kind,
                             const std::vector<double>& xs) {
  PosteriorRow p;
  p.grid_label = label;
  p.sampler = kind;
  p.draws = xs.size();
  if (xs.empty()) return p;
  p.mean = mean(xs);
  p.sd = xs.size() >= 2 ? std::sqrt(variance(xs)) : 0.0;
  p.q025 = quantile(xs, 0.025);
  p.q975 = quantile(xs, 0.975);
  return p;
}

std::string posterior_csv(const std::vector<PosteriorRow>& rows) {
  std::string out = "grid_value,sampler,mean,sd,q025,q975,draws,exact_mean,exact_sd\n";
  for (const auto& r : rows)
    out += fmt::format("{},{},{},{},{},{},{},{},{}\n", r.grid_label, to_string(r.sampler),
                       format_number(r.mean), format_number(r.sd), format_number(r.q025),
                       format_number(r.q975), r.draws,
                       r.exact_mean ? format_number(*r.exact_mean) : "",
                       r.exact_sd ? format_number(*r.exact_sd) : "");
  return out;
}

std::string notes_text(const ExperimentConfig& c) {
  std::string out;
  out += fmt::format("experiment: {} ({})\n", c.name, to_string(c.experiment));
  std::string samplers;
  for (auto s : c.samplers) samplers += (samplers.empty() ? "" : ",") + std::string(to_string(s));
  out += fmt::format("samplers: {}\nrule: {}\niterations: {}\n", samplers, c.rule.name(),
                     c.iterations);
  std::string seeds;
  for (auto s : c.seeds) seeds += (seeds.empty() ? "" : ",") + std::to_string(s);
  out += fmt::format("seeds: {}\n", seeds);
  out +=
      "avg_accept: mean over iterations of min{a_hat, 1} for the ratio actually used (not the\n"
      "  accept-flag mean), averaged over seeds. se: across-seed standard error, or batch-means\n"
      "  standard error of the single chain when there is one seed.\n"
      "accept_per_draw: avg_accept divided by the mean number of model sampler calls per\n"
      "  iteration (likelihood and auxiliary draws). Empty for mh.\n"
      "decision_*_frac: fraction of MABMC iterations that used each ratio.\n"
      "posterior.csv: pooled draws after discarding the first burn_in_fraction of each chain.\n";
  out += fmt::format("burn_in_fraction: {}\n", format_number(c.burn_in_fraction));
  return out;
}

const ToySpec& toy_for(ExperimentKind k) {
  static const ToySpec t1 = toy_spec_1();
  static const ToySpec t2 = toy_spec_2();
  return k == ExperimentKind::toy2 ? t2 : t1;
}

SweepSummary oracle_summary(const ToySpec& spec, const std::string& prefix) {
  SweepSummary s;
  s.title = spec.name + " exact acceptance";
  s.x_label = "move";
  const auto rule = DecisionRule::max_min();
  for (std::size_t t = 0; t < spec.num_params(); ++t)
    for (std::size_t tp = 0; tp < spec.num_params(); ++tp) {
      if (t == tp) continue;
      const std::string label = prefix + spec.labels[t] + "->" + spec.labels[tp];
      // move probability q(t'|t) E min{a_hat, 1}
      const Rational& q = spec.proposal[t][tp];
      auto add = [&](SamplerKind k, const Rational& acc) {
        const Rational v = q * acc;
        SummaryRow r;
        r.grid_label = label;
        r.grid_value = static_cast<double>(s.rows.size());
        r.sampler = k;
        r.avg_accept = to_double(v);
        r.se = 0.0;
        r.seed_count = 0;
        if (k == SamplerKind::mabmc) {
          const Rational p = oracle::decision_probability(spec, t, tp, rule);
          r.decision_mpmc_frac = to_double(p);
          r.decision_sve_frac = to_double(1 - p);
        }
        s.rows.push_back(r);
      };
      add(SamplerKind::mh, oracle::mh_acceptance(spec, t, tp));
      add(SamplerKind::mpmc, oracle::acceptance(spec, t, tp, Estimator::mpmc));
      add(SamplerKind::sve, oracle::acceptance(spec, t, tp, Estimator::sve));
      add(SamplerKind::mabmc, oracle::mabmc_acceptance(spec, t, tp, rule));
    }
  return s;
}

void run_oracle_check(ExperimentResult& result, Artifacts& art, std::ostream& log,
                      const fs::path& sub) {
  for (const auto& spec : {toy_spec_1(), toy_spec_2()}) {
    std::ostringstream csv;
    write_summary_csv(csv, oracle_summary(spec, ""));
    art.write(sub / fmt::format("oracle_{}.csv", spec.name), csv.str());

    struct Kernel {
      std::string name;
      SamplerKind kind;
      DecisionRule rule;
    };
    const std::vector<Kernel> kernels{
        {"mh", SamplerKind::mh, DecisionRule::max_min()},
        {"mpmc", SamplerKind::mpmc, DecisionRule::max_min()},
        {"sve", SamplerKind::sve, DecisionRule::max_min()},
        {"mabmc-max-min", SamplerKind::mabmc, DecisionRule::max_min()},
        {"mabmc-constant-1", SamplerKind::mabmc, DecisionRule::always_mpmc()},
        {"mabmc-invalid-max", SamplerKind::mabmc, diagnostics::invalid_max_rule()},
        {"pmc", SamplerKind::pmc, DecisionRule::max_min()},
    };
    for (const auto& k : kernels) {
      const auto tm = oracle::enumerate_transition_matrix(spec, k.kind, k.rule);
      const auto target = k.kind == SamplerKind::pmc ? oracle::joint_posterior(spec)
                                                     : oracle::exact_posterior(spec);
      const auto report = oracle::check_detailed_balance(tm, target);
      std::ostringstream rep, tcsv;
      rep << fmt::format("{} {}\n", spec.name, k.name);
      oracle::write_balance_report(rep, tm, report);
      oracle::write_transition_csv(tcsv, tm);
      art.write(sub / fmt::format("balance_{}_{}.txt", spec.name, k.name),
                rep.str());
      art.write(sub / fmt::format("transitions_{}_{}.csv", spec.name, k.name),
                tcsv.str());
      log << fmt::format("  {} {:<18} detailed-balance residual {:.3e}\n", spec.name, k.name,
                         report.max_residual);
    }
  }

  result.oracle = oracle_reference_check();
  for (const auto& v : result.oracle) {
    log << fmt::format("  {} {:<4} {}: exact {} = {:.10f}, reference {} = {:.10f}: {}\n", v.toy,
                       to_string(v.estimator), v.direction, to_string(v.exact),
                       to_double(v.exact), to_string(v.reference), to_double(v.reference),
                       v.matches() ? "ok" : "MISMATCH");
    if (!v.matches()) result.oracle_mismatch = true;
  }
}

void run_toy(const ExperimentConfig& c, Artifacts& art, std::ostream& log) {
  const ToySpec& spec = toy_for(c.experiment);
  const std::vector<ToyModel> models{ToyModel(spec)};
  const auto exact = oracle::exact_posterior(spec);
  auto& result = art.result;
  result.summary.title = spec.name;
  result.summary.x_label = "";

  std::string check = "sampler,quantity,empirical,exact\n";
  run_sweep(
      c, {spec.name}, {0.0}, models, [](std::size_t) { return std::size_t{0}; },
      [&](std::size_t t) { return spec.labels.at(t); },
      [](std::size_t t) { return static_cast<double>(t); }, art, log,
      [&](std::size_t, SamplerKind kind, const std::vector<double>& pooled) {
        std::vector<double> counts(spec.num_params(), 0.0);
        for (double v : pooled) counts[static_cast<std::size_t>(v)] += 1.0;
        for (std::size_t t = 0; t < spec.num_params(); ++t)
          check += fmt::format("{},posterior_{},{},{}\n", to_string(kind), spec.labels[t],
                               format_number(pooled.empty() ? 0.0 : counts[t] / pooled.size()),
                               format_number(to_double(exact[t])));
        const auto& row = result.summary.rows.back();
        std::string exact_acc;
        if (kind != SamplerKind::pmc)
          exact_acc = format_number(to_double(oracle::average_acceptance(spec, kind, c.rule)));
        check += fmt::format("{},avg_accept,{},{}\n", to_string(kind), format_number(row.avg_accept),
                             exact_acc);
      });
  art.write("toy_check.csv", check);
}

void run_gaussian(const ExperimentConfig& c, Artifacts& art, std::ostream& log) {
  std::vector<GaussianModel> models;
  std::vector<std::string> labels;
  for (double s2 : c.grid) {
    GaussianSpec spec;
    spec.sigma2 = s2;
    spec.observation = c.observation;
    spec.prior_mean = c.prior_mean;
    spec.prior_sd = c.prior_sd;
    spec.proposal_sd = c.gaussian_proposal_sd;
    models.emplace_back(spec);
    labels.push_back(grid_label(s2));
  }
  auto& result = art.result;
  result.summary.title = "Gaussian model: average acceptance vs sigma^2";
  result.summary.x_label = "sigma^2";
  run_sweep(
      c, labels, c.grid, models, [&](std::size_t) { return c.prior_mean; },
      [](double v) { return fmt::format("{:.17g}", v); }, [](double v) { return v; }, art, log,
      [&](std::size_t g, SamplerKind kind, const std::vector<double>& pooled) {
        auto p = summarize_draws(labels[g], kind, pooled);
        p.exact_mean = models[g].posterior_mean();
        p.exact_sd = std::sqrt(models[g].posterior_variance());
        result.posterior.push_back(p);
      });
}

void run_ising(const ExperimentConfig& c, Artifacts& art, std::ostream& log) {
  std::vector<IsingModel> models;
  std::vector<std::string> labels;
  for (std::size_t g = 0; g < c.grid.size(); ++g) {
    const double beta = c.grid[g];
    RandomStream data_rng(c.data_seed, g);
    IsingSpec spec;
    spec.side = c.side;
    spec.coupling = c.coupling;
    spec.prior_mean = c.prior_mean;
    spec.prior_sd = c.prior_sd;
    spec.proposal_sd = c.proposal_sd;
    spec.wolff_burn_in = c.wolff_burn_in;
    spec.dataset = sample_ising(c.side, c.coupling, beta, c.configs, c.data_burn_in, data_rng);
    labels.push_back(grid_label(beta));
    std::ostringstream data;
    write_ising_dataset(data, c.coupling, spec.dataset);
    art.write(fs::path("data") / fmt::format("beta_{}.txt", labels.back()), data.str());
    models.emplace_back(std::move(spec));
    log << fmt::format("  beta {}: MPLE {:.6f}\n", labels.back(), models.back().mple());
  }
  auto& result = art.result;
  result.summary.title = "Ising model: average acceptance vs beta";
  result.summary.x_label = "beta";
  run_sweep(
      c, labels, c.grid, models, [&](std::size_t g) { return models[g].mple(); },
      [](double v) { return fmt::format("{:.17g}", v); }, [](double v) { return v; }, art, log,
      [&](std::size_t g, SamplerKind kind, const std::vector<double>& pooled) {
        result.posterior.push_back(summarize_draws(labels[g], kind, pooled));
      });
}

}  // namespace

std::string grid_label(double value) { return format_number(value); }

std::vector<OracleValue> oracle_reference_check() {
  std::vector<OracleValue> out;
  auto add = [&](const ToySpec& spec, std::size_t t, std::size_t tp, Estimator e, Rational ref) {
    out.push_back({spec.name, spec.labels[t] + "->" + spec.labels[tp], e,
                   spec.proposal[t][tp] * oracle::acceptance(spec, t, tp, e), std::move(ref)});
  };
  const auto t1 = toy_spec_1();
  add(t1, 0, 1, Estimator::sve, Rational(3, 7));
  add(t1, 1, 0, Estimator::sve, Rational(1, 2));
  add(t1, 0, 1, Estimator::mpmc, Rational(11, 28));
  add(t1, 1, 0, Estimator::mpmc, Rational(55, 120));
  const auto t2 = toy_spec_2();
  add(t2, 0, 1, Estimator::sve, Rational(3, 20));
  add(t2, 1, 0, Estimator::sve, Rational(3, 20));
  add(t2, 0, 1, Estimator::mpmc, Rational(4, 15));
  add(t2, 1, 0, Estimator::mpmc, Rational(4, 15));
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config, std::ostream& log) {
  validate(config);
  ExperimentResult result;
  result.directory = config.output_dir / config.name;
  std::error_code ec;
  fs::create_directories(result.directory, ec);
  if (ec || !fs::is_directory(result.directory))
    throw std::runtime_error(fmt::format("cannot create output directory '{}': {}",
                                         result.directory.string(), ec.message()));
  Artifacts art{result.directory, result};
  log << fmt::format("[{}] {} -> {}\n", config.name, to_string(config.experiment),
                     result.directory.string());

  switch (config.experiment) {
    case ExperimentKind::oracle_check: {
      run_oracle_check(result, art, log, "");
      std::ostringstream csv;
      SweepSummary all;
      for (const auto& spec : {toy_spec_1(), toy_spec_2()}) {
        auto s = oracle_summary(spec, spec.name + ":");
        all.rows.insert(all.rows.end(), s.rows.begin(), s.rows.end());
      }
      all.title = "exact acceptance";
      result.summary = all;
      write_summary_csv(csv, all);
      art.write("summary.csv", csv.str());
      art.write("notes.txt", notes_text(config));
      return result;
    }
    case ExperimentKind::toy1:
    case ExperimentKind::toy2:
      run_toy(config, art, log);
      break;
    case ExperimentKind::gaussian_sweep:
      run_gaussian(config, art, log);
      break;
    case ExperimentKind::ising_sweep:
      run_ising(config, art, log);
      break;
  }
  if (config.oracle_check) run_oracle_check(result, art, log, "oracle");

  std::ostringstream csv;
  write_summary_csv(csv, result.summary);
  art.write("summary.csv", csv.str());
  if (!result.posterior.empty()) art.write("posterior.csv", posterior_csv(result.posterior));
  if (config.is_sweep()) {
    std::ostringstream svg;
    write_plot_svg(svg, result.summary);
    art.write("summary.svg", svg.str());
  }
  art.write("notes.txt", notes_text(config));
  return result;
}

}  // namespace dimc
