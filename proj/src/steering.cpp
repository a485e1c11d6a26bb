#include "qjumps/steering.hpp"

#include <algorithm>
#include <cmath>

#include "qjumps/errors.hpp"
#include "qjumps/homodyne.hpp"
#include "qjumps/lindblad.hpp"
#include "qjumps/parallel.hpp"
#include "qjumps/said.hpp"

namespace qjumps {

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::said: return "said";
    case Scheme::x_lab: return "x_lab";
    case Scheme::y_lab: return "y_lab";
    case Scheme::y_secular: return "y_secular";
  }
  return "?";
}

std::string to_string(Pair p) { return p == Pair::said_y ? "said_y" : "x_y"; }

Scheme parse_scheme(const std::string& name) {
  if (name == "said") return Scheme::said;
  if (name == "x_lab") return Scheme::x_lab;
  if (name == "y_lab") return Scheme::y_lab;
  if (name == "y_secular") return Scheme::y_secular;
  throw ConfigError("unknown scheme '" + name + "'");
}

Pair parse_pair(const std::string& name) {
  if (name == "said_y") return Pair::said_y;
  if (name == "x_y") return Pair::x_y;
  throw ConfigError("unknown pair '" + name + "'");
}

Scheme scheme_a(Pair p) { return p == Pair::said_y ? Scheme::said : Scheme::x_lab; }
Scheme scheme_b(Pair p) { return p == Pair::said_y ? Scheme::y_secular : Scheme::y_lab; }

int label_dims(Scheme s) { return (s == Scheme::said || s == Scheme::x_lab) ? 1 : 2; }

BobOutcomes simulate_bob_outcomes(const BlochState& state, std::span<const Axis> axes,
                                  int n_per_axis, RandomStream& rng) {
  const auto n = normalize(state).state;
  const std::array<double, 3> mean{n.x, n.y, n.z};
  BobOutcomes out;
  for (Axis a : axes) {
    const double p_plus = 0.5 * (1.0 + mean[static_cast<int>(a)]);
    auto& v = out.outcomes[static_cast<int>(a)];
    v.clear();
    v.reserve(static_cast<std::size_t>(std::max(n_per_axis, 0)));
    for (int k = 0; k < n_per_axis; ++k) v.push_back(rng.uniform() < p_plus ? +1 : -1);
  }
  return out;
}

AxisTally tally(std::span<const int> outcomes) {
  AxisTally t;
  for (int o : outcomes) {
    if (o == +1) ++t.plus;
    ++t.total;
  }
  return t;
}

double scheme_dt(Scheme s, double omega, double dt_override) {
  if (dt_override > 0.0) return dt_override;
  if (s == Scheme::x_lab || s == Scheme::y_lab) return default_lab_dt(omega);
  return kDefaultSecularDt;
}

namespace {

std::array<double, 2> label_of(Scheme scheme, const BlochState& s) {
  auto clamp1 = [](double v) { return std::clamp(v, -1.0, 1.0); };
  if (label_dims(scheme) == 1) return {clamp1(s.x), 0.0};
  return {clamp1(s.y), clamp1(s.z)};
}

std::vector<double> schedule_for(const EnsembleOptions& o, std::size_t count, RandomStream& rng) {
  if (o.mode == SamplingMode::halt_time) {
    return {o.halt_min + (o.halt_max - o.halt_min) * rng.uniform()};
  }
  return stationary_schedule(o.burn_in, o.stride, count);
}

std::uint64_t tag_for(Scheme s) {
  return s == Scheme::said ? stream_tag::said : stream_tag::homodyne;
}

// Runs the scheme's trajectory `index` and returns its normalized samples.
std::vector<BlochState> run_samples(Scheme scheme, double eta, double omega,
                                    const EnsembleOptions& o, std::size_t index,
                                    std::size_t count) {
  RandomStream rng = substream(o.seed, tag_for(scheme), index);
  const auto times = schedule_for(o, count, rng);
  SimConfig cfg;
  cfg.omega = omega;
  cfg.dt = scheme_dt(scheme, omega, o.dt);
  cfg.seed = o.seed;
  cfg.t_final = times.back();
  TrajectoryRecord rec;
  switch (scheme) {
    case Scheme::said:
      rec = run_said_trajectory(cfg, eta, rng, times);
      break;
    case Scheme::x_lab:
      rec = run_homodyne_trajectory(cfg, DiffusiveSpec::x_homodyne(eta), rng, times);
      break;
    case Scheme::y_lab:
      rec = run_homodyne_trajectory(cfg, DiffusiveSpec::y_homodyne(eta), rng, times);
      break;
    case Scheme::y_secular:
      rec = run_homodyne_trajectory(cfg, DiffusiveSpec::secular_y(eta), rng, times);
      break;
  }
  return rec.samples;
}

std::size_t trajectory_count(const EnsembleOptions& o) {
  if (o.n_records == 0) throw ConfigError("n_records must be positive");
  if (o.mode == SamplingMode::halt_time) return o.n_records;
  const std::size_t per = std::max<std::size_t>(1, o.records_per_trajectory);
  return (o.n_records + per - 1) / per;
}

std::size_t records_in(const EnsembleOptions& o, std::size_t traj) {
  if (o.mode == SamplingMode::halt_time) return 1;
  const std::size_t per = std::max<std::size_t>(1, o.records_per_trajectory);
  return std::min(per, o.n_records - traj * per);
}

void check_options(const EnsembleOptions& o) {
  if (o.n_per_axis < 2) throw ConfigError("Bob needs at least 2 outcomes per axis");
  if (o.mode == SamplingMode::time_sampled && !(o.burn_in >= 10.0 && o.stride > 0.0)) {
    throw ConfigError("time-sampled ensembles need burn_in >= 10/gamma and stride > 0");
  }
  if (o.mode == SamplingMode::halt_time && !(o.halt_min >= 10.0 && o.halt_max >= o.halt_min)) {
    throw ConfigError("halt times must satisfy 10/gamma <= T_min <= T_max");
  }
}

}  // namespace

ConditionedEnsemble build_ensemble(Scheme scheme, double eta, double omega,
                                   const EnsembleOptions& options) {
  check_options(options);
  if (!(eta >= 0.0 && eta <= 1.0)) throw ConfigError("efficiency must lie in [0, 1]");
  const std::size_t n_traj = trajectory_count(options);
  const std::size_t per = options.mode == SamplingMode::halt_time
                              ? 1
                              : std::max<std::size_t>(1, options.records_per_trajectory);

  ConditionedEnsemble ens;
  ens.scheme = scheme;
  ens.eta = eta;
  ens.omega = omega;
  ens.records.resize(options.mode == SamplingMode::halt_time ? n_traj : options.n_records);

  static constexpr std::array<Axis, 3> kAll{Axis::x, Axis::y, Axis::z};
  parallel_for(n_traj, options.workers, [&](std::size_t j) {
    const std::size_t count = records_in(options, j);
    RandomStream time_rng = substream(options.seed, tag_for(scheme), j);
    const auto times = schedule_for(options, count, time_rng);
    const auto samples = run_samples(scheme, eta, omega, options, j, count);
    for (std::size_t k = 0; k < count; ++k) {
      const std::size_t idx = j * per + k;
      EnsembleRecord& r = ens.records[idx];
      r.state = samples[k];
      r.label = label_of(scheme, samples[k]);
      r.halt_time = times[k];
      r.trajectory = static_cast<std::uint32_t>(j);
      RandomStream bob = substream(options.seed, stream_tag::bob, idx);
      const auto out = simulate_bob_outcomes(samples[k], kAll, options.n_per_axis, bob);
      for (int a = 0; a < 3; ++a) r.bob[a] = tally(out.outcomes[a]);
    }
  });
  return ens;
}

namespace {

struct BinAccum {
  double records = 0.0;
  std::array<double, 3> sum{};
  std::array<double, 3> total{};
  std::array<double, 3> exact{};  // Σ weight·⟨σ⟩ for the exact variant

  void add(const BinAccum& o) {
    records += o.records;
    for (int a = 0; a < 3; ++a) {
      sum[a] += o.sum[a];
      total[a] += o.total[a];
      exact[a] += o.exact[a];
    }
  }
};

std::vector<int> axes_for(Functional f) {
  return f == Functional::f1 ? std::vector<int>{0} : std::vector<int>{1, 2};
}

std::size_t bin_index(const std::array<double, 2>& label, int dims, int n) {
  auto one = [n](double v) {
    const int i = static_cast<int>(std::floor((std::clamp(v, -1.0, 1.0) + 1.0) * 0.5 * n));
    return static_cast<std::size_t>(std::clamp(i, 0, n - 1));
  };
  if (dims == 1) return one(label[0]);
  return one(label[0]) * static_cast<std::size_t>(n) + one(label[1]);
}

std::vector<BinAccum> accumulate(const ConditionedEnsemble& ens, const BinSpec& bins,
                                 std::span<const std::uint32_t> multiplicity) {
  if (ens.records.empty()) throw DomainError("bin_estimate: empty ensemble");
  if (bins.bins_per_dim < 1) throw ConfigError("bins_per_dim must be positive");
  const int dims = label_dims(ens.scheme);
  const std::size_t n_bins =
      dims == 1 ? bins.bins_per_dim : static_cast<std::size_t>(bins.bins_per_dim) * bins.bins_per_dim;
  std::vector<BinAccum> acc(n_bins);
  for (std::size_t i = 0; i < ens.records.size(); ++i) {
    const double w = multiplicity.empty() ? 1.0 : multiplicity[i];
    if (w == 0.0) continue;
    const auto& r = ens.records[i];
    BinAccum& b = acc[bin_index(r.label, dims, bins.bins_per_dim)];
    b.records += w;
    const std::array<double, 3> bloch{r.state.x / r.state.w, r.state.y / r.state.w,
                                      r.state.z / r.state.w};
    for (int a = 0; a < 3; ++a) {
      b.sum[a] += w * r.bob[a].sum();
      b.total[a] += w * r.bob[a].total;
      b.exact[a] += w * bloch[a];
    }
  }
  return acc;
}

// Drops empty bins and folds bins lacking two outcomes on a needed axis into the
// next occupied bin (the last one folds backwards).
std::vector<BinAccum> merge_sparse(const std::vector<BinAccum>& acc, const std::vector<int>& axes,
                                   std::size_t& merged) {
  auto sparse = [&](const BinAccum& b) {
    for (int a : axes)
      if (b.total[a] < 2.0) return true;
    return false;
  };
  std::vector<BinAccum> out;
  BinAccum pending;
  bool has_pending = false;
  merged = 0;
  for (const auto& b : acc) {
    if (b.records == 0.0) continue;
    BinAccum cur = b;
    if (has_pending) {
      cur.add(pending);
      pending = BinAccum{};
      has_pending = false;
    }
    if (sparse(cur)) {
      pending = cur;
      has_pending = true;
      ++merged;
      continue;
    }
    out.push_back(cur);
  }
  if (has_pending) {
    if (out.empty()) throw DomainError("bin_estimate: fewer than 2 outcomes on a needed axis");
    out.back().add(pending);
  }
  return out;
}

double squared_mean_unbiased(double sum, double n) {
  const double m = sum / n;
  const double v = n / (n - 1.0) * (1.0 - m * m);
  return m * m - v / n;
}

BinEstimate reduce(const std::vector<BinAccum>& acc, Functional f, bool exact) {
  const auto axes = axes_for(f);
  BinEstimate est;
  const auto bins = merge_sparse(acc, axes, est.bins_merged);
  double weight = 0.0, value = 0.0;
  for (const auto& b : bins) {
    double term = 0.0;
    for (int a : axes) {
      if (exact) {
        const double m = b.exact[a] / b.records;
        term += m * m;
      } else {
        term += squared_mean_unbiased(b.sum[a], b.total[a]);
      }
    }
    value += b.records * term;
    weight += b.records;
  }
  est.value = value / weight;
  est.bins_used = bins.size();
  return est;
}

}  // namespace

BinEstimate bin_estimate(const ConditionedEnsemble& ensemble, Functional functional,
                         const BinSpec& bins) {
  return reduce(accumulate(ensemble, bins, {}), functional, false);
}

BinEstimate bin_estimate_exact(const ConditionedEnsemble& ensemble, Functional functional,
                               const BinSpec& bins) {
  return reduce(accumulate(ensemble, bins, {}), functional, true);
}

BinEstimate bin_estimate_weighted(const ConditionedEnsemble& ensemble, Functional functional,
                                  const BinSpec& bins,
                                  std::span<const std::uint32_t> multiplicity) {
  if (!multiplicity.empty() && multiplicity.size() != ensemble.records.size()) {
    throw ConfigError("multiplicity size must match the ensemble");
  }
  return reduce(accumulate(ensemble, bins, multiplicity), functional, false);
}

double bootstrap_error(const ConditionedEnsemble& ensemble, Functional functional,
                       const BinSpec& bins, const BootstrapOptions& options) {
  if (ensemble.records.empty()) throw DomainError("bootstrap: empty ensemble");
  if (options.resamples < 2) return 0.0;
  // Blocks: runs of at most `block` consecutive records from the same trajectory.
  std::vector<std::pair<std::size_t, std::size_t>> blocks;
  const std::size_t len = std::max<std::size_t>(1, options.block);
  std::size_t start = 0;
  for (std::size_t i = 1; i <= ensemble.records.size(); ++i) {
    const bool cut = i == ensemble.records.size() ||
                     ensemble.records[i].trajectory != ensemble.records[start].trajectory ||
                     i - start == len;
    if (cut) {
      blocks.emplace_back(start, i);
      start = i;
    }
  }
  std::vector<double> values(static_cast<std::size_t>(options.resamples));
  const std::uint64_t salt = functional == Functional::f1 ? 1 : 2;
  parallel_for(values.size(), 1, [&](std::size_t r) {
    RandomStream rng = substream(options.seed ^ salt, stream_tag::bootstrap, r);
    std::vector<std::uint32_t> mult(ensemble.records.size(), 0);
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      const auto& [b0, b1] = blocks[rng.next_u64() % blocks.size()];
      for (std::size_t i = b0; i < b1; ++i) ++mult[i];
    }
    values[r] = bin_estimate_weighted(ensemble, functional, bins, mult).value;
  });
  MeanAccumulator acc;
  for (double v : values) acc.add(v);
  return std::sqrt(acc.variance());
}

SteeringResult steering_sum(const ConditionedEnsemble& ensemble_a,
                            const ConditionedEnsemble& ensemble_b, const BinSpec& bins_a,
                            const BinSpec& bins_b, const BootstrapOptions& options) {
  SteeringResult r;
  r.term_f1 = bin_estimate(ensemble_a, Functional::f1, bins_a).value;
  r.term_f2 = bin_estimate(ensemble_b, Functional::f2, bins_b).value;
  r.s_value = r.term_f1 + r.term_f2;
  r.error_f1 = bootstrap_error(ensemble_a, Functional::f1, bins_a, options);
  r.error_f2 = bootstrap_error(ensemble_b, Functional::f2, bins_b, options);
  r.mc_error = std::hypot(r.error_f1, r.error_f2);
  r.eta_a = ensemble_a.eta;
  r.eta_b = ensemble_b.eta;
  r.omega = ensemble_b.omega;
  if (ensemble_a.scheme == Scheme::said && ensemble_b.scheme == Scheme::y_secular) {
    r.scheme_pair = "said_y";
  } else if (ensemble_a.scheme == Scheme::x_lab && ensemble_b.scheme == Scheme::y_lab) {
    r.scheme_pair = "x_y";
  } else {
    r.scheme_pair = to_string(ensemble_a.scheme) + "+" + to_string(ensemble_b.scheme);
  }
  return r;
}

SteeringResult steering_sum(const ConditionedEnsemble& ensemble_a,
                            const ConditionedEnsemble& ensemble_b,
                            const BootstrapOptions& options) {
  return steering_sum(ensemble_a, ensemble_b, BinSpec::for_scheme(ensemble_a.scheme),
                      BinSpec::for_scheme(ensemble_b.scheme), options);
}

MeanEstimate stationary_purity(Scheme scheme, double eta, double omega,
                               const EnsembleOptions& options) {
  check_options(options);
  const std::size_t n_traj = trajectory_count(options);
  std::vector<std::vector<double>> series(n_traj);
  parallel_for(n_traj, options.workers, [&](std::size_t j) {
    const std::size_t count = records_in(options, j);
    const auto samples = run_samples(scheme, eta, omega, options, j, count);
    auto& s = series[j];
    s.reserve(samples.size());
    for (const auto& b : samples) {
      const auto f = steering_functionals(normalize(b).state);
      s.push_back(label_dims(scheme) == 1 ? f.f1 : f.f2);
    }
  });
  // Blocks of 8 stride-spaced samples absorb the few-γ⁻¹ correlation time.
  return blocked_mean(series, options.mode == SamplingMode::halt_time ? 1 : 8);
}

SteeringResult steering_at(Pair pair, double eta_a, double eta_b, double omega,
                           const EnsembleOptions& options, const BootstrapOptions& bootstrap) {
  const auto a = build_ensemble(scheme_a(pair), eta_a, omega, options);
  const auto b = build_ensemble(scheme_b(pair), eta_b, omega, options);
  return steering_sum(a, b, bootstrap);
}

CriticalResult noisy_bisection(const NoisyObjective& objective, const CriticalOptions& options) {
  if (!(options.tol >= 0.01)) throw ConfigError("tol must be at least 0.01");
  if (!(options.lo >= 0.0 && options.lo < options.hi && options.hi <= 1.0)) {
    throw ConfigError("critical_eta bracket must satisfy 0 <= lo < hi <= 1");
  }
  if (options.initial_records == 0 || options.budget < options.initial_records) {
    throw ConfigError("budget must be at least the initial ensemble size");
  }
  CriticalResult res;
  std::size_t n = options.initial_records;

  auto evaluate = [&](double eta, std::size_t records) {
    const CriticalEvaluation e = objective(eta, records);
    res.evaluations.push_back(e);
    return e;
  };
  // Grows the ensemble until g separates from zero or the budget is spent.
  auto resolve = [&](double eta) {
    CriticalEvaluation e = evaluate(eta, n);
    while (std::abs(e.g) < options.sigmas * e.error && n * 2 <= options.budget) {
      n *= 2;
      e = evaluate(eta, n);
    }
    return e;
  };

  double lo = options.lo, hi = options.hi;
  res.bracket_lo = lo;
  res.bracket_hi = hi;
  const auto e_hi = resolve(hi);
  if (e_hi.g <= -options.sigmas * e_hi.error) {
    res.status = CriticalStatus::none;
    res.n_records_used = n;
    return res;
  }
  if (e_hi.g < options.sigmas * e_hi.error) {
    res.status = CriticalStatus::inconclusive;
    res.n_records_used = n;
    return res;
  }
  const auto e_lo = resolve(lo);
  if (e_lo.g >= options.sigmas * e_lo.error) {
    // Already violated at the lower end of the bracket: the root lies at or below it.
    res.status = CriticalStatus::found;
    res.eta = lo;
    res.bracket_hi = lo;
    res.n_records_used = n;
    return res;
  }
  if (e_lo.g > -options.sigmas * e_lo.error) {
    res.status = CriticalStatus::inconclusive;
    res.n_records_used = n;
    return res;
  }
  double g_lo = e_lo.g, g_hi = e_hi.g;

  while (hi - lo > 2.0 * options.tol) {
    const double mid = 0.5 * (lo + hi);
    const auto e = resolve(mid);
    if (e.g >= options.sigmas * e.error) {
      hi = mid;
      g_hi = e.g;
    } else if (e.g <= -options.sigmas * e.error) {
      lo = mid;
      g_lo = e.g;
    } else {
      // Budget spent inside the noise band: the root is within sigmas·error/slope of mid.
      const double slope = (g_hi - g_lo) / (hi - lo);
      const double halfwidth = slope > 0.0 ? options.sigmas * e.error / slope : hi - lo;
      res.bracket_lo = std::max(lo, mid - halfwidth);
      res.bracket_hi = std::min(hi, mid + halfwidth);
      res.n_records_used = n;
      if (halfwidth <= options.tol) {
        res.status = CriticalStatus::found;
        res.eta = mid;
      } else {
        res.status = CriticalStatus::inconclusive;
      }
      return res;
    }
  }
  res.status = CriticalStatus::found;
  res.eta = 0.5 * (lo + hi);
  res.bracket_lo = lo;
  res.bracket_hi = hi;
  res.n_records_used = n;
  return res;
}

CriticalResult critical_eta(Pair pair, double omega, const CriticalOptions& options) {
  return noisy_bisection(
      [&](double eta, std::size_t records) {
        EnsembleOptions eo = options.ensemble;
        eo.n_records = records;
        const auto s = steering_at(pair, eta, eta, omega, eo, options.bootstrap);
        return CriticalEvaluation{eta, records, s.s_value - 1.0, s.mc_error};
      },
      options);
}

}  // namespace qjumps
