// Copyright 2026 The qlyap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qlyap/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "parallel.hpp"
#include "qlyap/lyapunov.hpp"
#include "qlyap/quantum_core.hpp"
#include "qlyap/rng.hpp"
#include "qlyap/sse.hpp"

namespace qlyap {

namespace {

double distance_from_fidelity(double fid) {
  return std::sqrt(std::max(0.0, 2.0 - 2.0 * std::sqrt(std::clamp(fid, 0.0, 1.0))));
}

double v_from_fidelity(double fid) { return std::clamp(0.5 * (1.0 - fid), 0.0, 0.5); }

struct Moments {
  double mean = 0.0;
  double sem = 0.0;
};

// Two-pass sample mean and standard error of the mean, in index order.
template <typename Get>
Moments moments(std::size_t count, Get&& get) {
  Moments out;
  if (count == 0) return out;
  double sum = 0.0;
  for (std::size_t i = 0; i < count; ++i) sum += get(i);
  out.mean = sum / static_cast<double>(count);
  if (count < 2) return out;
  double ss = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double d = get(i) - out.mean;
    ss += d * d;
  }
  out.sem = std::sqrt(ss / static_cast<double>(count - 1) / static_cast<double>(count));
  return out;
}

std::vector<std::size_t> record_grid(std::size_t steps, std::size_t points) {
  std::vector<std::size_t> grid;
  if (points < 2 || steps == 0) {
    grid = {0};
    if (steps > 0) grid.push_back(steps);
    return grid;
  }
  for (std::size_t i = 0; i < points; ++i) {
    const std::size_t s = static_cast<std::size_t>(std::llround(
        static_cast<double>(i) * static_cast<double>(steps) / static_cast<double>(points - 1)));
    if (grid.empty() || s != grid.back()) grid.push_back(s);
  }
  return grid;
}

}  // namespace

EnsembleSamples sample_ensemble(const SystemModel& model, const ControlLaw& law,
                                const QuantumState& psi0, double dt, double t_final,
                                std::size_t trials, std::uint64_t base_seed,
                                const EnsembleOptions& options) {
  if (trials < 1) throw PreconditionError("run_ensemble: trials must be >= 1");
  require_same_dim(psi0.dim(), model.dim(), "run_ensemble");
  for (double r : options.R_list) {
    if (!(r > 0.0)) throw PreconditionError("run_ensemble: every R must be positive");
  }
  const std::size_t steps = step_count(dt, t_final);

  EnsembleSamples s;
  s.base_seed = base_seed;
  s.trials = trials;
  s.dt = dt;
  s.t_final = t_final;
  s.R_list = options.R_list;
  s.record_steps = record_grid(steps, options.record_points);
  for (std::size_t st : s.record_steps) s.times.push_back(static_cast<double>(st) * dt);
  s.failed.assign(trials, 0);
  s.failure_messages.assign(trials, {});
  s.V.assign(trials, {});
  s.fidelity.assign(trials, {});
  s.sup_distance.assign(trials, 0.0);
  s.first_exit_times.assign(trials, std::vector<double>(options.R_list.size(), kNeverExited));

  // Validates the law against the model once, before spawning workers.
  EulerMaruyamaStepper(model, law);

  const CVector& f = model.target().amplitudes();
  const double sqrt_dt = std::sqrt(dt);
  const std::size_t nR = options.R_list.size();

  detail::parallel_for(trials, [&](std::size_t trial) {
    EulerMaruyamaStepper stepper(model, law);
    const NormalStream stream(base_seed + trial);
    std::vector<double> u(model.num_controls());
    CVector psi = psi0.amplitudes();
    auto& V = s.V[trial];
    auto& fid = s.fidelity[trial];
    auto& exits = s.first_exit_times[trial];
    double& sup = s.sup_distance[trial];
    V.reserve(s.record_steps.size());
    fid.reserve(s.record_steps.size());

    std::size_t next_record = 0;
    auto observe = [&](std::size_t step) {
      const double fi = std::norm(f.dot(psi));
      const double d = distance_from_fidelity(fi);
      sup = std::max(sup, d);
      for (std::size_t r = 0; r < nR; ++r) {
        if (exits[r] == kNeverExited && d > options.R_list[r]) {
          exits[r] = static_cast<double>(step) * dt;
        }
      }
      if (next_record < s.record_steps.size() && s.record_steps[next_record] == step) {
        fid.push_back(fi);
        V.push_back(v_from_fidelity(fi));
        ++next_record;
      }
    };

    observe(0);
    try {
      for (std::size_t i = 0; i < steps; ++i) {
        stepper.step(psi, dt, sqrt_dt * stream.normal(i), u.data());
        observe(i + 1);
      }
    } catch (const IntegrationError& e) {
      s.failed[trial] = 1;
      s.failure_messages[trial] = e.what();
    }
  });
  return s;
}

EnsembleSummary summarize(const EnsembleSamples& s, std::size_t histogram_bins) {
  EnsembleSummary out;
  out.trials = s.trials;
  out.seed_first = s.base_seed;
  out.seed_last = s.base_seed + s.trials - 1;
  out.dt = s.dt;
  out.horizon = s.t_final;
  out.times = s.times;
  out.R_list = s.R_list;

  std::vector<std::size_t> ok;
  for (std::size_t i = 0; i < s.trials; ++i) {
    if (!s.failed[i]) ok.push_back(i);
  }
  out.completed = ok.size();
  out.failed = s.trials - ok.size();
  const std::size_t N = ok.size();

  const std::size_t G = s.times.size();
  out.mean_V.resize(G);
  out.stderr_V.resize(G);
  out.stderr_dV.assign(G, 0.0);
  out.mean_fidelity.resize(G);
  out.stderr_fidelity.resize(G);
  out.mean_distance.resize(G);
  for (std::size_t g = 0; g < G; ++g) {
    const Moments v = moments(N, [&](std::size_t i) { return s.V[ok[i]][g]; });
    out.mean_V[g] = v.mean;
    out.stderr_V[g] = v.sem;
    if (g > 0) {
      out.stderr_dV[g] =
          moments(N, [&](std::size_t i) { return s.V[ok[i]][g] - s.V[ok[i]][g - 1]; }).sem;
    }
    const Moments fi = moments(N, [&](std::size_t i) { return s.fidelity[ok[i]][g]; });
    out.mean_fidelity[g] = fi.mean;
    out.stderr_fidelity[g] = fi.sem;
    out.mean_distance[g] = moments(N, [&](std::size_t i) {
                             return distance_from_fidelity(s.fidelity[ok[i]][g]);
                           }).mean;
  }

  out.sup_distance_exceed_prob.assign(s.R_list.size(), 0.0);
  out.first_exit_times.assign(s.R_list.size(), {});
  for (std::size_t r = 0; r < s.R_list.size(); ++r) {
    std::size_t exceed = 0;
    for (std::size_t i : ok) {
      if (s.sup_distance[i] > s.R_list[r]) ++exceed;
      out.first_exit_times[r].push_back(s.first_exit_times[i][r]);
    }
    out.sup_distance_exceed_prob[r] = N == 0 ? 0.0 : static_cast<double>(exceed) / N;
  }

  const std::size_t bins = std::max<std::size_t>(histogram_bins, 1);
  out.final_fidelity_histogram.assign(bins, 0);
  for (std::size_t i : ok) {
    const double fi = std::clamp(s.fidelity[i].back(), 0.0, 1.0);
    const std::size_t b = std::min(bins - 1, static_cast<std::size_t>(fi * bins));
    ++out.final_fidelity_histogram[b];
  }
  return out;
}

EnsembleSummary run_ensemble(const SystemModel& model, const ControlLaw& law,
                             const QuantumState& psi0, double dt, double t_final,
                             std::size_t trials, std::uint64_t base_seed,
                             const EnsembleOptions& options) {
  return summarize(sample_ensemble(model, law, psi0, dt, t_final, trials, base_seed, options),
                   options.histogram_bins);
}

SupermartingaleResult supermartingale_test(const EnsembleSummary& summary, double abs_tol) {
  if (summary.completed < 100) {
    throw PreconditionError(
        "supermartingale_test: needs at least 100 completed trajectories, got " +
        std::to_string(summary.completed));
  }
  SupermartingaleResult res;
  res.passes = true;
  res.worst_violation_sigma = -std::numeric_limits<double>::infinity();
  for (std::size_t g = 1; g < summary.mean_V.size(); ++g) {
    const double rise = summary.mean_V[g] - summary.mean_V[g - 1];
    const double sigma = summary.stderr_dV[g];
    if (rise > 3.0 * sigma + abs_tol) res.passes = false;
    double z;
    if (sigma > 0.0) {
      z = rise / sigma;
    } else if (rise > abs_tol) {
      z = std::numeric_limits<double>::infinity();
    } else {
      z = 0.0;
    }
    if (z > res.worst_violation_sigma) {
      res.worst_violation_sigma = z;
      res.worst_index = g;
    }
  }
  if (summary.mean_V.size() < 2) res.worst_violation_sigma = 0.0;
  return res;
}

bool StabilityReport::passes() const {
  for (const auto& row : rows) {
    if (!row.passes) return false;
  }
  for (bool m : monotone) {
    if (!m) return false;
  }
  return true;
}

StabilityReport stability_bound_test(const SystemModel& model, const ControlLaw& law,
                                     const std::vector<double>& R_list,
                                     const std::vector<double>& perturbation_sizes, double dt,
                                     double t_final, std::size_t trials, std::uint64_t base_seed) {
  for (double r : R_list) {
    if (!(r > 0.0 && r < 2.0))
      throw PreconditionError("stability_bound_test: R must lie in (0, 2)");
  }
  const QuantumState& f = model.target();
  const CVector direction = complete_basis(f.amplitudes()).col(1);

  StabilityReport rep;
  rep.horizon = t_final;
  EnsembleOptions opts;
  opts.R_list = R_list;
  opts.record_points = 2;

  std::vector<std::vector<double>> probs(perturbation_sizes.size());
  std::vector<std::size_t> counts(perturbation_sizes.size());
  for (std::size_t p = 0; p < perturbation_sizes.size(); ++p) {
    const double s = perturbation_sizes[p];
    if (!(s >= 0.0)) throw PreconditionError("stability_bound_test: sizes must be >= 0");
    const QuantumState psi0 = QuantumState::normalized(f.amplitudes() + s * direction);
    const double V0 = lyapunov_value(psi0, f);
    const EnsembleSummary sum =
        run_ensemble(model, law, psi0, dt, t_final, trials, base_seed, opts);
    probs[p] = sum.sup_distance_exceed_prob;
    counts[p] = sum.completed;
    const double N = static_cast<double>(std::max<std::size_t>(sum.completed, 1));
    for (std::size_t r = 0; r < R_list.size(); ++r) {
      StabilityRow row;
      row.perturbation = s;
      row.V0 = V0;
      row.R = R_list[r];
      row.nu = nu_bound(row.R);
      row.nu_effective = nu_effective(row.R);
      row.empirical_P = sum.sup_distance_exceed_prob[r];
      row.bound = V0 / row.nu_effective;
      const double q = std::min(1.0, row.bound);
      row.binomial_stderr = std::sqrt(q * (1.0 - q) / N);
      row.passes = row.empirical_P <= row.bound + 3.0 * row.binomial_stderr;
      rep.rows.push_back(row);
    }
  }

  std::vector<std::size_t> order(perturbation_sizes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return perturbation_sizes[a] > perturbation_sizes[b];
  });
  rep.monotone.assign(R_list.size(), true);
  for (std::size_t r = 0; r < R_list.size(); ++r) {
    for (std::size_t i = 1; i < order.size(); ++i) {
      const double p_big = probs[order[i - 1]][r];
      const double p_small = probs[order[i]][r];
      const double n_big = static_cast<double>(std::max<std::size_t>(counts[order[i - 1]], 1));
      const double n_small = static_cast<double>(std::max<std::size_t>(counts[order[i]], 1));
      const double sigma =
          std::sqrt(p_big * (1.0 - p_big) / n_big + p_small * (1.0 - p_small) / n_small);
      if (p_small > p_big + 3.0 * sigma) rep.monotone[r] = false;
    }
  }
  return rep;
}

ProbeResult invariance_probe(const SystemModel& model, const ControlLaw& law,
                             const QuantumState& candidate, double dt, double t_probe,
                             std::size_t trials, std::uint64_t base_seed, double abs_tol) {
  EnsembleOptions opts;
  opts.record_points = 2;
  const EnsembleSamples s =
      sample_ensemble(model, law, candidate, dt, t_probe, trials, base_seed, opts);
  std::vector<std::size_t> ok;
  for (std::size_t i = 0; i < s.trials; ++i) {
    if (!s.failed[i]) ok.push_back(i);
  }
  ProbeResult res;
  res.completed = ok.size();
  res.initial_fidelity = std::norm(model.target().amplitudes().dot(candidate.amplitudes()));
  const std::size_t N = ok.size();
  const std::size_t last = s.times.size() - 1;

  const Moments dv = moments(N, [&](std::size_t i) { return s.V[ok[i]][last] - s.V[ok[i]][0]; });
  const Moments dd = moments(N, [&](std::size_t i) {
    return distance_from_fidelity(s.fidelity[ok[i]][last]) -
           distance_from_fidelity(s.fidelity[ok[i]][0]);
  });
  const Moments df =
      moments(N, [&](std::size_t i) { return s.fidelity[ok[i]][last] - s.fidelity[ok[i]][0]; });
  res.mean_drift_V = dv.mean;
  res.stderr_drift_V = dv.sem;
  res.mean_drift_distance = dd.mean;
  res.stderr_drift_distance = dd.sem;
  res.mean_fidelity_gain = df.mean;
  res.stderr_fidelity_gain = df.sem;
  res.stationary =
      std::abs(dv.mean) <= 3.0 * dv.sem + abs_tol && std::abs(dd.mean) <= 3.0 * dd.sem + abs_tol;
  res.escapes = df.mean > 3.0 * df.sem + abs_tol;
  return res;
}

std::vector<ProbeResult> invariance_probe(const SystemModel& model, const ControlLaw& law,
                                          const std::vector<QuantumState>& candidates, double dt,
                                          double t_probe, std::size_t trials,
                                          std::uint64_t base_seed, double abs_tol) {
  std::vector<ProbeResult> out;
  out.reserve(candidates.size());
  for (const auto& c : candidates) {
    out.push_back(invariance_probe(model, law, c, dt, t_probe, trials, base_seed, abs_tol));
  }
  return out;
}

}  // namespace qlyap
