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

#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "qlyap/model.hpp"
#include "qlyap/types.hpp"

namespace qlyap {

struct EnsembleOptions {
  /// Number of recorded times, evenly spaced in steps over [0, t_final].
  std::size_t record_points = 101;
  /// Radii for sup-distance exceedance and first-exit times.
  std::vector<double> R_list;
  std::size_t histogram_bins = 10;
};

/// Raw per-trajectory data; trajectory i was driven by seed base_seed + i.
struct EnsembleSamples {
  std::uint64_t base_seed = 0;
  std::size_t trials = 0;
  double dt = 0.0;
  double t_final = 0.0;
  std::vector<std::size_t> record_steps;
  std::vector<double> times;
  std::vector<double> R_list;

  std::vector<std::uint8_t> failed;  ///< nonzero when the trajectory was aborted
  std::vector<std::string> failure_messages;
  /// [trial][record index]
  std::vector<std::vector<double>> V;
  std::vector<std::vector<double>> fidelity;
  std::vector<double> sup_distance;  ///< max equivalence distance over every step
  /// [trial][R index]; infinity when the trajectory never leaves N_R.
  std::vector<std::vector<double>> first_exit_times;
};

inline constexpr double kNeverExited = std::numeric_limits<double>::infinity();

struct EnsembleSummary {
  std::size_t trials = 0;  ///< requested
  std::size_t completed = 0;
  std::size_t failed = 0;  ///< trajectories aborted by IntegrationError, excluded
  std::uint64_t seed_first = 0;
  std::uint64_t seed_last = 0;
  double dt = 0.0;
  double horizon = 0.0;  ///< sup over time is taken on [0, horizon] only

  std::vector<double> times;
  std::vector<double> mean_V;
  std::vector<double> stderr_V;
  /// Standard error of the paired increment V(t_i) - V(t_{i-1}); 0 at i = 0.
  std::vector<double> stderr_dV;
  std::vector<double> mean_fidelity;
  std::vector<double> stderr_fidelity;
  std::vector<double> mean_distance;

  std::vector<double> R_list;
  std::vector<double> sup_distance_exceed_prob;       ///< per R
  std::vector<std::vector<double>> first_exit_times;  ///< [R index][trajectory]
  std::vector<std::size_t> final_fidelity_histogram;  ///< equal bins on [0, 1]
};

EnsembleSamples sample_ensemble(const SystemModel& model, const ControlLaw& law,
                                const QuantumState& psi0, double dt, double t_final,
                                std::size_t trials, std::uint64_t base_seed,
                                const EnsembleOptions& options = {});

/// Order-fixed reduction over completed trajectories.
EnsembleSummary summarize(const EnsembleSamples& samples, std::size_t histogram_bins = 10);

/// Trajectory-parallel (QLYAP_THREADS caps the worker count); bit-identical
/// for fixed inputs regardless of scheduling.
EnsembleSummary run_ensemble(const SystemModel& model, const ControlLaw& law,
                             const QuantumState& psi0, double dt, double t_final,
                             std::size_t trials, std::uint64_t base_seed,
                             const EnsembleOptions& options = {});

struct SupermartingaleResult {
  bool passes = false;
  double worst_violation_sigma = 0.0;  ///< max of (mean_V[i] - mean_V[i-1]) / stderr_dV[i]
  std::size_t worst_index = 0;
};

/// passes iff mean_V[i] <= mean_V[i-1] + 3 stderr_dV[i] + abs_tol at every
/// consecutive recorded pair. abs_tol absorbs round-off on noiseless paths.
/// Throws PreconditionError for fewer than 100 completed trajectories.
SupermartingaleResult supermartingale_test(const EnsembleSummary& summary, double abs_tol = 1e-9);

struct StabilityRow {
  double perturbation = 0.0;  ///< ||d psi||
  double V0 = 0.0;
  double R = 0.0;
  double nu = 0.0;  ///< R^2 - R^4/4
  double nu_effective = 0.0;
  double empirical_P = 0.0;
  double binomial_stderr = 0.0;  ///< sqrt(q(1-q)/N) at q = min(1, V0/nu_effective)
  double bound = 0.0;            ///< V0 / nu_effective
  bool passes = false;           ///< empirical_P <= bound + 3 binomial_stderr
};

struct StabilityReport {
  std::vector<StabilityRow> rows;  ///< perturbation-major, then R
  /// Per R: exceedance does not increase (beyond 3 sigma) as the perturbation shrinks.
  std::vector<bool> monotone;
  double horizon = 0.0;
  bool passes() const;
};

/// psi0 = normalize(psi_f + s b), b the first vector of the Gram-Schmidt
/// completion of psi_f, for each s in perturbation_sizes. One ensemble per s,
/// with seeds base_seed + i.
StabilityReport stability_bound_test(const SystemModel& model, const ControlLaw& law,
                                     const std::vector<double>& R_list,
                                     const std::vector<double>& perturbation_sizes, double dt,
                                     double t_final, std::size_t trials, std::uint64_t base_seed);

struct ProbeResult {
  double initial_fidelity = 0.0;
  double mean_drift_V = 0.0;  ///< mean of V(t_probe) - V(0)
  double stderr_drift_V = 0.0;
  double mean_drift_distance = 0.0;
  double stderr_drift_distance = 0.0;
  double mean_fidelity_gain = 0.0;
  double stderr_fidelity_gain = 0.0;
  bool stationary = false;  ///< both drifts within 3 sigma + abs_tol of zero
  bool escapes = false;     ///< fidelity gain > 3 sigma
  std::size_t completed = 0;
};

ProbeResult invariance_probe(const SystemModel& model, const ControlLaw& law,
                             const QuantumState& candidate, double dt, double t_probe,
                             std::size_t trials, std::uint64_t base_seed, double abs_tol = 1e-9);

std::vector<ProbeResult> invariance_probe(const SystemModel& model, const ControlLaw& law,
                                          const std::vector<QuantumState>& candidates, double dt,
                                          double t_probe, std::size_t trials,
                                          std::uint64_t base_seed, double abs_tol = 1e-9);

}  // namespace qlyap
