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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "../support.hpp"
#include "qlyap/cli.hpp"
#include "qlyap/kernels.hpp"
#include "qlyap/lyapunov.hpp"
#include "qlyap/monte_carlo.hpp"
#include "qlyap/sse.hpp"
#include "qlyap/structural.hpp"

using namespace qlyap;
using qlyap::testing::Rng;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void criterion(int id, const char* name, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " [exception: " << e.what() << "]";
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!o.pass) ++failures;
  std::printf("%s %2d %s:%s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.str().c_str(),
              secs);
  std::fflush(stdout);
}

SystemDefinition fixture(const char* name) { return testing::load_fixture(name); }

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// Sample mean and standard error of x_1..x_N.
struct MeanSe {
  double mean;
  double se;
};

MeanSe mean_se(const std::vector<double>& x) {
  double m = 0.0;
  for (double v : x) m += v;
  m /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  const double n = static_cast<double>(x.size());
  return {m, std::sqrt(ss / (n - 1.0) / n)};
}

}  // namespace

int main() {
  std::printf("kernel backend: %s\n", kernels::backend_name(kernels::active().backend));

  criterion(1, "exact increment identity", [](Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(101);
    double worst = 0.0;
    for (int rep = 0; rep < 1000; ++rep) {
      const Eigen::Index n = 2 + rep % 3;
      const QuantumState f = rng.state(n);
      const QuantumState s = rng.state(n);
      CVector d = rng.vector(n);
      d *= rng.uniform(0.0, 1.0) / d.norm();
      const double direct = lyapunov_value(CVector(s.amplitudes() + d), f.amplitudes()) -
                            lyapunov_value(s.amplitudes(), f.amplitudes());
      worst = std::max(worst, std::abs(exact_increment(s, d, f) - direct));
    }
    const double secs = seconds_since(t0);
    o.detail << " 1000 pairs, worst |error| = " << worst;
    o.require(worst < 1e-12, "worst < 1e-12");
    o.require(secs < 1.0, "runtime < 1 s");
  });

  criterion(2, "generator sign", [](Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto def = fixture("qutrit.json");
    o.require(check_assumptions(def.model).all_hold(), "fixture satisfies A1-A5");
    Rng rng(102);
    double worst = -1.0;
    for (int rep = 0; rep < 10000; ++rep) {
      worst = std::max(worst, generator_LV_reduced(def.model, def.law, rng.state(3)));
    }
    const double secs = seconds_since(t0);
    o.detail << " 10000 states on the qutrit fixture, max LV = " << worst;
    o.require(worst <= 1e-12, "max LV <= 1e-12");
    o.require(secs < 5.0, "runtime < 5 s");
  });

  criterion(3, "generator reduction", [](Outcome& o) {
    Rng rng(103);
    double worst = 0.0;
    for (const char* name : {"qubit_reference.json", "qutrit.json", "shared_eigenket.json"}) {
      const auto def = fixture(name);
      for (int rep = 0; rep < 1000; ++rep) {
        const QuantumState s = rng.state(def.model.dim());
        const auto u = control_signals(def.model, def.law, s);
        worst = std::max(worst, std::abs(generator_LV_general(def.model, u, s).drift -
                                         generator_LV_reduced(def.model, def.law, s)));
      }
    }
    o.detail << " 3 fixtures x 1000 states, worst gap = " << worst;
    o.require(worst < 1e-12, "gap < 1e-12");
  });

  criterion(4, "generator consistency (one-step Monte Carlo)", [](Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto def = fixture("qutrit.json");
    const SystemModel& m = def.model;
    Rng rng(104);
    const double h = 1e-4;
    const std::size_t samples = 100000;
    EulerMaruyamaStepper stepper(m, def.law);
    for (int probe = 0; probe < 3; ++probe) {
      const QuantumState s = rng.state(3);
      const double v0 = lyapunov_value(s, m.target());
      const double lv = generator_LV_general(m, control_signals(m, def.law, s), s).drift;
      const NormalStream stream(4000 + static_cast<std::uint64_t>(probe));
      std::vector<double> inc(samples), u(m.num_controls());
      for (std::size_t i = 0; i < samples; ++i) {
        CVector p = s.amplitudes();
        stepper.step(p, h, std::sqrt(h) * stream.normal(i), u.data());
        inc[i] = (lyapunov_value(p, m.target().amplitudes()) - v0) / h;
      }
      const MeanSe ms = mean_se(inc);
      const double z = (ms.mean - lv) / ms.se;
      o.detail << " probe " << probe << ": LV = " << lv << ", MC = " << ms.mean << " (z = " << z
               << ");";
      o.require(std::abs(z) <= 3.0, "probe within 3 sigma");
    }
    o.require(seconds_since(t0) < 30.0, "runtime < 30 s");
  });

  criterion(5, "supermartingale", [](Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto def = fixture("qubit_reference.json");
    const RunParams& p = def.params;
    const EnsembleSummary s =
        run_ensemble(def.model, def.law, def.psi0, p.dt, p.t_final, 2000, p.seed);
    const SupermartingaleResult r = supermartingale_test(s);
    o.detail << " 2000 trajectories, t in [0, " << p.t_final << "], " << s.times.size()
             << " recorded times, E[V]: " << s.mean_V.front() << " -> " << s.mean_V.back()
             << ", worst rise = " << r.worst_violation_sigma << " sigma";
    o.require(s.completed == 2000, "all trajectories completed");
    o.require(r.passes, "E[V] non-increasing within 3 sigma");
    o.require(seconds_since(t0) < 120.0, "runtime < 2 min");
  });

  criterion(6, "stability bound", [](Outcome& o) {
    const auto def = fixture("qubit_reference.json");
    const RunParams& p = def.params;
    const StabilityReport rep = stability_bound_test(
        def.model, def.law, {0.3, 0.5, 1.0}, {0.3, 0.1, 0.03}, p.dt, p.t_final, 2000, p.seed);
    for (const StabilityRow& row : rep.rows) {
      o.detail << " |dpsi|=" << row.perturbation << ",R=" << row.R << ": P=" << row.empirical_P
               << " <= " << row.bound << "+3*" << row.binomial_stderr << ";";
      o.require(row.passes, "bound row");
    }
    for (std::size_t r = 0; r < rep.monotone.size(); ++r) {
      o.require(rep.monotone[r], "monotone in |dpsi|");
    }
  });

  criterion(7, "Born-rule collapse", [](Outcome& o) {
    CMatrix z = CMatrix::Zero(2, 2);
    z.diagonal() << 1.0, -1.0;
    const SystemModel pure(HermitianOperator(CMatrix::Zero(2, 2)), {}, HermitianOperator(z), 50.0,
                           1.0, QuantumState::basis(2, 0));
    const QuantumState plus = QuantumState::normalized(CVector::Ones(2));
    const std::size_t trials = 2000;
    std::vector<double> up(trials), x_final(trials);
    int undecided = 0;
    for (std::size_t s = 0; s < trials; ++s) {
      const TrajectoryRecord r =
          simulate_trajectory(pure, ControlLaw::unit_gains(0), plus, 1e-4, 0.5, s);
      const double p0 = std::norm(r.states.back()[0]);
      if (p0 > 1e-6 && p0 < 1.0 - 1e-6) ++undecided;
      up[s] = p0 > 0.5 ? 1.0 : 0.0;
      x_final[s] = r.observable_mean.back();
    }
    const MeanSe freq = mean_se(up);
    const MeanSe x = mean_se(x_final);
    const double sigma = std::sqrt(0.25 / static_cast<double>(trials));
    o.detail << " k=50, 2000 seeds: P(|0>) = " << freq.mean << " (3 sigma = " << 3 * sigma
             << "), E[<X>] = " << x.mean << " vs 0 (3 se = " << 3 * x.se << "), undecided "
             << undecided;
    o.require(std::abs(freq.mean - 0.5) <= 3.0 * sigma, "frequency 0.5 +- 3 sigma");
    o.require(std::abs(x.mean) <= 3.0 * x.se, "E[<X>] conserved");
    o.require(undecided == 0, "every trajectory collapsed");
  });

  criterion(8, "invariant-set dimension", [](Outcome& o) {
    const auto def = fixture("qutrit.json");
    const SystemModel& m = def.model;
    const AssumptionReport rep = check_assumptions(m);
    o.require(rep.a5.holds && rep.a5.common_eigenkets.empty(),
              "A5 fixture without common eigenkets");
    Rng rng(108);
    int max_dim = 0;
    for (int rep_i = 0; rep_i < 200; ++rep_i) {
      std::vector<double> lambda;
      for (const auto& hk : m.controls()) {
        const auto ev = hk.spectrum().eigenvalues;
        lambda.push_back(rng.uniform(ev[0] - 1.0, ev[ev.size() - 1] + 1.0));
      }
      max_dim = std::max(max_dim, invariant_set_B(m, lambda).dimension);
    }
    const InvariantSetResult target = invariant_set_B(m, target_lambda(m));
    o.detail << " 200 random lambda draws, max dimension = " << max_dim
             << "; target choice contains psi_f = " << (target.contains_target ? "yes" : "no");
    o.require(max_dim <= 1, "dimension <= 1");
    o.require(target.contains_target, "target choice contains psi_f");
  });

  criterion(9, "escape from the orthogonal complement", [](Outcome& o) {
    const auto def = fixture("qutrit.json");
    const SystemModel& m = def.model;
    const EscapeMatrix e = escape_matrix(m);
    o.require(e.full_rank, "fixture escape matrix full rank");
    Rng rng(109);
    const QuantumState start = testing::orthogonal_state(rng, m.target());
    const ProbeResult p =
        invariance_probe(m, def.law, start, def.params.dt, def.params.t_probe, 500, 9000);
    o.detail << " 500 trajectories from psi in [psi_f]^perp: fidelity gain at t="
             << def.params.t_probe << " = " << p.mean_fidelity_gain << " (se "
             << p.stderr_fidelity_gain << ");";
    o.require(p.completed == 500, "all trajectories completed");
    o.require(p.mean_fidelity_gain > 3.0 * p.stderr_fidelity_gain, "gain > 3 sigma");

    for (const char* name : {"qutrit.json", "shared_eigenket.json", "diagonal_controls.json"}) {
      const SystemModel fm = fixture(name).model;
      const bool full = escape_matrix(fm).full_rank;
      const double found = testing::escape_search_min(fm, rng, 100000);
      const bool oracle = found > 1e-6;
      o.detail << " " << name << ": rank decision " << (full ? "full" : "deficient")
               << ", oracle min " << found << ";";
      o.require(full == oracle, "rank decision agrees with the search oracle");
    }
  });

  criterion(10, "sole invariance of the target class", [](Outcome& o) {
    const auto def = fixture("qutrit.json");
    const SystemModel& m = def.model;
    const double dt = def.params.dt;
    const double tp = def.params.t_probe;
    const std::size_t trials = 500;

    const LambdaSweepResult sweep = lambda_sweep(m, {.grid_points = 20, .keep_examples = 6});
    std::vector<QuantumState> b_candidates;
    for (const InvariantSetResult& r : sweep.examples) {
      for (const QuantumState& v : r.basis) {
        if (equivalence_distance(v, m.target()) > 1e-6) b_candidates.push_back(v);
      }
    }
    Rng rng(110);
    std::vector<QuantumState> perp;
    for (int i = 0; i < 3; ++i) perp.push_back(testing::orthogonal_state(rng, m.target()));

    const ProbeResult at_target = invariance_probe(m, def.law, m.target(), dt, tp, trials, 10000);
    o.require(at_target.stationary, "psi_f stationary");
    std::size_t stationary = 0;
    const auto b_res = invariance_probe(m, def.law, b_candidates, dt, tp, trials, 11000);
    const auto p_res = invariance_probe(m, def.law, perp, dt, tp, trials, 12000);
    double weakest = std::numeric_limits<double>::infinity();
    for (const auto* set : {&b_res, &p_res}) {
      for (const ProbeResult& r : *set) {
        if (r.stationary) ++stationary;
        weakest = std::min(weakest, std::abs(r.mean_drift_V) / r.stderr_drift_V);
      }
    }
    o.detail << " " << b_candidates.size() << " B(lambda) candidates + " << perp.size()
             << " perp probes, " << stationary << " stationary; weakest |drift V| = " << weakest
             << " sigma; psi_f stationary = " << (at_target.stationary ? "yes" : "no");
    o.require(!b_candidates.empty(), "non-target B(lambda) candidates found");
    o.require(stationary == 0, "no non-target candidate stationary");
  });

  criterion(11, "shifted control independence", [](Outcome& o) {
    Rng rng(111);
    std::size_t checked = 0, independent = 0;
    for (const char* name : {"qubit_reference.json", "qutrit.json", "shared_eigenket.json"}) {
      const SystemModel m = fixture(name).model;
      for (int rep = 0; rep < 100; ++rep) {
        std::vector<double> lambda;
        for (std::size_t k = 0; k < m.num_controls(); ++k) lambda.push_back(rng.uniform(-5, 5));
        ++checked;
        if (lemma5_independence(m, lambda)) ++independent;
      }
    }
    const SystemModel base = fixture("qutrit.json").model;
    const CMatrix h1 = base.controls()[0].matrix();
    const SystemModel dependent =
        base.with_controls({HermitianOperator(h1), HermitianOperator(CMatrix(2.0 * h1))});
    const bool dep = lemma5_independence(dependent, {0.0, 0.0});
    o.detail << " " << independent << "/" << checked << " draws independent; H2 = 2 H1 gives "
             << (dep ? "independent" : "dependent");
    o.require(independent == checked, "every draw independent");
    o.require(!dep, "dependent fixture detected");
  });

  criterion(12, "determinism", [](Outcome& o) {
    const std::string out =
        (std::filesystem::temp_directory_path() / "qlyap_acceptance.csv").string();
    const std::string fx = testing::fixture_path("qubit_reference.json");
    const char* argv[] = {"qlyap", "--kernel", "scalar", "simulate",  fx.c_str(), "--seed",
                          "7",     "--dt",     "1e-3",   "--t-final", "0.2",      "--amplitudes",
                          "-o",    out.c_str()};
    std::ostringstream sout, serr;
    const int code = run_cli(static_cast<int>(std::size(argv)), argv, sout, serr);
    kernels::select(*kernels::parse_backend("auto"));
    const bool golden =
        code == 0 && read_file(out) == read_file(testing::golden_path("qubit_seed7.csv"));
    o.require(golden, "CSV equals the golden file");

    const auto def = fixture("qutrit.json");
    EnsembleOptions opt;
    opt.R_list = def.params.R_list;
    setenv("QLYAP_THREADS", "1", 1);
    const EnsembleSummary a = run_ensemble(def.model, def.law, def.psi0, 1e-3, 1.0, 200, 5, opt);
    setenv("QLYAP_THREADS", "4", 1);
    const EnsembleSummary b = run_ensemble(def.model, def.law, def.psi0, 1e-3, 1.0, 200, 5, opt);
    unsetenv("QLYAP_THREADS");
    const bool same = a.mean_V == b.mean_V && a.stderr_V == b.stderr_V &&
                      a.mean_fidelity == b.mean_fidelity &&
                      a.sup_distance_exceed_prob == b.sup_distance_exceed_prob &&
                      a.first_exit_times == b.first_exit_times &&
                      a.final_fidelity_histogram == b.final_fidelity_histogram;
    o.detail << " golden CSV " << (golden ? "matches" : "differs")
             << "; 200-trial ensemble on 1 vs 4 threads " << (same ? "bit-identical" : "differs");
    o.require(same, "ensemble bit-identical");
  });

  std::printf("%s: %d criteria failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
