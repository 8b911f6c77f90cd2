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

#include "qlyap/cli.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qlyap/io.hpp"
#include "qlyap/kernels.hpp"
#include "qlyap/monte_carlo.hpp"
#include "qlyap/quantum_core.hpp"
#include "qlyap/sse.hpp"
#include "qlyap/structural.hpp"

namespace qlyap {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Overrides {
  std::optional<double> dt;
  std::optional<double> t_final;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;

  void apply(RunParams& p) const {
    if (dt) p.dt = *dt;
    if (t_final) p.t_final = *t_final;
    if (seed) p.seed = *seed;
    if (trials) p.trials = *trials;
  }
};

struct Options {
  std::string file;
  Overrides run;
  std::string kernel = "auto";
  bool amplitudes = false;
  std::string output;
  std::string out_dir;
  double tol = 1e-9;
  int grid_points = 50;
  int record_points = 101;
};

SystemDefinition load(const Options& o) {
  SystemDefinition def = parse_definition(o.file);
  o.run.apply(def.params);
  if (!(def.params.dt > 0.0)) throw ValidationError("--dt: must be positive");
  if (!(def.params.t_final >= 0.0)) throw ValidationError("--t-final: must be >= 0");
  if (def.params.trials < 1) throw ValidationError("--trials: must be >= 1");
  return def;
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string trajectory_csv(const SystemDefinition& def, bool amplitudes) {
  const TrajectoryRecord rec = simulate_trajectory(def.model, def.law, def.psi0, def.params.dt,
                                                   def.params.t_final, def.params.seed);
  std::ostringstream csv;
  write_trajectory_csv(csv, rec, amplitudes);
  return csv.str();
}

struct EnsembleOutput {
  json doc;
  bool gate_ok = true;
};

EnsembleOutput ensemble_json(const SystemDefinition& def, int record_points) {
  EnsembleOptions opts;
  opts.R_list = def.params.R_list;
  opts.record_points = static_cast<std::size_t>(std::max(record_points, 2));
  const EnsembleSummary s =
      run_ensemble(def.model, def.law, def.psi0, def.params.dt, def.params.t_final,
                   def.params.trials, def.params.seed, opts);
  EnsembleOutput out;
  out.doc = to_json(s);
  if (s.completed >= 100) {
    const SupermartingaleResult sm = supermartingale_test(s);
    out.doc["supermartingale"] = to_json(sm);
    out.gate_ok = sm.passes;
  } else {
    out.doc["supermartingale"] = nullptr;
  }
  return out;
}

json sweep_json(const SystemDefinition& def, const Options& o) {
  LambdaSweepOptions opts;
  opts.grid_points = o.grid_points;
  opts.seed = def.params.seed;
  opts.tol = o.tol;
  return to_json(lambda_sweep(def.model, opts));
}

int run_report(const SystemDefinition& def, const Options& o, std::ostream& out) {
  const fs::path dir(o.out_dir);
  fs::create_directories(dir);
  auto write = [&](const char* name, const std::string& text) {
    emit(text, (dir / name).string(), out);
    out << (dir / name).string() << '\n';
  };

  const AssumptionReport assumptions = check_assumptions(def.model, o.tol);
  write("check.json", dump(to_json(assumptions)));
  write("trajectory.csv", trajectory_csv(def, o.amplitudes));
  const EnsembleOutput ens = ensemble_json(def, o.record_points);
  write("ensemble.json", dump(ens.doc));
  write("invariant_set.json", dump(sweep_json(def, o)));
  json escape;
  if (assumptions.a2.holds) {
    escape = to_json(escape_matrix(def.model));
  } else {
    escape = {{"error", "assumption A2 fails (target is not an eigenket of H0)"}};
  }
  write("escape.json", dump(escape));

  bool stability_ok = true;
  if (!def.params.R_list.empty() && !def.params.perturbation_sizes.empty()) {
    const StabilityReport st =
        stability_bound_test(def.model, def.law, def.params.R_list, def.params.perturbation_sizes,
                             def.params.dt, def.params.t_final, def.params.trials, def.params.seed);
    stability_ok = st.passes();
    write("stability.json", dump(to_json(st)));
  }
  return ens.gate_ok && stability_ok ? kExitOk : kExitGateFailed;
}

const std::set<std::string> kSubcommands = {"check",         "simulate", "ensemble",
                                            "invariant-set", "escape",   "report"};

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lyapunov feedback stabilization of continuously measured quantum systems", "qlyap"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--kernel", o.kernel, "Kernel backend: scalar, avx2 or auto")
      ->check(CLI::IsMember({"scalar", "avx2", "auto"}));

  auto add_run_flags = [&](CLI::App* sub, bool with_trials) {
    sub->add_option("file", o.file, "System definition (JSON)")->required();
    sub->add_option("--dt", o.run.dt, "Override the step size");
    sub->add_option("--t-final", o.run.t_final, "Override the horizon");
    sub->add_option("--seed", o.run.seed, "Override the base seed");
    if (with_trials) sub->add_option("--trials", o.run.trials, "Override the trajectory count");
  };

  CLI::App* check = app.add_subcommand("check", "Report which standing assumptions hold");
  check->add_option("file", o.file, "System definition (JSON)")->required();
  check->add_option("--tol", o.tol, "Eigenket and rank tolerance");

  CLI::App* simulate = app.add_subcommand("simulate", "One trajectory as CSV");
  add_run_flags(simulate, false);
  simulate->add_flag("--amplitudes", o.amplitudes, "Append re/im amplitude columns");
  simulate->add_option("-o,--output", o.output, "Output file (default stdout)");

  CLI::App* ensemble = app.add_subcommand("ensemble", "Ensemble summary and supermartingale gate");
  add_run_flags(ensemble, true);
  ensemble->add_option("--record-points", o.record_points, "Recorded times");
  ensemble->add_option("-o,--output", o.output, "Output file (default stdout)");

  CLI::App* invariant = app.add_subcommand("invariant-set", "Lambda sweep of the set B");
  invariant->add_option("file", o.file, "System definition (JSON)")->required();
  invariant->add_option("--grid-points", o.grid_points, "Grid points per control");
  invariant->add_option("--seed", o.run.seed, "Seed for sampled sweeps");
  invariant->add_option("--tol", o.tol, "Nullspace tolerance");

  CLI::App* escape = app.add_subcommand("escape", "Escape matrix on the orthogonal complement");
  escape->add_option("file", o.file, "System definition (JSON)")->required();

  CLI::App* report = app.add_subcommand("report", "Every result into one directory");
  add_run_flags(report, true);
  report->add_option("--out-dir", o.out_dir, "Output directory")->required();
  report->add_flag("--amplitudes", o.amplitudes, "Append amplitude columns to the CSV");
  report->add_option("--record-points", o.record_points, "Recorded times");
  report->add_option("--grid-points", o.grid_points, "Grid points per control");

  if (argc < 2 || (argv[1][0] != '-' && !kSubcommands.count(argv[1]))) {
    if (argc >= 2) err << "unknown subcommand: " << argv[1] << "\n";
    err << app.help();
    return kExitUsage;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << app.help();
    return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
  }

  try {
    kernels::select(*kernels::parse_backend(o.kernel));
    if (check->parsed()) {
      const SystemDefinition def = load(o);
      out << dump(to_json(check_assumptions(def.model, o.tol)));
      return kExitOk;
    }
    if (simulate->parsed()) {
      emit(trajectory_csv(load(o), o.amplitudes), o.output, out);
      return kExitOk;
    }
    if (ensemble->parsed()) {
      const EnsembleOutput ens = ensemble_json(load(o), o.record_points);
      emit(dump(ens.doc), o.output, out);
      return ens.gate_ok ? kExitOk : kExitGateFailed;
    }
    if (invariant->parsed()) {
      const SystemDefinition def = load(o);
      out << dump(sweep_json(def, o));
      return kExitOk;
    }
    if (escape->parsed()) {
      out << dump(to_json(escape_matrix(load(o).model)));
      return kExitOk;
    }
    if (report->parsed()) return run_report(load(o), o, out);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {  // ValidationError, StructuralError
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::domain_error& e) {  // PreconditionError
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const IntegrationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitUsage;
}

}  // namespace qlyap
