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

#include "qlyap/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qlyap/quantum_core.hpp"

namespace qlyap {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ValidationError(field + ": " + what);
}

const json& require(const json& doc, const char* field) {
  if (!doc.contains(field)) fail(field, "missing field");
  return doc.at(field);
}

double read_number(const json& v, const std::string& field) {
  if (!v.is_number()) fail(field, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(field, "must be finite");
  return x;
}

Complex read_complex(const json& v, const std::string& field) {
  if (v.is_number()) return read_number(v, field);
  if (v.is_array() && v.size() == 2) {
    return {read_number(v[0], field + "[0]"), read_number(v[1], field + "[1]")};
  }
  fail(field, "expected a number or a [re, im] pair");
}

CVector read_vector(const json& v, Eigen::Index n, const std::string& field) {
  if (!v.is_array()) fail(field, "expected an array of " + std::to_string(n) + " entries");
  if (static_cast<Eigen::Index>(v.size()) != n) {
    fail(field, "has " + std::to_string(v.size()) + " entries, expected n = " + std::to_string(n));
  }
  CVector out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out[i] = read_complex(v[static_cast<std::size_t>(i)], field + "[" + std::to_string(i) + "]");
  }
  return out;
}

// Nested rows ([[z, ...], ...], n rows) or a flat row-major list of n^2 entries.
CMatrix read_matrix(const json& v, Eigen::Index n, const std::string& field) {
  if (!v.is_array()) fail(field, "expected an array of rows");
  CMatrix out(n, n);
  const auto len = static_cast<Eigen::Index>(v.size());
  if (len == n) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const std::string row_field = field + "[" + std::to_string(i) + "]";
      const json& row = v[static_cast<std::size_t>(i)];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
        fail(row_field, "expected a row of n = " + std::to_string(n) + " entries");
      }
      for (Eigen::Index j = 0; j < n; ++j) {
        out(i, j) = read_complex(row[static_cast<std::size_t>(j)],
                                 row_field + "[" + std::to_string(j) + "]");
      }
    }
  } else if (len == n * n) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        out(i, j) = read_complex(v[static_cast<std::size_t>(i * n + j)],
                                 field + "[" + std::to_string(i) + "][" + std::to_string(j) + "]");
      }
    }
  } else {
    fail(field, "expected n = " + std::to_string(n) + " rows or n^2 = " + std::to_string(n * n) +
                    " row-major entries, got " + std::to_string(len));
  }
  return out;
}

std::string fmt(double x) { return format_double(x); }

HermitianOperator read_hermitian(const json& v, Eigen::Index n, const std::string& field,
                                 bool traceless) {
  const CMatrix a = read_matrix(v, n, field);
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  double worst = 0.0;
  Eigen::Index wi = 0, wj = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double d = std::abs(a(i, j) - std::conj(a(j, i)));
      if (d > worst) {
        worst = d;
        wi = i;
        wj = j;
      }
    }
  }
  if (worst > HermitianOperator::kHermitianTolerance * scale) {
    fail(field + "[" + std::to_string(wi) + "][" + std::to_string(wj) + "]",
         "not Hermitian, |A_ij - conj(A_ji)| = " + fmt(worst));
  }
  if (traceless) {
    const double tr = std::abs(a.trace());
    if (tr > HermitianOperator::kTraceTolerance * scale) {
      fail(field, "not traceless, |trace| = " + fmt(tr));
    }
  }
  try {
    return traceless ? HermitianOperator::traceless(a) : HermitianOperator(a);
  } catch (const PreconditionError& e) {
    fail(field, e.what());
  }
}

QuantumState read_state(const json& v, Eigen::Index n, const std::string& field) {
  const CVector a = read_vector(v, n, field);
  const double norm = a.norm();
  if (std::abs(norm - 1.0) > QuantumState::kNormTolerance) {
    fail(field, "norm " + fmt(norm) + " is not 1");
  }
  return QuantumState(a);
}

std::vector<double> read_real_list(const json& v, const std::string& field) {
  if (!v.is_array()) fail(field, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back(read_number(v[i], field + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::uint64_t read_unsigned(const json& v, const std::string& field) {
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned())) {
    fail(field, "expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

json optional_number(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

SystemDefinition parse_definition_json(const json& doc) {
  if (!doc.is_object()) throw ValidationError("document: expected a JSON object");

  const std::uint64_t n_raw = read_unsigned(require(doc, "n"), "n");
  if (n_raw < 2) fail("n", "must be >= 2");
  const auto n = static_cast<Eigen::Index>(n_raw);

  const double hbar = read_number(require(doc, "hbar"), "hbar");
  if (!(hbar > 0.0)) fail("hbar", "must be positive");
  const double k = read_number(require(doc, "k_strength"), "k_strength");
  if (!(k >= 0.0)) fail("k_strength", "must be >= 0");

  HermitianOperator h0 = read_hermitian(require(doc, "H0"), n, "H0", true);
  const json& controls_doc = require(doc, "controls");
  if (!controls_doc.is_array()) fail("controls", "expected an array of matrices");
  std::vector<HermitianOperator> controls;
  for (std::size_t i = 0; i < controls_doc.size(); ++i) {
    controls.push_back(
        read_hermitian(controls_doc[i], n, "controls[" + std::to_string(i) + "]", true));
  }
  HermitianOperator x = read_hermitian(require(doc, "X"), n, "X", false);
  QuantumState psi_f = read_state(require(doc, "psi_f"), n, "psi_f");
  QuantumState psi_0 = read_state(require(doc, "psi_0"), n, "psi_0");

  const std::vector<double> gains = read_real_list(require(doc, "gains"), "gains");
  if (gains.size() != controls.size()) {
    fail("gains", "has " + std::to_string(gains.size()) + " entries for " +
                      std::to_string(controls.size()) + " controls");
  }
  for (std::size_t i = 0; i < gains.size(); ++i) {
    if (!(gains[i] > 0.0)) fail("gains[" + std::to_string(i) + "]", "must be positive");
  }
  double phase_tol = ControlLaw::kDefaultPhaseTol;
  if (doc.contains("phase_tol")) {
    phase_tol = read_number(doc.at("phase_tol"), "phase_tol");
    if (!(phase_tol > 0.0)) fail("phase_tol", "must be positive");
  }

  RunParams p;
  p.dt = read_number(require(doc, "dt"), "dt");
  if (!(p.dt > 0.0)) fail("dt", "must be positive");
  p.t_final = read_number(require(doc, "t_final"), "t_final");
  if (!(p.t_final >= 0.0)) fail("t_final", "must be >= 0");
  p.trials = read_unsigned(require(doc, "trials"), "trials");
  if (p.trials < 1) fail("trials", "must be >= 1");
  p.seed = read_unsigned(require(doc, "seed"), "seed");
  p.R_list = read_real_list(require(doc, "R_list"), "R_list");
  for (std::size_t i = 0; i < p.R_list.size(); ++i) {
    if (!(p.R_list[i] > 0.0 && p.R_list[i] < 2.0)) {
      fail("R_list[" + std::to_string(i) + "]", "must lie in (0, 2)");
    }
  }
  if (doc.contains("t_probe")) {
    p.t_probe = read_number(doc.at("t_probe"), "t_probe");
    if (!(p.t_probe > 0.0)) fail("t_probe", "must be positive");
  }
  if (doc.contains("perturbation_sizes")) {
    p.perturbation_sizes = read_real_list(doc.at("perturbation_sizes"), "perturbation_sizes");
    for (std::size_t i = 0; i < p.perturbation_sizes.size(); ++i) {
      if (!(p.perturbation_sizes[i] >= 0.0)) {
        fail("perturbation_sizes[" + std::to_string(i) + "]", "must be >= 0");
      }
    }
  }

  SystemModel model(std::move(h0), std::move(controls), std::move(x), k, hbar, std::move(psi_f));
  return SystemDefinition{std::move(model), ControlLaw(gains, phase_tol), std::move(psi_0),
                          std::move(p)};
}

SystemDefinition parse_definition_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  return parse_definition_json(doc);
}

SystemDefinition parse_definition(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_definition_text(buf.str());
}

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

json matrix_to_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const CVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v[i]));
  return out;
}

json to_json(const SystemDefinition& def) {
  const SystemModel& m = def.model;
  json controls = json::array();
  for (const auto& hk : m.controls()) controls.push_back(matrix_to_json(hk.matrix()));
  return json{
      {"n", m.dim()},
      {"hbar", m.hbar()},
      {"k_strength", m.k_strength()},
      {"H0", matrix_to_json(m.h0().matrix())},
      {"controls", std::move(controls)},
      {"X", matrix_to_json(m.observable().matrix())},
      {"psi_f", vector_to_json(m.target().amplitudes())},
      {"psi_0", vector_to_json(def.psi0.amplitudes())},
      {"gains", def.law.gains()},
      {"phase_tol", def.law.phase_tol()},
      {"dt", def.params.dt},
      {"t_final", def.params.t_final},
      {"trials", def.params.trials},
      {"seed", def.params.seed},
      {"R_list", def.params.R_list},
      {"t_probe", def.params.t_probe},
      {"perturbation_sizes", def.params.perturbation_sizes},
  };
}

json to_json(const AssumptionReport& r) {
  json kets = json::array();
  for (const auto& s : r.a5.common_eigenkets) kets.push_back(vector_to_json(s.amplitudes()));
  return json{
      {"a2",
       {{"holds", r.a2.holds},
        {"lambda_Hf", optional_number(r.a2.lambda_Hf)},
        {"degeneracy", r.a2.degeneracy}}},
      {"a3", {{"holds", r.a3.holds}, {"witnesses", r.a3.witnesses}}},
      {"a4", {{"holds", r.a4.holds}, {"lambda_Xf", optional_number(r.a4.lambda_Xf)}}},
      {"a5",
       {{"holds", r.a5.holds},
        {"rank", r.a5.rank},
        {"num_controls", r.a5.num_controls},
        {"no_control_has_target_eigenket", r.a5.no_control_has_target_eigenket},
        {"singular_values", r.a5.singular_values},
        {"common_eigenkets", std::move(kets)}}},
      {"all_hold", r.all_hold()},
  };
}

json to_json(const EnsembleSummary& s) {
  json exits = json::array();
  for (const auto& per_r : s.first_exit_times) {
    json col = json::array();
    for (double t : per_r) col.push_back(finite_or_null(t));
    exits.push_back(std::move(col));
  }
  json exceed = json::array();
  for (std::size_t r = 0; r < s.R_list.size(); ++r) {
    exceed.push_back({{"R", s.R_list[r]}, {"probability", s.sup_distance_exceed_prob[r]}});
  }
  return json{
      {"trials", s.trials},
      {"completed", s.completed},
      {"failed", s.failed},
      {"seeds", {s.seed_first, s.seed_last}},
      {"dt", s.dt},
      {"horizon", s.horizon},
      {"finite_horizon", true},
      {"times", s.times},
      {"mean_V", s.mean_V},
      {"stderr_V", s.stderr_V},
      {"stderr_dV", s.stderr_dV},
      {"mean_fidelity", s.mean_fidelity},
      {"stderr_fidelity", s.stderr_fidelity},
      {"mean_distance", s.mean_distance},
      {"sup_distance_exceed_prob", std::move(exceed)},
      {"first_exit_times", std::move(exits)},
      {"final_fidelity_histogram", s.final_fidelity_histogram},
  };
}

json to_json(const SupermartingaleResult& r) {
  return json{{"passes", r.passes},
              {"worst_violation_sigma", finite_or_null(r.worst_violation_sigma)},
              {"worst_index", r.worst_index}};
}

json to_json(const InvariantSetResult& r) {
  json basis = json::array();
  for (const auto& s : r.basis) basis.push_back(vector_to_json(s.amplitudes()));
  return json{{"lambda", r.lambda},
              {"dimension", r.dimension},
              {"basis", std::move(basis)},
              {"contains_target", r.contains_target},
              {"singular_values", r.singular_values}};
}

json to_json(const LambdaSweepResult& r) {
  json examples = json::array();
  for (const auto& e : r.examples) examples.push_back(to_json(e));
  return json{{"grids", r.grids},
              {"evaluated", r.evaluated},
              {"exhaustive", r.exhaustive},
              {"max_dimension", r.max_dimension},
              {"dimension_counts", r.dimension_counts},
              {"target_choice", to_json(r.target_choice)},
              {"examples", std::move(examples)}};
}

json to_json(const EscapeMatrix& r) {
  return json{{"matrix", matrix_to_json(r.matrix)},
              {"complement", matrix_to_json(r.complement)},
              {"rank", r.rank},
              {"full_rank", r.full_rank},
              {"singular_values", r.singular_values}};
}

json to_json(const StabilityReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"perturbation", row.perturbation},
                    {"V0", row.V0},
                    {"R", row.R},
                    {"nu", row.nu},
                    {"nu_effective", row.nu_effective},
                    {"empirical_P", row.empirical_P},
                    {"binomial_stderr", row.binomial_stderr},
                    {"bound", row.bound},
                    {"passes", row.passes}});
  }
  return json{{"rows", std::move(rows)},
              {"monotone", r.monotone},
              {"horizon", r.horizon},
              {"finite_horizon", true},
              {"passes", r.passes()}};
}

json to_json(const ProbeResult& r) {
  return json{{"initial_fidelity", r.initial_fidelity},
              {"mean_drift_V", r.mean_drift_V},
              {"stderr_drift_V", r.stderr_drift_V},
              {"mean_drift_distance", r.mean_drift_distance},
              {"stderr_drift_distance", r.stderr_drift_distance},
              {"mean_fidelity_gain", r.mean_fidelity_gain},
              {"stderr_fidelity_gain", r.stderr_fidelity_gain},
              {"stationary", r.stationary},
              {"escapes", r.escapes},
              {"completed", r.completed}};
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& rec, bool amplitudes) {
  const auto m = rec.controls_applied.rows();
  const Eigen::Index n = rec.states.empty() ? 0 : rec.states.front().dim();
  out << "t,V,fidelity,X_mean";
  for (Eigen::Index k = 0; k < m; ++k) out << ",u_" << (k + 1);
  if (amplitudes) {
    for (Eigen::Index j = 0; j < n; ++j) out << ",re_" << (j + 1) << ",im_" << (j + 1);
  }
  out << '\n';
  const std::size_t steps = rec.steps();
  for (std::size_t i = 0; i < rec.times.size(); ++i) {
    out << format_double(rec.times[i]) << ',' << format_double(rec.lyapunov[i]) << ','
        << format_double(rec.fidelity[i]) << ',' << format_double(rec.observable_mean[i]);
    for (Eigen::Index k = 0; k < m; ++k) {
      const double u = i < steps ? rec.controls_applied(k, static_cast<Eigen::Index>(i))
                                 : std::numeric_limits<double>::quiet_NaN();
      out << ',' << format_double(u);
    }
    if (amplitudes) {
      const CVector& psi = rec.states[i].amplitudes();
      for (Eigen::Index j = 0; j < n; ++j) {
        out << ',' << format_double(psi[j].real()) << ',' << format_double(psi[j].imag());
      }
    }
    out << '\n';
  }
}

}  // namespace qlyap
