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

#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "qlyap/model.hpp"
#include "qlyap/monte_carlo.hpp"
#include "qlyap/sse.hpp"
#include "qlyap/structural.hpp"

namespace qlyap {

/// The input is not well-formed JSON, or the file cannot be read.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The input parsed but violates a model invariant. The message starts with
/// the offending field, e.g. "controls[1][0][2]: ...".
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunParams {
  double dt = 1e-3;
  double t_final = 10.0;
  std::size_t trials = 2000;
  std::uint64_t seed = 0;
  std::vector<double> R_list{0.3, 0.5, 1.0};
  double t_probe = 0.5;
  std::vector<double> perturbation_sizes{0.3, 0.1, 0.03};
};

struct SystemDefinition {
  SystemModel model;
  ControlLaw law;
  QuantumState psi0;
  RunParams params;
};

SystemDefinition parse_definition(const std::filesystem::path& path);
SystemDefinition parse_definition_text(const std::string& text);
SystemDefinition parse_definition_json(const nlohmann::json& doc);

/// Inverse of parse_definition_json; numbers keep full double precision.
nlohmann::json to_json(const SystemDefinition& def);

nlohmann::json to_json(const AssumptionReport& report);
nlohmann::json to_json(const EnsembleSummary& summary);
nlohmann::json to_json(const SupermartingaleResult& result);
nlohmann::json to_json(const InvariantSetResult& result);
nlohmann::json to_json(const LambdaSweepResult& result);
nlohmann::json to_json(const EscapeMatrix& result);
nlohmann::json to_json(const StabilityReport& report);
nlohmann::json to_json(const ProbeResult& result);

nlohmann::json complex_to_json(Complex z);
nlohmann::json matrix_to_json(const CMatrix& m);
nlohmann::json vector_to_json(const CVector& v);

/// 17 significant digits (%.17g), exact for every finite double. NaN prints
/// as "nan".
std::string format_double(double x);

/// t, V, fidelity, X_mean, u_1..u_m, then re_1, im_1, ..., re_n, im_n when
/// `amplitudes` is set. u_k on row i is the control held over [t_i, t_{i+1});
/// the last row has none and prints nan.
void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& record, bool amplitudes);

}  // namespace qlyap
