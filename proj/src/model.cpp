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

#include "qlyap/model.hpp"

#include <cmath>
#include <string>

#include "qlyap/quantum_core.hpp"

namespace qlyap {

SystemModel::SystemModel(HermitianOperator h0, std::vector<HermitianOperator> controls,
                         HermitianOperator observable, double k_strength, double hbar,
                         QuantumState target)
    : h0_(std::move(h0)),
      controls_(std::move(controls)),
      x_(std::move(observable)),
      k_(k_strength),
      hbar_(hbar),
      target_(std::move(target)) {
  const Eigen::Index n = target_.dim();
  require_same_dim(h0_.dim(), n, "SystemModel H0");
  require_same_dim(x_.dim(), n, "SystemModel X");
  for (std::size_t k = 0; k < controls_.size(); ++k) {
    require_same_dim(controls_[k].dim(), n,
                     ("SystemModel controls[" + std::to_string(k) + "]").c_str());
  }
  if (!(k_ >= 0.0) || !std::isfinite(k_)) {
    throw PreconditionError("SystemModel: k_strength must be finite and >= 0");
  }
  if (!(hbar_ > 0.0) || !std::isfinite(hbar_)) {
    throw PreconditionError("SystemModel: hbar must be finite and > 0");
  }
}

CMatrix SystemModel::hamiltonian(const std::vector<double>& controls_now) const {
  if (controls_now.size() != controls_.size()) {
    throw StructuralError("SystemModel::hamiltonian: expected " + std::to_string(controls_.size()) +
                          " control values, got " + std::to_string(controls_now.size()));
  }
  CMatrix h = h0_.matrix();
  for (std::size_t k = 0; k < controls_.size(); ++k) h += controls_now[k] * controls_[k].matrix();
  return h;
}

SystemModel SystemModel::with_target(QuantumState target) const {
  return SystemModel(h0_, controls_, x_, k_, hbar_, std::move(target));
}

SystemModel SystemModel::with_controls(std::vector<HermitianOperator> controls) const {
  return SystemModel(h0_, std::move(controls), x_, k_, hbar_, target_);
}

SystemModel SystemModel::with_measurement(HermitianOperator observable, double k_strength) const {
  return SystemModel(h0_, controls_, std::move(observable), k_strength, hbar_, target_);
}

ControlLaw::ControlLaw(std::vector<double> gains, double phase_tol)
    : gains_(std::move(gains)), phase_tol_(phase_tol) {
  for (std::size_t k = 0; k < gains_.size(); ++k) {
    if (!(gains_[k] > 0.0) || !std::isfinite(gains_[k])) {
      throw PreconditionError("ControlLaw: gain " + std::to_string(k) + " must be positive");
    }
  }
  if (!(phase_tol_ > 0.0)) throw PreconditionError("ControlLaw: phase_tol must be positive");
}

ControlLaw ControlLaw::unchecked(std::vector<double> gains, double phase_tol) {
  ControlLaw law;
  law.gains_ = std::move(gains);
  law.phase_tol_ = phase_tol;
  return law;
}

ControlLaw ControlLaw::unit_gains(std::size_t m) { return ControlLaw(std::vector<double>(m, 1.0)); }

}  // namespace qlyap
