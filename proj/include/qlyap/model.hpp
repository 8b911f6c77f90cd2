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

#include <vector>

#include "qlyap/types.hpp"

namespace qlyap {

/// The controlled, continuously measured system
///   H(U) = H0 + sum_k u_k H_k,  observable X,  measurement strength k,
/// with the target state psi_f.
class SystemModel {
 public:
  SystemModel(HermitianOperator h0, std::vector<HermitianOperator> controls,
              HermitianOperator observable, double k_strength, double hbar, QuantumState target);

  const HermitianOperator& h0() const { return h0_; }
  const std::vector<HermitianOperator>& controls() const { return controls_; }
  const HermitianOperator& observable() const { return x_; }
  double k_strength() const { return k_; }
  double hbar() const { return hbar_; }
  const QuantumState& target() const { return target_; }

  Eigen::Index dim() const { return target_.dim(); }
  std::size_t num_controls() const { return controls_.size(); }

  /// H0 + sum_k u_k H_k. Throws StructuralError on a length mismatch.
  CMatrix hamiltonian(const std::vector<double>& controls_now) const;

  SystemModel with_target(QuantumState target) const;
  SystemModel with_controls(std::vector<HermitianOperator> controls) const;
  SystemModel with_measurement(HermitianOperator observable, double k_strength) const;

 private:
  HermitianOperator h0_;
  std::vector<HermitianOperator> controls_;
  HermitianOperator x_;
  double k_;
  double hbar_;
  QuantumState target_;
};

/// u_k = alpha_k Im(e^{i arg<psi|psi_f>} <psi_f|H_k|psi>), with the phase
/// factor taken as 1 when |<psi_f|psi>| < phase_tol.
class ControlLaw {
 public:
  static constexpr double kDefaultPhaseTol = 1e-12;

  /// Requires every gain > 0 and phase_tol > 0.
  explicit ControlLaw(std::vector<double> gains, double phase_tol = kDefaultPhaseTol);

  /// Skips the positivity check on the gains. Only meant for adversarial
  /// experiments (negated gains) that demonstrate the sign requirement.
  static ControlLaw unchecked(std::vector<double> gains, double phase_tol = kDefaultPhaseTol);

  /// alpha_k = 1 for all m controls.
  static ControlLaw unit_gains(std::size_t m);

  const std::vector<double>& gains() const { return gains_; }
  double phase_tol() const { return phase_tol_; }

 private:
  ControlLaw() = default;
  std::vector<double> gains_;
  double phase_tol_ = kDefaultPhaseTol;
};

}  // namespace qlyap
