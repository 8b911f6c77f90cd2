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

#include "qlyap/model.hpp"
#include "qlyap/types.hpp"

namespace qlyap {

/// V(psi) = (1 - |<psi_f|psi>|^2) / 2, in [0, 1/2]; zero exactly on [psi_f].
double lyapunov_value(const QuantumState& state, const QuantumState& target);

/// The same formula on arbitrary (not necessarily normalized) vectors.
double lyapunov_value(const CVector& v, const CVector& target);

/// R^2 - R^4/4 for 0 < R < 2, the constant used in the stability bound.
double nu_bound(double R);

/// Tight lower bound of V over states at equivalence distance >= R:
/// |<psi_f|psi>| <= 1 - R^2/2 gives V >= (1 - (1 - R^2/2)^2) / 2, which is
/// nu_bound(R) / 2 for R <= sqrt(2). Beyond sqrt(2) no state qualifies and the
/// value saturates at 1/2.
double nu_effective(double R);

/// First and second directional gradients of V at psi:
///   grad:    |d> -> -Re(<psi|psi_f><psi_f|d>)
///   hessian: -|psi_f><psi_f|
struct DirectionalGradients {
  /// Row vector r with grad(d) = -Re(r d); r = <psi|psi_f> <psi_f|.
  Eigen::RowVectorXcd grad_row;
  CMatrix hessian;

  double apply_grad(const CVector& delta) const;
  /// <d| hessian |d>, real for the Hermitian hessian.
  double apply_hessian(const CVector& delta) const;
};

DirectionalGradients directional_gradients(const QuantumState& state, const QuantumState& target);

/// grad(d) + hessian(d)/2 = -Re(<psi|psi_f><psi_f|d>) - |<psi_f|d>|^2 / 2.
/// Equals V(psi + d) - V(psi) exactly for every d.
double exact_increment(const QuantumState& state, const CVector& delta, const QuantumState& target);

/// Feedback signals u_k (length m).
std::vector<double> control_signals(const SystemModel& model, const ControlLaw& law,
                                    const QuantumState& state);

/// Coefficients of dV = drift dt + diffusion dW for the controlled SSE.
struct GeneratorTerms {
  double drift;      ///< LV
  double diffusion;  ///< dW coefficient
};

/// General generator, valid for any model and any held controls.
GeneratorTerms generator_LV_general(const SystemModel& model,
                                    const std::vector<double>& controls_now,
                                    const QuantumState& state);

/// -(1/hbar) sum_k alpha_k |<psi|psi_f>| (Im(e^{i arg<psi|psi_f>} <psi_f|H_k|psi>))^2.
/// Only valid when psi_f is an eigenket of H0 and X; throws PreconditionError
/// naming the failed assumption otherwise.
double generator_LV_reduced(const SystemModel& model, const ControlLaw& law,
                            const QuantumState& state);

/// Tolerance used when checking that psi_f is an eigenket of H0 and X.
inline constexpr double kAssumptionTolerance = 1e-9;

}  // namespace qlyap
