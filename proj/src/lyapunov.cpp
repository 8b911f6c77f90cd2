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

#include "qlyap/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qlyap/quantum_core.hpp"

namespace qlyap {

namespace {

// e^{i arg<psi|psi_f>} = conj(a)/|a| with a = <psi_f|psi>; 1 below phase_tol.
Complex feedback_phase(Complex a, double phase_tol) {
  const double mag = std::abs(a);
  if (mag < phase_tol) return 1.0;
  return std::conj(a) / mag;
}

void require_gain_count(const SystemModel& model, const ControlLaw& law, const char* what) {
  if (law.gains().size() != model.num_controls()) {
    throw StructuralError(std::string(what) + ": control law has " +
                          std::to_string(law.gains().size()) + " gains for " +
                          std::to_string(model.num_controls()) + " control Hamiltonians");
  }
}

}  // namespace

double lyapunov_value(const CVector& v, const CVector& target) {
  require_same_dim(v.size(), target.size(), "lyapunov_value");
  return 0.5 * (1.0 - std::norm(target.dot(v)));
}

double lyapunov_value(const QuantumState& state, const QuantumState& target) {
  const double v = lyapunov_value(state.amplitudes(), target.amplitudes());
  return std::clamp(v, 0.0, 0.5);
}

double nu_bound(double R) {
  if (!(R > 0.0 && R < 2.0)) throw PreconditionError("nu_bound: R must lie in (0, 2)");
  return R * R - R * R * R * R / 4.0;
}

double nu_effective(double R) {
  if (!(R > 0.0 && R < 2.0)) throw PreconditionError("nu_effective: R must lie in (0, 2)");
  const double max_overlap = std::max(0.0, 1.0 - R * R / 2.0);
  return 0.5 * (1.0 - max_overlap * max_overlap);
}

double DirectionalGradients::apply_grad(const CVector& delta) const {
  return -(grad_row * delta)(0).real();
}

double DirectionalGradients::apply_hessian(const CVector& delta) const {
  return delta.dot(hessian * delta).real();
}

DirectionalGradients directional_gradients(const QuantumState& state, const QuantumState& target) {
  require_same_dim(state.dim(), target.dim(), "directional_gradients");
  const CVector& f = target.amplitudes();
  const Complex psi_dot_f = state.amplitudes().dot(f);  // <psi|psi_f>
  return DirectionalGradients{psi_dot_f * f.adjoint(), -(f * f.adjoint())};
}

double exact_increment(const QuantumState& state, const CVector& delta,
                       const QuantumState& target) {
  require_same_dim(state.dim(), delta.size(), "exact_increment");
  require_same_dim(state.dim(), target.dim(), "exact_increment");
  const CVector& f = target.amplitudes();
  const Complex f_dot_delta = f.dot(delta);
  const Complex psi_dot_f = state.amplitudes().dot(f);
  return -(psi_dot_f * f_dot_delta).real() - 0.5 * std::norm(f_dot_delta);
}

std::vector<double> control_signals(const SystemModel& model, const ControlLaw& law,
                                    const QuantumState& state) {
  require_same_dim(state.dim(), model.dim(), "control_signals");
  require_gain_count(model, law, "control_signals");
  const CVector& psi = state.amplitudes();
  const CVector& f = model.target().amplitudes();
  const Complex phase = feedback_phase(f.dot(psi), law.phase_tol());
  std::vector<double> u(model.num_controls());
  for (std::size_t k = 0; k < u.size(); ++k) {
    const Complex coupling = f.dot(model.controls()[k].matrix() * psi);
    u[k] = law.gains()[k] * (phase * coupling).imag();
  }
  return u;
}

GeneratorTerms generator_LV_general(const SystemModel& model,
                                    const std::vector<double>& controls_now,
                                    const QuantumState& state) {
  require_same_dim(state.dim(), model.dim(), "generator_LV_general");
  const CVector& psi = state.amplitudes();
  const CVector& f = model.target().amplitudes();
  const Complex psi_dot_f = psi.dot(f);
  const double k = model.k_strength();

  const CMatrix h = model.hamiltonian(controls_now);
  const CMatrix& x = model.observable().matrix();
  const double mean_x = psi.dot(x * psi).real();
  const CVector centered = x * psi - mean_x * psi;
  const CVector centered_sq = x * centered - mean_x * centered;

  const Complex f_centered = f.dot(centered);
  const double hamiltonian_term = -(psi_dot_f * f.dot(h * psi)).imag() / model.hbar();
  const double measurement_term = k * (psi_dot_f * f.dot(centered_sq)).real();
  const double ito_term = -k * std::norm(f_centered);
  const double diffusion = -std::sqrt(2.0 * k) * (psi_dot_f * f_centered).real();
  return GeneratorTerms{hamiltonian_term + measurement_term + ito_term, diffusion};
}

double generator_LV_reduced(const SystemModel& model, const ControlLaw& law,
                            const QuantumState& state) {
  require_same_dim(state.dim(), model.dim(), "generator_LV_reduced");
  require_gain_count(model, law, "generator_LV_reduced");
  if (!is_eigenstate(model.target(), model.h0(), kAssumptionTolerance)) {
    throw PreconditionError(
        "generator_LV_reduced: assumption A2 fails (target is not an eigenket of H0)");
  }
  if (!is_eigenstate(model.target(), model.observable(), kAssumptionTolerance)) {
    throw PreconditionError(
        "generator_LV_reduced: assumption A4 fails (target is not an eigenket of X)");
  }
  const CVector& psi = state.amplitudes();
  const CVector& f = model.target().amplitudes();
  const Complex a = f.dot(psi);
  const Complex phase = feedback_phase(a, law.phase_tol());
  double sum = 0.0;
  for (std::size_t k = 0; k < model.num_controls(); ++k) {
    const double s = (phase * f.dot(model.controls()[k].matrix() * psi)).imag();
    sum += law.gains()[k] * s * s;
  }
  return -std::abs(a) * sum / model.hbar();
}

}  // namespace qlyap
