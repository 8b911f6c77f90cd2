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
#include <vector>

#include "qlyap/kernels.hpp"
#include "qlyap/model.hpp"
#include "qlyap/rng.hpp"
#include "qlyap/types.hpp"

namespace qlyap {

/// f(psi) = (-(i/hbar) H(U) - k (X - <X>)^2) psi, with <X> taken on psi.
CVector drift(const SystemModel& model, const std::vector<double>& controls_now,
              const QuantumState& state);

/// g(psi) = sqrt(2k) (X - <X>) psi. <psi|g(psi)> = 0.
CVector diffusion(const SystemModel& model, const QuantumState& state);

/// Euler-Maruyama step of the closed-loop SSE on the dispatched kernels.
///
/// The feedback u_k is evaluated on the pre-step state and held over the
/// step; the result is renormalized. The stepper owns scratch buffers, so one
/// instance must not be shared between threads.
class EulerMaruyamaStepper {
 public:
  static constexpr double kMinNorm = 1e-6;

  EulerMaruyamaStepper(const SystemModel& model, const ControlLaw& law,
                       const kernels::KernelTable& kernels = kernels::active());

  /// Advances `psi` (unit norm, length n) in place and writes the held
  /// controls to `controls_out` (length m, may be null when m == 0).
  void step(CVector& psi, double dt, double dW, double* controls_out);

  std::size_t dim() const { return n_; }
  std::size_t num_controls() const { return m_; }
  const kernels::KernelTable& kernels() const { return *kt_; }

 private:
  const kernels::KernelTable* kt_;
  std::size_t n_;
  std::size_t m_;
  double k_;
  double hbar_;
  double phase_tol_;
  std::vector<double> gains_;
  CMatrix h0_;
  std::vector<CMatrix> controls_;
  CMatrix x_;
  CVector target_;
  std::vector<CVector> couplings_;  // H_k psi_f
  bool measured_;
  CMatrix hu_;
  CVector hpsi_, xpsi_, centered_, centered_sq_, next_;
};

/// normalize(state + drift dt + diffusion dW) under the law's feedback.
/// Throws PreconditionError for dt <= 0 and IntegrationError when the
/// pre-normalization norm falls below 1e-6.
QuantumState em_step(const SystemModel& model, const ControlLaw& law, const QuantumState& state,
                     double dt, double dW);

/// One sample path, recorded at every step.
struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<QuantumState> states;
  std::vector<double> lyapunov;
  std::vector<double> fidelity;         ///< |<psi_f|psi>|^2
  std::vector<double> observable_mean;  ///< <X>
  Eigen::MatrixXd controls_applied;     ///< m x steps; column i held over [t_i, t_{i+1})
  std::vector<double> dW;
  std::uint64_t seed = 0;
  double dt = 0.0;

  std::size_t steps() const { return dW.size(); }
};

/// Number of steps for (dt, t_final): round(t_final / dt). Throws
/// PreconditionError for dt <= 0 or t_final < 0.
std::size_t step_count(double dt, double t_final);

TrajectoryRecord simulate_trajectory(const SystemModel& model, const ControlLaw& law,
                                     const QuantumState& psi0, double dt, double t_final,
                                     std::uint64_t seed);

/// Same as simulate_trajectory but driven by explicit increments.
TrajectoryRecord simulate_path(const SystemModel& model, const ControlLaw& law,
                               const QuantumState& psi0, const WienerPath& path);

}  // namespace qlyap
