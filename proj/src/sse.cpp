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

#include "qlyap/sse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qlyap/lyapunov.hpp"
#include "qlyap/quantum_core.hpp"

namespace qlyap {

CVector drift(const SystemModel& model, const std::vector<double>& controls_now,
              const QuantumState& state) {
  require_same_dim(state.dim(), model.dim(), "drift");
  const CVector& psi = state.amplitudes();
  const CMatrix& x = model.observable().matrix();
  const double mean_x = psi.dot(x * psi).real();
  const CVector centered = x * psi - mean_x * psi;
  const CVector centered_sq = x * centered - mean_x * centered;
  const Complex minus_i_over_hbar(0.0, -1.0 / model.hbar());
  return minus_i_over_hbar * (model.hamiltonian(controls_now) * psi) -
         model.k_strength() * centered_sq;
}

CVector diffusion(const SystemModel& model, const QuantumState& state) {
  require_same_dim(state.dim(), model.dim(), "diffusion");
  const CVector& psi = state.amplitudes();
  const CMatrix& x = model.observable().matrix();
  const double mean_x = psi.dot(x * psi).real();
  return std::sqrt(2.0 * model.k_strength()) * (x * psi - mean_x * psi);
}

EulerMaruyamaStepper::EulerMaruyamaStepper(const SystemModel& model, const ControlLaw& law,
                                           const kernels::KernelTable& kernels)
    : kt_(&kernels),
      n_(static_cast<std::size_t>(model.dim())),
      m_(model.num_controls()),
      k_(model.k_strength()),
      hbar_(model.hbar()),
      phase_tol_(law.phase_tol()),
      gains_(law.gains()),
      h0_(model.h0().matrix()),
      x_(model.observable().matrix()),
      target_(model.target().amplitudes()),
      measured_(model.k_strength() > 0.0) {
  if (gains_.size() != m_) {
    throw StructuralError("EulerMaruyamaStepper: control law has " + std::to_string(gains_.size()) +
                          " gains for " + std::to_string(m_) + " control Hamiltonians");
  }
  controls_.reserve(m_);
  couplings_.reserve(m_);
  for (const auto& hk : model.controls()) {
    controls_.push_back(hk.matrix());
    couplings_.push_back(hk.matrix() * target_);
  }
  const auto n = static_cast<Eigen::Index>(n_);
  hu_ = h0_;
  hpsi_.resize(n);
  xpsi_.resize(n);
  centered_.resize(n);
  centered_sq_.resize(n);
  next_.resize(n);
}

void EulerMaruyamaStepper::step(CVector& psi, double dt, double dW, double* controls_out) {
  if (static_cast<std::size_t>(psi.size()) != n_) {
    throw StructuralError("EulerMaruyamaStepper::step: state has dimension " +
                          std::to_string(psi.size()) + ", model has " + std::to_string(n_));
  }
  const kernels::KernelTable& kt = *kt_;
  const std::size_t n = n_;
  const Complex* p = psi.data();

  // Feedback on the pre-step state.
  const CMatrix* hamiltonian = &h0_;
  if (m_ > 0) {
    const Complex overlap = kt.dotc(n, target_.data(), p);
    const double mag = std::abs(overlap);
    const Complex phase = mag < phase_tol_ ? Complex(1.0) : std::conj(overlap) / mag;
    std::copy(h0_.data(), h0_.data() + n * n, hu_.data());
    for (std::size_t k = 0; k < m_; ++k) {
      const Complex coupling = kt.dotc(n, couplings_[k].data(), p);
      const double u = gains_[k] * (phase * coupling).imag();
      if (controls_out) controls_out[k] = u;
      kt.axpy(n * n, Complex(u), controls_[k].data(), hu_.data());
    }
    hamiltonian = &hu_;
  }
  kt.matvec(n, hamiltonian->data(), p, hpsi_.data());

  std::copy(p, p + n, next_.data());
  kt.axpy(n, Complex(0.0, -dt / hbar_), hpsi_.data(), next_.data());

  if (measured_) {
    kt.matvec(n, x_.data(), p, xpsi_.data());
    const double mean_x = kt.dotc(n, p, xpsi_.data()).real();
    std::copy(xpsi_.data(), xpsi_.data() + n, centered_.data());
    kt.axpy(n, Complex(-mean_x), p, centered_.data());
    kt.matvec(n, x_.data(), centered_.data(), centered_sq_.data());
    kt.axpy(n, Complex(-mean_x), centered_.data(), centered_sq_.data());

    kt.axpy(n, Complex(-k_ * dt), centered_sq_.data(), next_.data());
    kt.axpy(n, Complex(std::sqrt(2.0 * k_) * dW), centered_.data(), next_.data());
  }

  const double norm = std::sqrt(kt.dotc(n, next_.data(), next_.data()).real());
  if (!(norm >= kMinNorm) || !std::isfinite(norm)) {
    throw IntegrationError("em_step: state norm collapsed to " + std::to_string(norm) +
                           " before renormalization; reduce dt");
  }
  kt.scale(n, 1.0 / norm, next_.data());
  psi.swap(next_);
}

QuantumState em_step(const SystemModel& model, const ControlLaw& law, const QuantumState& state,
                     double dt, double dW) {
  if (!(dt > 0.0)) throw PreconditionError("em_step: dt must be positive");
  require_same_dim(state.dim(), model.dim(), "em_step");
  EulerMaruyamaStepper stepper(model, law);
  CVector psi = state.amplitudes();
  std::vector<double> u(model.num_controls());
  stepper.step(psi, dt, dW, u.data());
  return QuantumState(std::move(psi));
}

std::size_t step_count(double dt, double t_final) {
  if (!(dt > 0.0)) throw PreconditionError("dt must be positive");
  if (!(t_final >= 0.0) || !std::isfinite(t_final)) {
    throw PreconditionError("t_final must be finite and >= 0");
  }
  return static_cast<std::size_t>(std::llround(t_final / dt));
}

namespace {

void record_point(TrajectoryRecord& rec, const SystemModel& model, double t, const CVector& psi) {
  QuantumState state(psi);
  const double fid = std::norm(model.target().amplitudes().dot(psi));
  rec.times.push_back(t);
  rec.fidelity.push_back(fid);
  rec.lyapunov.push_back(lyapunov_value(state, model.target()));
  rec.observable_mean.push_back(psi.dot(model.observable().matrix() * psi).real());
  rec.states.push_back(std::move(state));
}

TrajectoryRecord integrate(const SystemModel& model, const ControlLaw& law,
                           const QuantumState& psi0, double dt, std::vector<double> increments,
                           std::uint64_t seed) {
  require_same_dim(psi0.dim(), model.dim(), "simulate_trajectory");
  const std::size_t steps = increments.size();
  TrajectoryRecord rec;
  rec.seed = seed;
  rec.dt = dt;
  rec.times.reserve(steps + 1);
  rec.states.reserve(steps + 1);
  rec.lyapunov.reserve(steps + 1);
  rec.fidelity.reserve(steps + 1);
  rec.observable_mean.reserve(steps + 1);
  rec.controls_applied = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(model.num_controls()),
                                               static_cast<Eigen::Index>(steps));

  EulerMaruyamaStepper stepper(model, law);
  CVector psi = psi0.amplitudes();
  record_point(rec, model, 0.0, psi);
  for (std::size_t i = 0; i < steps; ++i) {
    double* u = model.num_controls() > 0
                    ? rec.controls_applied.col(static_cast<Eigen::Index>(i)).data()
                    : nullptr;
    stepper.step(psi, dt, increments[i], u);
    record_point(rec, model, static_cast<double>(i + 1) * dt, psi);
  }
  rec.dW = std::move(increments);
  return rec;
}

}  // namespace

TrajectoryRecord simulate_trajectory(const SystemModel& model, const ControlLaw& law,
                                     const QuantumState& psi0, double dt, double t_final,
                                     std::uint64_t seed) {
  const std::size_t steps = step_count(dt, t_final);
  WienerPath path = WienerPath::generate(seed, dt, steps);
  return integrate(model, law, psi0, dt, std::move(path.increments), seed);
}

TrajectoryRecord simulate_path(const SystemModel& model, const ControlLaw& law,
                               const QuantumState& psi0, const WienerPath& path) {
  if (!(path.dt > 0.0)) throw PreconditionError("simulate_path: dt must be positive");
  return integrate(model, law, psi0, path.dt, path.increments, path.seed);
}

}  // namespace qlyap
