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

#include "qlyap/quantum_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qlyap {

QuantumState::QuantumState(CVector amplitudes) : amps_(std::move(amplitudes)) {
  if (amps_.size() < 2) {
    throw PreconditionError("QuantumState: dimension must be >= 2, got " +
                            std::to_string(amps_.size()));
  }
  const double norm = amps_.norm();
  if (!std::isfinite(norm) || std::abs(norm - 1.0) > kNormTolerance) {
    throw PreconditionError("QuantumState: amplitudes must have unit norm, got " +
                            std::to_string(norm));
  }
}

QuantumState QuantumState::normalized(const CVector& v) {
  const double norm = v.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw PreconditionError("QuantumState::normalized: zero or non-finite vector");
  }
  return QuantumState(v / norm);
}

QuantumState QuantumState::basis(Eigen::Index n, Eigen::Index j) {
  if (j < 0 || j >= n) throw StructuralError("QuantumState::basis: index out of range");
  CVector v = CVector::Zero(n);
  v[j] = 1.0;
  return QuantumState(std::move(v));
}

QuantumState QuantumState::with_phase(double phi) const {
  return QuantumState(amps_ * std::polar(1.0, phi));
}

HermitianOperator::HermitianOperator(CMatrix entries) : m_(std::move(entries)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0) {
    throw PreconditionError("HermitianOperator: matrix must be square and non-empty");
  }
  const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
  if (!(hermiticity_defect() <= kHermitianTolerance * scale)) {
    throw PreconditionError("HermitianOperator: matrix is not Hermitian (defect " +
                            std::to_string(hermiticity_defect()) + ")");
  }
}

HermitianOperator HermitianOperator::traceless(CMatrix entries) {
  HermitianOperator op(std::move(entries));
  if (!op.is_traceless()) {
    throw PreconditionError("HermitianOperator: Hamiltonian must be traceless");
  }
  return op;
}

double HermitianOperator::hermiticity_defect() const {
  return (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
}

bool HermitianOperator::is_traceless(double tol) const {
  return std::abs(m_.trace()) <= tol * std::max(1.0, m_.cwiseAbs().maxCoeff());
}

SpectralDecomposition HermitianOperator::spectrum() const {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(m_);
  SpectralDecomposition out{solver.eigenvalues(), solver.eigenvectors()};
  for (Eigen::Index j = 0; j < out.eigenvectors.cols(); ++j) {
    CVector col = out.eigenvectors.col(j);
    fix_phase(col);
    out.eigenvectors.col(j) = col;
  }
  return out;
}

bool EquivalenceClass::contains(const QuantumState& state, double tol) const {
  return equivalence_distance(state, rep_) < tol;
}

void fix_phase(CVector& v, double tol) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v[i]);
    if (mag > tol) {
      v *= std::conj(v[i]) / mag;
      v[i] = mag;
      return;
    }
  }
}

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    throw StructuralError(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                          " vs " + std::to_string(b) + ")");
  }
}

double expectation_value(const QuantumState& state, const HermitianOperator& op) {
  require_same_dim(state.dim(), op.dim(), "expectation_value");
  const CVector& psi = state.amplitudes();
  const Complex z = psi.dot(op.matrix() * psi);
  if (std::abs(z.imag()) >= 1e-10 * std::max(1.0, std::abs(z))) {
    throw std::logic_error("expectation_value: quadratic form has imaginary part " +
                           std::to_string(z.imag()));
  }
  return z.real();
}

double equivalence_distance(const QuantumState& state, const QuantumState& target) {
  require_same_dim(state.dim(), target.dim(), "equivalence_distance");
  const double overlap = std::abs(target.amplitudes().dot(state.amplitudes()));
  return std::sqrt(std::max(0.0, 2.0 - 2.0 * overlap));
}

double equivalence_distance(const QuantumState& state, const EquivalenceClass& target) {
  return equivalence_distance(state, target.representative());
}

std::optional<double> is_eigenstate(const QuantumState& state, const HermitianOperator& op,
                                    double tol) {
  if (!(tol > 0.0)) throw PreconditionError("is_eigenstate: tol must be positive");
  require_same_dim(state.dim(), op.dim(), "is_eigenstate");
  const CVector& psi = state.amplitudes();
  const CVector a_psi = op.matrix() * psi;
  const double lambda = psi.dot(a_psi).real();
  if ((a_psi - lambda * psi).norm() < tol) return lambda;
  return std::nullopt;
}

ConnectingGenerator connecting_generator(const QuantumState& psi1, const QuantumState& psi2) {
  require_same_dim(psi1.dim(), psi2.dim(), "connecting_generator");
  if (equivalence_distance(psi1, psi2) <= 1e-8) {
    throw PreconditionError("connecting_generator: states are equivalent (same phase class)");
  }
  const CVector& from = psi2.amplitudes();
  const CVector& to = psi1.amplitudes();
  const Eigen::Index n = from.size();

  // to = a * from + b * e2 with b > 0 real.
  const Complex a = from.dot(to);
  const CVector residual = to - a * from;
  const double b = residual.norm();
  CMatrix plane(n, 2);
  plane.col(0) = from;
  plane.col(1) = residual / b;

  // In-plane unitary [[a, -b], [b, conj(a)]] = cos(t) I + i sin(t) M with
  // M Hermitian, traceless, M^2 = I; its principal log is i t M.
  const double sin_t = std::hypot(a.imag(), b);
  const double theta = std::atan2(sin_t, a.real());
  Eigen::Matrix2cd m;
  m << Complex(a.imag() / sin_t, 0.0), Complex(0.0, b / sin_t), Complex(0.0, -b / sin_t),
      Complex(-a.imag() / sin_t, 0.0);

  CMatrix unit_generator = plane * m * plane.adjoint() / std::sqrt(2.0);
  // Drop the rounding-level skew part.
  unit_generator = 0.5 * (unit_generator + unit_generator.adjoint()).eval();
  return ConnectingGenerator{theta * std::sqrt(2.0), HermitianOperator(std::move(unit_generator))};
}

CMatrix complete_basis(const CVector& first) {
  const Eigen::Index n = first.size();
  CMatrix basis(n, n);
  basis.col(0) = first / first.norm();
  Eigen::Index filled = 1;
  for (Eigen::Index j = 0; j < n && filled < n; ++j) {
    CVector v = CVector::Zero(n);
    v[j] = 1.0;
    // Two passes of modified Gram-Schmidt.
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index c = 0; c < filled; ++c) {
        v -= basis.col(c).dot(v) * basis.col(c);
      }
    }
    const double norm = v.norm();
    if (norm > 1e-6) {
      basis.col(filled++) = v / norm;
    }
  }
  return basis;
}

}  // namespace qlyap
