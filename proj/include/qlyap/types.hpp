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

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qlyap {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Operand shapes do not agree (dimension mismatch, wrong list length).
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An operation was called outside its stated domain.
class PreconditionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The Euler-Maruyama update collapsed (norm too small); dt is too large.
class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A pure state of an n-level system: a unit vector in C^n, n >= 2.
///
/// The norm is checked on construction; `normalized` rescales arbitrary
/// nonzero input instead.
class QuantumState {
 public:
  static constexpr double kNormTolerance = 1e-9;

  explicit QuantumState(CVector amplitudes);

  static QuantumState normalized(const CVector& v);
  /// Standard basis ket |j>, zero-based.
  static QuantumState basis(Eigen::Index n, Eigen::Index j);

  const CVector& amplitudes() const { return amps_; }
  Eigen::Index dim() const { return amps_.size(); }
  Complex operator[](Eigen::Index i) const { return amps_[i]; }

  /// e^{i phi} |psi>
  QuantumState with_phase(double phi) const;

 private:
  CVector amps_;
};

/// Eigenvalues in ascending order; eigenvectors as columns with the first
/// nonzero component made real and positive.
struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;
  CMatrix eigenvectors;
};

/// Self-adjoint n x n complex matrix (Hamiltonian or observable).
class HermitianOperator {
 public:
  static constexpr double kHermitianTolerance = 1e-12;
  static constexpr double kTraceTolerance = 1e-12;

  /// Throws PreconditionError if the matrix is not square or not Hermitian.
  explicit HermitianOperator(CMatrix entries);

  /// Hermitian and traceless (iH in su(n)); throws PreconditionError otherwise.
  static HermitianOperator traceless(CMatrix entries);

  const CMatrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

  /// Largest |A - A^H| entry.
  double hermiticity_defect() const;
  bool is_traceless(double tol = kTraceTolerance) const;

  SpectralDecomposition spectrum() const;

 private:
  CMatrix m_;
};

/// [|psi>]: all global-phase multiples of a representative.
class EquivalenceClass {
 public:
  explicit EquivalenceClass(QuantumState representative) : rep_(std::move(representative)) {}

  const QuantumState& representative() const { return rep_; }
  bool contains(const QuantumState& state, double tol = 1e-9) const;

 private:
  QuantumState rep_;
};

/// Rotates phases so the first component with modulus above `tol` is real
/// and positive.
void fix_phase(CVector& v, double tol = 1e-12);

}  // namespace qlyap
