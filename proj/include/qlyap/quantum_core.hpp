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

#include <optional>

#include "qlyap/types.hpp"

namespace qlyap {

/// <psi|X|psi>. The imaginary part of the raw quadratic form is checked to be
/// below 1e-10 and discarded.
double expectation_value(const QuantumState& state, const HermitianOperator& op);

/// min over real phi of || psi - e^{i phi} psi_f ||, closed form
/// sqrt(2 - 2 |<psi_f|psi>|). Lies in [0, sqrt(2)].
double equivalence_distance(const QuantumState& state, const EquivalenceClass& target);
double equivalence_distance(const QuantumState& state, const QuantumState& target);

/// lambda = <psi|A|psi> if || A psi - lambda psi || < tol.
std::optional<double> is_eigenstate(const QuantumState& state, const HermitianOperator& op,
                                    double tol);

/// psi1 = exp(i * epsilon * generator) psi2 with ||generator||_HS = 1.
struct ConnectingGenerator {
  double epsilon;
  HermitianOperator generator;
};

/// Builds the unitary that rotates psi2 onto psi1 inside span{psi2, psi1}
/// and acts as the identity on the orthogonal complement, then takes its
/// principal logarithm. Throws PreconditionError for equivalent inputs.
ConnectingGenerator connecting_generator(const QuantumState& psi1, const QuantumState& psi2);

/// Orthonormal basis of C^n whose first column is `first`; the rest come from
/// Gram-Schmidt over the standard basis, skipping near-dependent vectors.
CMatrix complete_basis(const CVector& first);

/// Throws StructuralError unless `a` and `b` have the same dimension.
void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what);

}  // namespace qlyap
