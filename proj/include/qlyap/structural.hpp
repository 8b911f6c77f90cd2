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
#include <optional>
#include <vector>

#include "qlyap/model.hpp"
#include "qlyap/types.hpp"

namespace qlyap {

/// Static checks of the standing assumptions on (H0, {H_k}, X, psi_f).
struct AssumptionReport {
  struct EigenketOfH0 {  // A2
    bool holds = false;
    std::optional<double> lambda_Hf;
    int degeneracy = 0;  ///< multiplicity of lambda_Hf in the spectrum of H0
  };
  struct ControllableCoupling {  // A3
    bool holds = false;
    std::vector<std::size_t> witnesses;  ///< controls without psi_f as eigenket
  };
  struct EigenketOfX {  // A4
    bool holds = false;
    std::optional<double> lambda_Xf;
  };
  struct Independence {  // A5
    bool holds = false;
    int rank = 0;  ///< real rank of {H0, H_1, ..., H_m}
    std::size_t num_controls = 0;
    bool no_control_has_target_eigenket = false;
    std::vector<double> singular_values;
    std::vector<QuantumState> common_eigenkets;
  };

  EigenketOfH0 a2;
  ControllableCoupling a3;
  EigenketOfX a4;
  Independence a5;

  bool all_hold() const { return a2.holds && a3.holds && a4.holds && a5.holds; }
};

AssumptionReport check_assumptions(const SystemModel& model, double tol = 1e-9);

/// True iff {H_k - lambda_k I} is linearly independent (singular values above
/// 1e-9 times the largest). Throws StructuralError if lambda.size() != m.
bool lemma5_independence(const SystemModel& model, const std::vector<double>& lambda);

/// A maximal independent set of unit vectors, each an eigenket of at least two
/// of the operators, found by intersecting eigenspaces pairwise.
/// Throws PreconditionError for fewer than two operators.
std::vector<QuantumState> common_eigenkets(const std::vector<HermitianOperator>& ops,
                                           double tol = 1e-9);

/// Solutions of <psi_f|(H_k - lambda_k I)|psi> = 0 for all k.
struct InvariantSetResult {
  std::vector<double> lambda;
  int dimension = 0;
  std::vector<QuantumState> basis;  ///< orthonormal
  bool contains_target = false;
  std::vector<double> singular_values;  ///< of the m x n constraint matrix, descending
};

InvariantSetResult invariant_set_B(const SystemModel& model, const std::vector<double>& lambda,
                                   double tol = 1e-9);

/// lambda_k = <psi_f|H_k|psi_f>, the choice for which psi_f itself solves
/// the constraints.
std::vector<double> target_lambda(const SystemModel& model);

struct LambdaSweepOptions {
  int grid_points = 50;
  std::size_t max_combinations = 200000;  ///< beyond this, sample combinations
  std::size_t sampled_combinations = 10000;
  std::uint64_t seed = 0;
  double tol = 1e-9;
  std::size_t keep_examples = 8;
};

struct LambdaSweepResult {
  std::vector<std::vector<double>> grids;  ///< candidate values per k
  std::size_t evaluated = 0;
  bool exhaustive = true;
  int max_dimension = 0;
  std::vector<std::size_t> dimension_counts;  ///< index = dimension
  InvariantSetResult target_choice;
  std::vector<InvariantSetResult> examples;  ///< largest-dimension results first
};

/// Per-k grid over [lambda_min(H_k) - 1, lambda_max(H_k) + 1] plus the exact
/// eigenvalues of H_k; the Cartesian product when small, a seeded sample of it
/// otherwise.
LambdaSweepResult lambda_sweep(const SystemModel& model, const LambdaSweepOptions& options = {});

/// c_kj = <psi_f|H_k|j> over an orthonormal basis {|j>} of [psi_f]^perp.
struct EscapeMatrix {
  CMatrix matrix;      ///< m x (n-1)
  CMatrix complement;  ///< n x (n-1), the basis used
  int rank = 0;
  bool full_rank = false;  ///< no nonzero psi in [psi_f]^perp annihilates every row
  std::vector<double> singular_values;
};

/// Uses the Gram-Schmidt completion of psi_f over the standard basis.
/// Throws PreconditionError if psi_f is not an eigenket of H0.
EscapeMatrix escape_matrix(const SystemModel& model);
EscapeMatrix escape_matrix_in_basis(const SystemModel& model, const CMatrix& complement);

/// d/dt E[<psi_f|psi(t)>] at psi in [psi_f]^perp under the feedback law:
/// (-i/hbar) sum_k u_k c_k with c_k = <psi_f|H_k|psi> and u_k the control
/// signals, which reduce to alpha_k Im(c_k) when <psi_f|psi> is below the
/// law's phase tolerance.
/// Throws PreconditionError unless |<psi_f|psi>| <= 1e-10.
Complex expected_escape_increment(const SystemModel& model, const ControlLaw& law,
                                  const QuantumState& state);

/// Numerical rank with singular values above tol * max(sigma_max, 1).
int numerical_rank(const Eigen::VectorXd& singular_values, double tol);

}  // namespace qlyap
