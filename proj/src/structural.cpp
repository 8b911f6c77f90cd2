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

#include "qlyap/structural.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "parallel.hpp"
#include "qlyap/lyapunov.hpp"
#include "qlyap/quantum_core.hpp"
#include "qlyap/rng.hpp"

namespace qlyap {

namespace {

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

double spectral_radius(const HermitianOperator& op) {
  const Eigen::VectorXd ev = op.spectrum().eigenvalues;
  return ev.size() == 0 ? 0.0 : std::max(std::abs(ev[0]), std::abs(ev[ev.size() - 1]));
}

double cluster_gap(double radius) { return 1e-8 * std::max(radius, 1.0); }

// Real 2n^2 vectorization: real parts then imaginary parts.
Eigen::VectorXd real_vec(const CMatrix& m) {
  const Eigen::Index sz = m.size();
  Eigen::VectorXd out(2 * sz);
  for (Eigen::Index i = 0; i < sz; ++i) {
    out[i] = m.data()[i].real();
    out[sz + i] = m.data()[i].imag();
  }
  return out;
}

int relative_rank(const Eigen::VectorXd& sv, double rel_tol) {
  if (sv.size() == 0 || !(sv[0] > 0.0)) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv[i] > rel_tol * sv[0]) ++r;
  }
  return r;
}

// Eigenspaces of `op` as column blocks, eigenvalues clustered within the gap.
std::vector<CMatrix> eigenspaces(const HermitianOperator& op) {
  const SpectralDecomposition sd = op.spectrum();
  const Eigen::Index n = sd.eigenvalues.size();
  const double gap = cluster_gap(spectral_radius(op));
  std::vector<CMatrix> out;
  Eigen::Index start = 0;
  for (Eigen::Index i = 1; i <= n; ++i) {
    if (i == n || sd.eigenvalues[i] - sd.eigenvalues[i - 1] > gap) {
      out.push_back(sd.eigenvectors.middleCols(start, i - start));
      start = i;
    }
  }
  return out;
}

void require_lambda_count(const SystemModel& model, const std::vector<double>& lambda,
                          const char* what) {
  if (lambda.size() != model.num_controls()) {
    throw StructuralError(std::string(what) + ": lambda has " + std::to_string(lambda.size()) +
                          " entries for " + std::to_string(model.num_controls()) +
                          " control Hamiltonians");
  }
}

}  // namespace

int numerical_rank(const Eigen::VectorXd& singular_values, double tol) {
  const double top = singular_values.size() == 0 ? 0.0 : singular_values.maxCoeff();
  const double threshold = tol * std::max(top, 1.0);
  int r = 0;
  for (Eigen::Index i = 0; i < singular_values.size(); ++i) {
    if (singular_values[i] > threshold) ++r;
  }
  return r;
}

AssumptionReport check_assumptions(const SystemModel& model, double tol) {
  if (!(tol > 0.0)) throw PreconditionError("check_assumptions: tol must be positive");
  const QuantumState& f = model.target();
  const Eigen::Index n = model.dim();
  const std::size_t m = model.num_controls();
  AssumptionReport rep;

  rep.a2.lambda_Hf = is_eigenstate(f, model.h0(), tol);
  rep.a2.holds = rep.a2.lambda_Hf.has_value();
  if (rep.a2.holds) {
    const Eigen::VectorXd ev = model.h0().spectrum().eigenvalues;
    const double gap = cluster_gap(spectral_radius(model.h0()));
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      if (std::abs(ev[i] - *rep.a2.lambda_Hf) <= gap) ++rep.a2.degeneracy;
    }
    rep.a2.degeneracy = std::max(rep.a2.degeneracy, 1);
  }

  for (std::size_t k = 0; k < m; ++k) {
    if (!is_eigenstate(f, model.controls()[k], tol)) rep.a3.witnesses.push_back(k);
  }
  rep.a3.holds = !rep.a3.witnesses.empty();

  rep.a4.lambda_Xf = is_eigenstate(f, model.observable(), tol);
  rep.a4.holds = rep.a4.lambda_Xf.has_value();

  Eigen::MatrixXd stacked(2 * n * n, static_cast<Eigen::Index>(m + 1));
  stacked.col(0) = real_vec(model.h0().matrix());
  for (std::size_t k = 0; k < m; ++k) {
    stacked.col(static_cast<Eigen::Index>(k + 1)) = real_vec(model.controls()[k].matrix());
  }
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(stacked).singularValues();
  rep.a5.singular_values = to_std(sv);
  rep.a5.rank = relative_rank(sv, tol);
  rep.a5.num_controls = m;
  rep.a5.no_control_has_target_eigenket = rep.a3.witnesses.size() == m;
  if (m >= 2) rep.a5.common_eigenkets = common_eigenkets(model.controls(), tol);
  rep.a5.holds = m + 1 == static_cast<std::size_t>(n) && rep.a5.rank == n &&
                 rep.a5.no_control_has_target_eigenket;
  return rep;
}

bool lemma5_independence(const SystemModel& model, const std::vector<double>& lambda) {
  require_lambda_count(model, lambda, "lemma5_independence");
  const Eigen::Index n = model.dim();
  const auto m = static_cast<Eigen::Index>(lambda.size());
  if (m == 0) return true;
  Eigen::MatrixXd stacked(2 * n * n, m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const CMatrix shifted = model.controls()[static_cast<std::size_t>(k)].matrix() -
                            lambda[static_cast<std::size_t>(k)] * CMatrix::Identity(n, n);
    stacked.col(k) = real_vec(shifted);
  }
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(stacked).singularValues();
  return relative_rank(sv, 1e-9) == m;
}

std::vector<QuantumState> common_eigenkets(const std::vector<HermitianOperator>& ops, double tol) {
  if (ops.size() < 2) throw PreconditionError("common_eigenkets: need at least two operators");
  const Eigen::Index n = ops.front().dim();
  for (const auto& op : ops) require_same_dim(op.dim(), n, "common_eigenkets");

  std::vector<std::vector<CMatrix>> spaces;
  std::vector<double> scales;
  for (const auto& op : ops) {
    spaces.push_back(eigenspaces(op));
    scales.push_back(std::max(spectral_radius(op), 1.0));
  }

  std::vector<CVector> candidates;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    for (std::size_t j = i + 1; j < ops.size(); ++j) {
      for (const CMatrix& p : spaces[i]) {
        for (const CMatrix& q : spaces[j]) {
          Eigen::JacobiSVD<CMatrix> svd(p.adjoint() * q, Eigen::ComputeThinU);
          const Eigen::VectorXd& sv = svd.singularValues();
          for (Eigen::Index s = 0; s < sv.size(); ++s) {
            if (sv[s] < 1.0 - tol) break;
            CVector v = p * svd.matrixU().col(s);
            v.normalize();
            const QuantumState state(v);
            if (is_eigenstate(state, ops[i], tol * scales[i]) &&
                is_eigenstate(state, ops[j], tol * scales[j])) {
              fix_phase(v);
              candidates.push_back(std::move(v));
            }
          }
        }
      }
    }
  }

  // Greedy independent subset, tested against an orthonormalized span.
  std::vector<QuantumState> out;
  CMatrix span(n, 0);
  for (const CVector& v : candidates) {
    CVector r = v;
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index c = 0; c < span.cols(); ++c) r -= span.col(c).dot(r) * span.col(c);
    }
    const double rn = r.norm();
    if (rn > 1e-6) {
      span.conservativeResize(Eigen::NoChange, span.cols() + 1);
      span.col(span.cols() - 1) = r / rn;
      out.emplace_back(v);
    }
  }
  return out;
}

InvariantSetResult invariant_set_B(const SystemModel& model, const std::vector<double>& lambda,
                                   double tol) {
  require_lambda_count(model, lambda, "invariant_set_B");
  const Eigen::Index n = model.dim();
  const auto m = static_cast<Eigen::Index>(lambda.size());
  const CVector& f = model.target().amplitudes();

  InvariantSetResult res;
  res.lambda = lambda;
  CMatrix null_basis;
  if (m == 0) {
    null_basis = CMatrix::Identity(n, n);
  } else {
    CMatrix rows(m, n);
    for (Eigen::Index k = 0; k < m; ++k) {
      const auto ks = static_cast<std::size_t>(k);
      rows.row(k) = (model.controls()[ks].matrix() * f - lambda[ks] * f).adjoint();
    }
    Eigen::JacobiSVD<CMatrix> svd(rows, Eigen::ComputeFullV);
    const Eigen::VectorXd& sv = svd.singularValues();
    res.singular_values = to_std(sv);
    const int rank = numerical_rank(sv, tol);
    null_basis = svd.matrixV().rightCols(n - rank);
  }

  res.dimension = static_cast<int>(null_basis.cols());
  for (Eigen::Index c = 0; c < null_basis.cols(); ++c) {
    CVector v = null_basis.col(c);
    fix_phase(v);
    res.basis.emplace_back(QuantumState::normalized(v));
  }
  const CVector residual = f - null_basis * (null_basis.adjoint() * f);
  res.contains_target = residual.norm() < tol;
  return res;
}

std::vector<double> target_lambda(const SystemModel& model) {
  std::vector<double> lambda;
  for (const auto& hk : model.controls()) {
    lambda.push_back(expectation_value(model.target(), hk));
  }
  return lambda;
}

LambdaSweepResult lambda_sweep(const SystemModel& model, const LambdaSweepOptions& options) {
  if (options.grid_points < 2) throw PreconditionError("lambda_sweep: grid_points must be >= 2");
  const std::size_t m = model.num_controls();
  LambdaSweepResult res;

  double total = 1.0;
  for (const auto& hk : model.controls()) {
    const Eigen::VectorXd ev = hk.spectrum().eigenvalues;
    const double lo = ev[0] - 1.0;
    const double hi = ev[ev.size() - 1] + 1.0;
    std::vector<double> grid;
    for (int i = 0; i < options.grid_points; ++i) {
      grid.push_back(lo + (hi - lo) * i / (options.grid_points - 1));
    }
    grid.insert(grid.end(), ev.data(), ev.data() + ev.size());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    total *= static_cast<double>(grid.size());
    res.grids.push_back(std::move(grid));
  }
  res.exhaustive = total <= static_cast<double>(options.max_combinations);
  const std::size_t count =
      res.exhaustive ? static_cast<std::size_t>(total) : options.sampled_combinations;

  const NormalStream stream(options.seed);
  auto lambda_at = [&](std::size_t idx) {
    std::vector<double> lambda(m);
    std::size_t rest = idx;
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t size = res.grids[k].size();
      std::size_t pick;
      if (res.exhaustive) {
        pick = rest % size;
        rest /= size;
      } else {
        const double u = stream.uniform(idx * m + k);
        pick = std::min(size - 1, static_cast<std::size_t>(u * static_cast<double>(size)));
      }
      lambda[k] = res.grids[k][pick];
    }
    return lambda;
  };

  std::vector<int> dims(count);
  detail::parallel_for(count, [&](std::size_t i) {
    dims[i] = invariant_set_B(model, lambda_at(i), options.tol).dimension;
  });
  res.evaluated = count;

  const int n = static_cast<int>(model.dim());
  res.dimension_counts.assign(static_cast<std::size_t>(n) + 1, 0);
  for (int d : dims) {
    ++res.dimension_counts[static_cast<std::size_t>(d)];
    res.max_dimension = std::max(res.max_dimension, d);
  }
  for (int d = res.max_dimension; d >= 0 && res.examples.size() < options.keep_examples; --d) {
    for (std::size_t i = 0; i < count && res.examples.size() < options.keep_examples; ++i) {
      if (dims[i] == d) res.examples.push_back(invariant_set_B(model, lambda_at(i), options.tol));
    }
  }
  res.target_choice = invariant_set_B(model, target_lambda(model), options.tol);
  return res;
}

EscapeMatrix escape_matrix_in_basis(const SystemModel& model, const CMatrix& complement) {
  if (!is_eigenstate(model.target(), model.h0(), kAssumptionTolerance)) {
    throw PreconditionError("escape_matrix: assumption A2 fails (target is not an eigenket of H0)");
  }
  const Eigen::Index n = model.dim();
  if (complement.rows() != n || complement.cols() != n - 1) {
    throw StructuralError("escape_matrix: complement basis must be n x (n-1)");
  }
  const CVector& f = model.target().amplitudes();
  const auto m = static_cast<Eigen::Index>(model.num_controls());
  EscapeMatrix out;
  out.complement = complement;
  out.matrix.resize(m, n - 1);
  for (Eigen::Index k = 0; k < m; ++k) {
    out.matrix.row(k) =
        (model.controls()[static_cast<std::size_t>(k)].matrix() * f).adjoint() * complement;
  }
  if (m > 0) {
    const Eigen::VectorXd sv = Eigen::JacobiSVD<CMatrix>(out.matrix).singularValues();
    out.singular_values = to_std(sv);
    out.rank = relative_rank(sv, 1e-9);
  }
  out.full_rank = out.rank == n - 1;
  return out;
}

EscapeMatrix escape_matrix(const SystemModel& model) {
  const CMatrix basis = complete_basis(model.target().amplitudes());
  return escape_matrix_in_basis(model, basis.rightCols(model.dim() - 1));
}

Complex expected_escape_increment(const SystemModel& model, const ControlLaw& law,
                                  const QuantumState& state) {
  require_same_dim(state.dim(), model.dim(), "expected_escape_increment");
  const CVector& f = model.target().amplitudes();
  const CVector& psi = state.amplitudes();
  if (std::abs(f.dot(psi)) > 1e-10) {
    throw PreconditionError("expected_escape_increment: state is not orthogonal to the target");
  }
  const std::vector<double> u = control_signals(model, law, state);
  Complex sum = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    sum += u[k] * f.dot(model.controls()[k].matrix() * psi);
  }
  return Complex(0.0, -1.0 / model.hbar()) * sum;
}

}  // namespace qlyap
