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

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <string>
#include <vector>

#include "qlyap/io.hpp"
#include "qlyap/model.hpp"
#include "qlyap/quantum_core.hpp"
#include "qlyap/structural.hpp"
#include "qlyap/types.hpp"

namespace qlyap::testing {

inline std::string fixture_path(const std::string& name) {
  return std::string(QLYAP_FIXTURE_DIR) + "/" + name;
}

inline std::string golden_path(const std::string& name) {
  return std::string(QLYAP_GOLDEN_DIR) + "/" + name;
}

inline SystemDefinition load_fixture(const std::string& name) {
  return parse_definition(fixture_path(name));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double normal() { return normal_(eng_); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(eng_);
  }
  Complex cnormal() { return {normal(), normal()}; }

  CVector vector(Eigen::Index n) {
    CVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = cnormal();
    return v;
  }

  /// Haar-distributed pure state.
  QuantumState state(Eigen::Index n) { return QuantumState::normalized(vector(n)); }

  CMatrix hermitian(Eigen::Index n, bool traceless) {
    CMatrix a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) a(i, j) = cnormal();
    }
    CMatrix h = 0.5 * (a + a.adjoint());
    if (traceless) h -= (h.trace() / static_cast<double>(n)) * CMatrix::Identity(n, n);
    return 0.5 * (h + h.adjoint());
  }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
  std::normal_distribution<double> normal_;
};

/// A unit vector orthogonal to `f`.
inline QuantumState orthogonal_state(Rng& rng, const QuantumState& f) {
  CVector v = rng.vector(f.dim());
  const CVector& a = f.amplitudes();
  v -= a.dot(v) * a;
  v -= a.dot(v) * a;
  return QuantumState::normalized(v);
}

inline double diag_entry(int i, Eigen::Index n) {
  return static_cast<double>(n - 1) / 2.0 - static_cast<double>(i);
}

/// psi_f = |0>, H0 and X diagonal with simple spectra, n-1 random traceless
/// controls. Generic draws satisfy every standing assumption.
inline SystemModel random_a5_model(Rng& rng, Eigen::Index n, double k = 0.5) {
  CMatrix h0 = CMatrix::Zero(n, n);
  CMatrix x = CMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    h0(i, i) = diag_entry(static_cast<int>(i), n);
    x(i, i) = static_cast<double>(n - i) * 0.5;
  }
  std::vector<HermitianOperator> controls;
  for (Eigen::Index c = 0; c + 1 < n; ++c) {
    controls.push_back(HermitianOperator::traceless(rng.hermitian(n, true)));
  }
  return SystemModel(HermitianOperator::traceless(h0), std::move(controls), HermitianOperator(x), k,
                     1.0, QuantumState::basis(n, 0));
}

inline CMatrix random_unitary(Rng& rng, Eigen::Index n) {
  CMatrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = rng.cnormal();
  }
  Eigen::HouseholderQR<CMatrix> qr(a);
  return qr.householderQ() * CMatrix::Identity(n, n);
}

// min over unit psi in [psi_f]^perp of sum_k |<psi_f|H_k|psi>|^2, by random
// search followed by projected gradient descent from the best sample.
inline double escape_search_min(const SystemModel& m, Rng& rng, int samples) {
  const CVector& f = m.target().amplitudes();
  const Eigen::Index n = m.dim();
  auto project = [&](CVector v) {
    v -= f.dot(v) * f;
    v -= f.dot(v) * f;
    return CVector(v / v.norm());
  };
  CMatrix rows(static_cast<Eigen::Index>(m.num_controls()), n);
  for (std::size_t k = 0; k < m.num_controls(); ++k) {
    rows.row(static_cast<Eigen::Index>(k)) = (m.controls()[k].matrix() * f).adjoint();
  }
  auto cost = [&](const CVector& v) { return (rows * v).squaredNorm(); };
  CVector best = project(rng.vector(n));
  for (int i = 1; i < samples; ++i) {
    const CVector v = project(rng.vector(n));
    if (cost(v) < cost(best)) best = v;
  }
  const CMatrix gram = rows.adjoint() * rows;
  const double step = 0.5 / std::max(1.0, gram.norm());
  for (int it = 0; it < 20000; ++it) best = project(best - step * (gram * best));
  return std::sqrt(cost(best));
}

}  // namespace qlyap::testing
