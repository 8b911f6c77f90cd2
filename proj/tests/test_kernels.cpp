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

#include <vector>

#include "doctest.h"
#include "qlyap/kernels.hpp"
#include "qlyap/sse.hpp"
#include "support.hpp"

using namespace qlyap;
using qlyap::testing::Rng;

namespace {

std::vector<Complex> random_buffer(Rng& rng, std::size_t len) {
  std::vector<Complex> v(len);
  for (auto& z : v) z = rng.cnormal();
  return v;
}

double max_abs_diff(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

std::vector<const kernels::KernelTable*> all_tables() {
  std::vector<const kernels::KernelTable*> out{&kernels::scalar_table()};
  if (const auto* t = kernels::avx2_table()) out.push_back(t);
  return out;
}

}  // namespace

TEST_CASE("every backend matches an Eigen reference") {
  Rng rng(10);
  for (const auto* kt : all_tables()) {
    CAPTURE(kt->name);
    for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 16u}) {
      CAPTURE(n);
      const auto a = random_buffer(rng, n * n);
      const auto x = random_buffer(rng, n);
      const auto y0 = random_buffer(rng, n);
      const Eigen::Map<const CMatrix> A(a.data(), n, n);
      const Eigen::Map<const CVector> X(x.data(), n);
      const Eigen::Map<const CVector> Y0(y0.data(), n);
      const double tol = 1e-13 * static_cast<double>(n);

      std::vector<Complex> y(n);
      kt->matvec(n, a.data(), x.data(), y.data());
      const CVector ref = A * X;
      CHECK((Eigen::Map<const CVector>(y.data(), n) - ref).norm() < tol);

      const Complex d = kt->dotc(n, x.data(), y0.data());
      CHECK(std::abs(d - X.dot(Y0)) < tol);

      const Complex alpha(0.3, -1.7);
      std::vector<Complex> yy = y0;
      kt->axpy(n, alpha, x.data(), yy.data());
      CHECK((Eigen::Map<const CVector>(yy.data(), n) - (Y0 + alpha * X)).norm() < tol);

      std::vector<Complex> xs = x;
      kt->scale(n, -2.5, xs.data());
      CHECK((Eigen::Map<const CVector>(xs.data(), n) - (-2.5) * X).norm() < tol);
    }
  }
}

TEST_CASE("AVX2 kernels agree with the scalar reference") {
  const kernels::KernelTable* simd = kernels::avx2_table();
  if (!simd) {
    MESSAGE("AVX2 backend unavailable on this machine; equivalence not exercised");
    return;
  }
  const kernels::KernelTable& ref = kernels::scalar_table();
  Rng rng(11);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 1 + static_cast<std::size_t>(rep % 17);
    const auto a = random_buffer(rng, n * n);
    const auto x = random_buffer(rng, n);
    std::vector<Complex> y1(n), y2(n);
    ref.matvec(n, a.data(), x.data(), y1.data());
    simd->matvec(n, a.data(), x.data(), y2.data());
    CHECK(max_abs_diff(y1, y2) < 1e-13 * static_cast<double>(n));
    CHECK(std::abs(ref.dotc(n, a.data(), x.data()) - simd->dotc(n, a.data(), x.data())) <
          1e-13 * static_cast<double>(n));
    std::vector<Complex> z1(a.begin(), a.begin() + n), z2 = z1;
    ref.axpy(n, Complex(0.5, 0.25), x.data(), z1.data());
    simd->axpy(n, Complex(0.5, 0.25), x.data(), z2.data());
    CHECK(max_abs_diff(z1, z2) < 1e-14);
    ref.scale(n, 1.0 / 3.0, z1.data());
    simd->scale(n, 1.0 / 3.0, z2.data());
    CHECK(max_abs_diff(z1, z2) < 1e-14);
  }
}

TEST_CASE("trajectories on both backends agree to rounding") {
  if (!kernels::avx2_table()) return;
  Rng rng(12);
  const SystemModel model = testing::random_a5_model(rng, 4);
  const ControlLaw law = ControlLaw::unit_gains(3);
  EulerMaruyamaStepper s_ref(model, law, kernels::scalar_table());
  EulerMaruyamaStepper s_simd(model, law, *kernels::avx2_table());
  CVector p1 = rng.state(4).amplitudes();
  CVector p2 = p1;
  std::vector<double> u1(3), u2(3);
  const WienerPath path = WienerPath::generate(99, 1e-3, 2000);
  for (double dw : path.increments) {
    s_ref.step(p1, 1e-3, dw, u1.data());
    s_simd.step(p2, 1e-3, dw, u2.data());
  }
  CHECK((p1 - p2).norm() < 1e-10);
  for (int k = 0; k < 3; ++k) CHECK(u1[k] == doctest::Approx(u2[k]).epsilon(1e-8));
}

TEST_CASE("backend selection") {
  CHECK(kernels::parse_backend("scalar") == kernels::Backend::Scalar);
  CHECK(kernels::parse_backend("avx2") == kernels::Backend::Avx2);
  CHECK(kernels::parse_backend("auto").has_value());
  CHECK_FALSE(kernels::parse_backend("neon").has_value());
  CHECK(kernels::supported(kernels::Backend::Scalar));

  const kernels::Backend before = kernels::active().backend;
  kernels::select(kernels::Backend::Scalar);
  CHECK(kernels::active().backend == kernels::Backend::Scalar);
  CHECK(std::string(kernels::active().name) == "scalar");
  if (kernels::supported(kernels::Backend::Avx2)) {
    kernels::select(kernels::Backend::Avx2);
    CHECK(kernels::active().backend == kernels::Backend::Avx2);
  } else {
    CHECK_THROWS_AS(kernels::select(kernels::Backend::Avx2), std::invalid_argument);
  }
  kernels::select(before);
}
