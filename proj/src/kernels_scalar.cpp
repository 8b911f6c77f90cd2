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

#include "qlyap/kernels.hpp"

namespace qlyap::kernels {
namespace {

// y += a * x on split real/imaginary parts.
inline void cmul_acc(double ar, double ai, double xr, double xi, double& yr, double& yi) {
  yr += ar * xr - ai * xi;
  yi += ar * xi + ai * xr;
}

void matvec_scalar(std::size_t n, const Complex* a, const Complex* x, Complex* y) {
  for (std::size_t i = 0; i < n; ++i) y[i] = Complex(0.0, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double xr = x[j].real();
    const double xi = x[j].imag();
    const Complex* col = a + j * n;
    for (std::size_t i = 0; i < n; ++i) {
      double yr = y[i].real();
      double yi = y[i].imag();
      cmul_acc(col[i].real(), col[i].imag(), xr, xi, yr, yi);
      y[i] = Complex(yr, yi);
    }
  }
}

Complex dotc_scalar(std::size_t n, const Complex* x, const Complex* y) {
  double re = 0.0;
  double im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cmul_acc(x[i].real(), -x[i].imag(), y[i].real(), y[i].imag(), re, im);
  }
  return {re, im};
}

void axpy_scalar(std::size_t n, Complex alpha, const Complex* x, Complex* y) {
  const double ar = alpha.real();
  const double ai = alpha.imag();
  for (std::size_t i = 0; i < n; ++i) {
    double yr = y[i].real();
    double yi = y[i].imag();
    cmul_acc(ar, ai, x[i].real(), x[i].imag(), yr, yi);
    y[i] = Complex(yr, yi);
  }
}

void scale_scalar(std::size_t n, double s, Complex* x) {
  for (std::size_t i = 0; i < n; ++i) x[i] = Complex(x[i].real() * s, x[i].imag() * s);
}

constexpr KernelTable kScalar{Backend::Scalar, "scalar",    matvec_scalar,
                              dotc_scalar,     axpy_scalar, scale_scalar};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

}  // namespace qlyap::kernels
