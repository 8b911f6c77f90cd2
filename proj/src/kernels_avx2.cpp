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

// AVX2 + FMA variants of the dense complex kernels. This translation unit is
// the only one compiled with -mavx2 -mfma; it is reached through the table
// pointer after a runtime CPU check.

#include <immintrin.h>

#include "qlyap/kernels.hpp"

namespace qlyap::kernels {
namespace {

// [r0 i0 r1 i1] * (xr + i xi) for two packed complex values.
inline __m256d cmul_packed(__m256d c, __m256d xr, __m256d xi) {
  const __m256d swapped = _mm256_permute_pd(c, 0b0101);
  return _mm256_fmaddsub_pd(c, xr, _mm256_mul_pd(swapped, xi));
}

void matvec_avx2(std::size_t n, const Complex* a, const Complex* x, Complex* y) {
  const double* ad = reinterpret_cast<const double*>(a);
  double* yd = reinterpret_cast<double*>(y);
  const std::size_t paired = n & ~std::size_t{1};
  for (std::size_t i = 0; i < paired; i += 2) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t j = 0; j < n; ++j) {
      const __m256d col = _mm256_loadu_pd(ad + 2 * (j * n + i));
      acc = _mm256_add_pd(
          acc, cmul_packed(col, _mm256_set1_pd(x[j].real()), _mm256_set1_pd(x[j].imag())));
    }
    _mm256_storeu_pd(yd + 2 * i, acc);
  }
  if (paired != n) {
    const std::size_t i = n - 1;
    double yr = 0.0;
    double yi = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const Complex c = a[j * n + i];
      yr += c.real() * x[j].real() - c.imag() * x[j].imag();
      yi += c.real() * x[j].imag() + c.imag() * x[j].real();
    }
    y[i] = Complex(yr, yi);
  }
}

Complex dotc_avx2(std::size_t n, const Complex* x, const Complex* y) {
  const double* xd = reinterpret_cast<const double*>(x);
  const double* yd = reinterpret_cast<const double*>(y);
  __m256d direct = _mm256_setzero_pd();  // xr*yr, xi*yi
  __m256d cross = _mm256_setzero_pd();   // xr*yi, xi*yr
  const std::size_t paired = n & ~std::size_t{1};
  for (std::size_t i = 0; i < paired; i += 2) {
    const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
    const __m256d yv = _mm256_loadu_pd(yd + 2 * i);
    direct = _mm256_fmadd_pd(xv, yv, direct);
    cross = _mm256_fmadd_pd(xv, _mm256_permute_pd(yv, 0b0101), cross);
  }
  alignas(32) double d[4];
  alignas(32) double c[4];
  _mm256_store_pd(d, direct);
  _mm256_store_pd(c, cross);
  double re = (d[0] + d[2]) + (d[1] + d[3]);
  double im = (c[0] + c[2]) - (c[1] + c[3]);
  if (paired != n) {
    const Complex xv = x[n - 1];
    const Complex yv = y[n - 1];
    re += xv.real() * yv.real() + xv.imag() * yv.imag();
    im += xv.real() * yv.imag() - xv.imag() * yv.real();
  }
  return {re, im};
}

void axpy_avx2(std::size_t n, Complex alpha, const Complex* x, Complex* y) {
  const double* xd = reinterpret_cast<const double*>(x);
  double* yd = reinterpret_cast<double*>(y);
  const __m256d ar = _mm256_set1_pd(alpha.real());
  const __m256d ai = _mm256_set1_pd(alpha.imag());
  const std::size_t paired = n & ~std::size_t{1};
  for (std::size_t i = 0; i < paired; i += 2) {
    const __m256d xv = _mm256_loadu_pd(xd + 2 * i);
    const __m256d yv = _mm256_loadu_pd(yd + 2 * i);
    _mm256_storeu_pd(yd + 2 * i, _mm256_add_pd(yv, cmul_packed(xv, ar, ai)));
  }
  if (paired != n) {
    const Complex xv = x[n - 1];
    y[n - 1] += Complex(alpha.real() * xv.real() - alpha.imag() * xv.imag(),
                        alpha.real() * xv.imag() + alpha.imag() * xv.real());
  }
}

void scale_avx2(std::size_t n, double s, Complex* x) {
  double* xd = reinterpret_cast<double*>(x);
  const __m256d sv = _mm256_set1_pd(s);
  const std::size_t paired = n & ~std::size_t{1};
  for (std::size_t i = 0; i < paired; i += 2) {
    _mm256_storeu_pd(xd + 2 * i, _mm256_mul_pd(_mm256_loadu_pd(xd + 2 * i), sv));
  }
  if (paired != n) x[n - 1] = Complex(x[n - 1].real() * s, x[n - 1].imag() * s);
}

constexpr KernelTable kAvx2{Backend::Avx2, "avx2", matvec_avx2, dotc_avx2, axpy_avx2, scale_avx2};

}  // namespace

const KernelTable* avx2_table() {
  static const bool usable = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return usable ? &kAvx2 : nullptr;
}

}  // namespace qlyap::kernels
