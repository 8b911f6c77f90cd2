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

#include <complex>
#include <cstddef>
#include <optional>
#include <string_view>

// Dense complex kernels used on the trajectory hot path. Every backend has
// the same contract as the scalar reference; results agree to rounding
// (summation order and FMA contraction differ), so bit-exact reproducibility
// holds per backend, not across backends.

namespace qlyap::kernels {

using Complex = std::complex<double>;

enum class Backend { Scalar, Avx2 };

struct KernelTable {
  Backend backend;
  const char* name;
  /// y = A x for column-major n x n A. y must not alias x.
  void (*matvec)(std::size_t n, const Complex* a, const Complex* x, Complex* y);
  /// sum_i conj(x_i) y_i
  Complex (*dotc)(std::size_t n, const Complex* x, const Complex* y);
  /// y += alpha x
  void (*axpy)(std::size_t n, Complex alpha, const Complex* x, Complex* y);
  /// x *= s
  void (*scale)(std::size_t n, double s, Complex* x);
};

const KernelTable& scalar_table();
/// nullptr when the backend is not compiled in or the CPU lacks it.
const KernelTable* avx2_table();

bool supported(Backend b);
const KernelTable& table(Backend b);

/// The process-wide backend. Chosen on first use: QLYAP_KERNEL=scalar|avx2|auto,
/// otherwise the widest supported backend.
const KernelTable& active();
/// Overrides the process-wide backend; throws std::invalid_argument if the
/// backend is unsupported on this machine.
void select(Backend b);

std::optional<Backend> parse_backend(std::string_view name);
const char* backend_name(Backend b);

}  // namespace qlyap::kernels
