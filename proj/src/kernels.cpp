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

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace qlyap::kernels {

#ifndef QLYAP_HAVE_AVX2_KERNELS
const KernelTable* avx2_table() { return nullptr; }
#endif

namespace {

const KernelTable* initial_choice() {
  if (const char* env = std::getenv("QLYAP_KERNEL")) {
    const auto requested = parse_backend(env);
    if (requested && supported(*requested)) return &table(*requested);
  }
  if (const KernelTable* t = avx2_table()) return t;
  return &scalar_table();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> ptr{initial_choice()};
  return ptr;
}

}  // namespace

bool supported(Backend b) {
  switch (b) {
    case Backend::Scalar:
      return true;
    case Backend::Avx2:
      return avx2_table() != nullptr;
  }
  return false;
}

const KernelTable& table(Backend b) {
  if (b == Backend::Avx2) {
    if (const KernelTable* t = avx2_table()) return *t;
    throw std::invalid_argument("kernel backend avx2 is not available on this machine");
  }
  return scalar_table();
}

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

void select(Backend b) { current().store(&table(b), std::memory_order_release); }

std::optional<Backend> parse_backend(std::string_view name) {
  if (name == "scalar") return Backend::Scalar;
  if (name == "avx2") return Backend::Avx2;
  if (name == "auto") return avx2_table() ? Backend::Avx2 : Backend::Scalar;
  return std::nullopt;
}

const char* backend_name(Backend b) { return b == Backend::Avx2 ? "avx2" : "scalar"; }

}  // namespace qlyap::kernels
