//
// bmri - Copyright 2026 The bmri Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <atomic>
#include <cstdlib>
#include <string>
#include <string_view>

#include "bmri/errors.hpp"
#include "bmri/kernels.hpp"

namespace bmri::kernels {

#ifndef BMRI_HAVE_AVX2_KERNELS
const Table *avx2_table() noexcept {
  return nullptr;
}
#endif

bool cpu_has_avx2() noexcept {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa parse_isa(std::string_view name) {
  if (name == "scalar")
    return Isa::kScalar;
  if (name == "avx2")
    return Isa::kAvx2;
  throw ConfigError("unknown kernel ISA '" + std::string(name) + "'");
}

namespace {
  const Table *table_for(Isa isa) {
    if (isa == Isa::kAvx2) {
      const Table *t = avx2_table();
      if (t == nullptr || !cpu_has_avx2())
        throw ConfigError("AVX2 kernels are not available on this machine");
      return t;
    }
    return &scalar_table();
  }

  const Table *initial_table() {
    if (const char *env = std::getenv("BMRI_SIMD"); env != nullptr && *env) {
      std::string_view v(env);
      if (v != "auto") {
        try {
          return table_for(parse_isa(v));
        } catch (const Error &) {
          // unusable override; fall through to detection
        }
      }
    }
    if (avx2_table() != nullptr && cpu_has_avx2())
      return avx2_table();
    return &scalar_table();
  }

  std::atomic<const Table *> &slot() {
    static std::atomic<const Table *> current { initial_table() };
    return current;
  }
}  // namespace

const Table &active() noexcept {
  return *slot().load(std::memory_order_acquire);
}

void select(Isa isa) {
  slot().store(table_for(isa), std::memory_order_release);
}

}  // namespace bmri::kernels
