//
// bmri - Copyright 2026 The bmri Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <string_view>

// Pixelwise inner loops. Every kernel has a scalar reference version and,
// on x86-64, an AVX2/FMA version. The active table is chosen once at
// startup from the CPU features; BMRI_SIMD=scalar|avx2 overrides it.

namespace bmri::kernels {

enum class Isa { kScalar, kAvx2 };

struct Table {
  Isa isa;
  const char *name;

  double (*dot)(const double *a, const double *b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double *x, double *y, std::size_t n);
  void (*scale)(double alpha, double *x, std::size_t n);
  // out = a - b
  void (*sub)(const double *a, const double *b, double *out, std::size_t n);
  // out = a * x
  void (*mul)(const double *a, const double *x, double *out, std::size_t n);
  // y += a * x
  void (*mul_add)(const double *a, const double *x, double *y, std::size_t n);
  // acc += x * x
  void (*add_sq)(const double *x, double *acc, std::size_t n);
  void (*sqrt_inplace)(double *x, std::size_t n);
  // out = (fv + tau w^2 y) / (1 + tau w^2)
  void (*data_prox)(const double *fv, const double *y, const double *w,
                    double tau, double *out, std::size_t n);
  // phi(m) = rho'(m)/m for the cubic Huber function
  void (*huber_phi)(const double *mag, double gamma, double *out,
                    std::size_t n);
  // psi(m) = phi'(m)/m, psi(0) = 0
  void (*huber_psi)(const double *mag, double gamma, double *out,
                    std::size_t n);
  // C(m, t)/m where (1 + t phi(C)) C = m
  void (*huber_prox_factor)(const double *mag, double gamma, double t,
                            double *out, std::size_t n);
};

const Table &scalar_table() noexcept;
/// nullptr when the AVX2 variants were not compiled in.
const Table *avx2_table() noexcept;
bool cpu_has_avx2() noexcept;

const Table &active() noexcept;
/// Switches the active table. Not synchronized; intended for tests and
/// program start-up.
void select(Isa isa);
Isa parse_isa(std::string_view name);

}  // namespace bmri::kernels
