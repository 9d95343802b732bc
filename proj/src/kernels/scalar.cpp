//
// bmri - Copyright 2026 The bmri Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <cmath>
#include <cstddef>

#include "bmri/kernels.hpp"

namespace bmri::kernels {
namespace {
  double dot(const double *a, const double *b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      s += a[i] * b[i];
    return s;
  }

  void axpy(double alpha, const double *x, double *y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
      y[i] += alpha * x[i];
  }

  void scale(double alpha, double *x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
      x[i] *= alpha;
  }

  void sub(const double *a, const double *b, double *out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
      out[i] = a[i] - b[i];
  }

  void mul(const double *a, const double *x, double *out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
      out[i] = a[i] * x[i];
  }

  void mul_add(const double *a, const double *x, double *y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
      y[i] += a[i] * x[i];
  }

  void add_sq(const double *x, double *acc, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
      acc[i] += x[i] * x[i];
  }

  void sqrt_inplace(double *x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
      x[i] = std::sqrt(x[i]);
  }

  void data_prox(const double *fv, const double *y, const double *w,
                 double tau, double *out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      const double tw2 = tau * w[i] * w[i];
      out[i] = (fv[i] + tw2 * y[i]) / (1.0 + tw2);
    }
  }

  void huber_phi(const double *mag, double gamma, double *out,
                 std::size_t n) {
    const double inv_g = 1.0 / gamma;
    for (std::size_t i = 0; i < n; ++i) {
      const double m = mag[i];
      out[i] = m <= gamma ? (2.0 - m * inv_g) * inv_g : 1.0 / m;
    }
  }

  void huber_psi(const double *mag, double gamma, double *out,
                 std::size_t n) {
    const double inv_g2 = 1.0 / (gamma * gamma);
    for (std::size_t i = 0; i < n; ++i) {
      const double m = mag[i];
      if (m == 0.0)
        out[i] = 0.0;
      else if (m <= gamma)
        out[i] = -inv_g2 / m;
      else
        out[i] = -1.0 / (m * m * m);
    }
  }

  // Smooth branch: (t/g^2) C^2 - (1 + 2t/g) C + m = 0, smaller root,
  // written as C/m = 2 / (a + sqrt(a^2 - 4 t m / g^2)). Valid while
  // C <= g, i.e. m <= g + t. Otherwise C = m - t.
  void huber_prox_factor(const double *mag, double gamma, double t,
                         double *out, std::size_t n) {
    const double a = 1.0 + 2.0 * t / gamma;
    const double b = 4.0 * t / (gamma * gamma);
    const double knee = gamma + t;
    for (std::size_t i = 0; i < n; ++i) {
      const double m = mag[i];
      if (m <= knee)
        out[i] = 2.0 / (a + std::sqrt(a * a - b * m));
      else
        out[i] = 1.0 - t / m;
    }
  }
}  // namespace

const Table &scalar_table() noexcept {
  static const Table table {
    Isa::kScalar, "scalar", dot,       axpy,         scale,
    sub,          mul,      mul_add,   add_sq,       sqrt_inplace,
    data_prox,    huber_phi, huber_psi, huber_prox_factor,
  };
  return table;
}

}  // namespace bmri::kernels
