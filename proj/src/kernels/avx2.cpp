//
// bmri - Copyright 2026 The bmri Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <immintrin.h>

#include <cmath>
#include <cstddef>

#include "bmri/kernels.hpp"

#define BMRI_AVX2 __attribute__((target("avx2,fma")))

namespace bmri::kernels {
namespace {
  constexpr std::size_t kLanes = 4;

  BMRI_AVX2 double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
  }

  BMRI_AVX2 double dot(const double *a, const double *b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 * kLanes <= n; i += 2 * kLanes) {
      acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i),
                             acc0);
      acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + kLanes),
                             _mm256_loadu_pd(b + i + kLanes), acc1);
    }
    for (; i + kLanes <= n; i += kLanes)
      acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i),
                             acc0);
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i)
      s += a[i] * b[i];
    return s;
  }

  BMRI_AVX2 void axpy(double alpha, const double *x, double *y,
                      std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
      __m256d vy = _mm256_loadu_pd(y + i);
      _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy));
    }
    for (; i < n; ++i)
      y[i] += alpha * x[i];
  }

  BMRI_AVX2 void scale(double alpha, double *x, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes)
      _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i)
      x[i] *= alpha;
  }

  BMRI_AVX2 void sub(const double *a, const double *b, double *out,
                     std::size_t n) {
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes)
      _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(a + i),
                                              _mm256_loadu_pd(b + i)));
    for (; i < n; ++i)
      out[i] = a[i] - b[i];
  }

  BMRI_AVX2 void mul(const double *a, const double *x, double *out,
                     std::size_t n) {
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes)
      _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i),
                                              _mm256_loadu_pd(x + i)));
    for (; i < n; ++i)
      out[i] = a[i] * x[i];
  }

  BMRI_AVX2 void mul_add(const double *a, const double *x, double *y,
                         std::size_t n) {
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes)
      _mm256_storeu_pd(y + i, _mm256_fmadd_pd(_mm256_loadu_pd(a + i),
                                              _mm256_loadu_pd(x + i),
                                              _mm256_loadu_pd(y + i)));
    for (; i < n; ++i)
      y[i] += a[i] * x[i];
  }

  BMRI_AVX2 void add_sq(const double *x, double *acc, std::size_t n) {
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
      const __m256d vx = _mm256_loadu_pd(x + i);
      _mm256_storeu_pd(acc + i,
                       _mm256_fmadd_pd(vx, vx, _mm256_loadu_pd(acc + i)));
    }
    for (; i < n; ++i)
      acc[i] += x[i] * x[i];
  }

  BMRI_AVX2 void sqrt_inplace(double *x, std::size_t n) {
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes)
      _mm256_storeu_pd(x + i, _mm256_sqrt_pd(_mm256_loadu_pd(x + i)));
    for (; i < n; ++i)
      x[i] = std::sqrt(x[i]);
  }

  BMRI_AVX2 void data_prox(const double *fv, const double *y, const double *w,
                           double tau, double *out, std::size_t n) {
    const __m256d vt = _mm256_set1_pd(tau);
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
      const __m256d vw = _mm256_loadu_pd(w + i);
      const __m256d tw2 = _mm256_mul_pd(vt, _mm256_mul_pd(vw, vw));
      const __m256d num = _mm256_fmadd_pd(tw2, _mm256_loadu_pd(y + i),
                                          _mm256_loadu_pd(fv + i));
      _mm256_storeu_pd(out + i, _mm256_div_pd(num, _mm256_add_pd(one, tw2)));
    }
    for (; i < n; ++i) {
      const double tw2 = tau * w[i] * w[i];
      out[i] = (fv[i] + tw2 * y[i]) / (1.0 + tw2);
    }
  }

  BMRI_AVX2 void huber_phi(const double *mag, double gamma, double *out,
                           std::size_t n) {
    const double inv_g = 1.0 / gamma;
    const __m256d vg = _mm256_set1_pd(gamma);
    const __m256d vinv = _mm256_set1_pd(inv_g);
    const __m256d two = _mm256_set1_pd(2.0);
    const __m256d one = _mm256_set1_pd(1.0);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
      const __m256d m = _mm256_loadu_pd(mag + i);
      const __m256d inner =
          _mm256_mul_pd(_mm256_sub_pd(two, _mm256_mul_pd(m, vinv)), vinv);
      const __m256d outer = _mm256_div_pd(one, m);
      const __m256d small = _mm256_cmp_pd(m, vg, _CMP_LE_OQ);
      _mm256_storeu_pd(out + i, _mm256_blendv_pd(outer, inner, small));
    }
    for (; i < n; ++i) {
      const double m = mag[i];
      out[i] = m <= gamma ? (2.0 - m * inv_g) * inv_g : 1.0 / m;
    }
  }

  BMRI_AVX2 void huber_psi(const double *mag, double gamma, double *out,
                           std::size_t n) {
    const double inv_g2 = 1.0 / (gamma * gamma);
    const __m256d vg = _mm256_set1_pd(gamma);
    const __m256d vneg = _mm256_set1_pd(-inv_g2);
    const __m256d mone = _mm256_set1_pd(-1.0);
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
      const __m256d m = _mm256_loadu_pd(mag + i);
      const __m256d inner = _mm256_div_pd(vneg, m);
      const __m256d outer =
          _mm256_div_pd(mone, _mm256_mul_pd(_mm256_mul_pd(m, m), m));
      const __m256d small = _mm256_cmp_pd(m, vg, _CMP_LE_OQ);
      const __m256d is_zero = _mm256_cmp_pd(m, zero, _CMP_EQ_OQ);
      __m256d r = _mm256_blendv_pd(outer, inner, small);
      r = _mm256_blendv_pd(r, zero, is_zero);
      _mm256_storeu_pd(out + i, r);
    }
    for (; i < n; ++i) {
      const double m = mag[i];
      if (m == 0.0)
        out[i] = 0.0;
      else if (m <= gamma)
        out[i] = -inv_g2 / m;
      else
        out[i] = -1.0 / (m * m * m);
    }
  }

  BMRI_AVX2 void huber_prox_factor(const double *mag, double gamma, double t,
                                   double *out, std::size_t n) {
    const double a = 1.0 + 2.0 * t / gamma;
    const double b = 4.0 * t / (gamma * gamma);
    const double knee = gamma + t;
    const __m256d va = _mm256_set1_pd(a);
    const __m256d va2 = _mm256_set1_pd(a * a);
    const __m256d vb = _mm256_set1_pd(b);
    const __m256d vt = _mm256_set1_pd(t);
    const __m256d vknee = _mm256_set1_pd(knee);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d two = _mm256_set1_pd(2.0);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
      const __m256d m = _mm256_loadu_pd(mag + i);
      const __m256d small = _mm256_cmp_pd(m, vknee, _CMP_LE_OQ);
      // Clamp the discriminant argument so unused lanes stay finite.
      const __m256d ms = _mm256_min_pd(m, vknee);
      const __m256d disc = _mm256_sqrt_pd(_mm256_fnmadd_pd(vb, ms, va2));
      const __m256d inner = _mm256_div_pd(two, _mm256_add_pd(va, disc));
      const __m256d outer = _mm256_sub_pd(one, _mm256_div_pd(vt, m));
      _mm256_storeu_pd(out + i, _mm256_blendv_pd(outer, inner, small));
    }
    for (; i < n; ++i) {
      const double m = mag[i];
      if (m <= knee)
        out[i] = 2.0 / (a + std::sqrt(a * a - b * m));
      else
        out[i] = 1.0 - t / m;
    }
  }
}  // namespace

const Table *avx2_table() noexcept {
  static const Table table {
    Isa::kAvx2, "avx2", dot,       axpy,         scale,
    sub,        mul,    mul_add,   add_sq,       sqrt_inplace,
    data_prox,  huber_phi, huber_psi, huber_prox_factor,
  };
  return &table;
}

}  // namespace bmri::kernels
