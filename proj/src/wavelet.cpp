//
// bmri - Copyright 2026 The bmri Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "bmri/linops.hpp"

namespace bmri {

const std::array<double, 8> &db4_lowpass() noexcept {
  // spectral factorization of the degree-4 Daubechies polynomial, rounded
  // from 25 digits
  static const std::array<double, 8> h {
    0.2303778133088965,   0.7148465705529157,  0.6308807679298589,
    -0.027983769416859854, -0.18703481171909309, 0.030841381835560764,
    0.0328830116668852,   -0.010597401785069032,
  };
  return h;
}

namespace {
  constexpr std::size_t kTaps = 8;

  const std::array<double, kTaps> &db4_highpass() {
    static const std::array<double, kTaps> g = [] {
      std::array<double, kTaps> out {};
      const auto &h = db4_lowpass();
      for (std::size_t j = 0; j < kTaps; ++j)
        out[j] = (j % 2 == 0 ? 1.0 : -1.0) * h[kTaps - 1 - j];
      return out;
    }();
    return g;
  }

  // One periodized analysis step on a strided 1-D signal of length n.
  void analyze(double *x, std::size_t n, std::size_t stride,
               std::vector<double> &tmp) {
    const auto &h = db4_lowpass();
    const auto &g = db4_highpass();
    const std::size_t half = n / 2;
    tmp.assign(n, 0.0);
    for (std::size_t k = 0; k < half; ++k) {
      double a = 0.0, d = 0.0;
      for (std::size_t j = 0; j < kTaps; ++j) {
        const double v = x[((2 * k + j) % n) * stride];
        a += h[j] * v;
        d += g[j] * v;
      }
      tmp[k] = a;
      tmp[half + k] = d;
    }
    for (std::size_t i = 0; i < n; ++i)
      x[i * stride] = tmp[i];
  }

  void synthesize(double *x, std::size_t n, std::size_t stride,
                  std::vector<double> &tmp) {
    const auto &h = db4_lowpass();
    const auto &g = db4_highpass();
    const std::size_t half = n / 2;
    tmp.assign(n, 0.0);
    for (std::size_t k = 0; k < half; ++k) {
      const double a = x[k * stride];
      const double d = x[(half + k) * stride];
      for (std::size_t j = 0; j < kTaps; ++j)
        tmp[(2 * k + j) % n] += h[j] * a + g[j] * d;
    }
    for (std::size_t i = 0; i < n; ++i)
      x[i * stride] = tmp[i];
  }

  void forward_plane(double *p, std::size_t height, std::size_t width,
                     int levels) {
    std::vector<double> tmp;
    for (int l = 0; l < levels; ++l) {
      const std::size_t rows = height >> l;
      const std::size_t cols = width >> l;
      for (std::size_t r = 0; r < rows; ++r)
        analyze(p + r * width, cols, 1, tmp);
      for (std::size_t c = 0; c < cols; ++c)
        analyze(p + c, rows, width, tmp);
    }
  }

  void inverse_plane(double *p, std::size_t height, std::size_t width,
                     int levels) {
    std::vector<double> tmp;
    for (int l = levels - 1; l >= 0; --l) {
      const std::size_t rows = height >> l;
      const std::size_t cols = width >> l;
      for (std::size_t c = 0; c < cols; ++c)
        synthesize(p + c, rows, width, tmp);
      for (std::size_t r = 0; r < rows; ++r)
        synthesize(p + r * width, cols, 1, tmp);
    }
  }

  void check_levels(std::size_t height, std::size_t width, int levels) {
    if (levels < 1)
      throw DimensionError("wavelet levels must be positive");
    const std::size_t block = std::size_t { 1 } << levels;
    if (height % block != 0 || width % block != 0)
      throw DimensionError("image dimensions " + std::to_string(height) + "x"
                           + std::to_string(width) + " not divisible by 2^"
                           + std::to_string(levels));
  }
}  // namespace

MultiField dwt2(const ComplexImage &u, int levels) {
  check_levels(u.height(), u.width(), levels);
  ComplexImage out = u;
  forward_plane(out.re_data(), u.height(), u.width(), levels);
  forward_plane(out.im_data(), u.height(), u.width(), levels);
  std::vector<ComplexImage> comps;
  comps.push_back(std::move(out));
  return MultiField(std::move(comps));
}

ComplexImage idwt2(const MultiField &z, int levels) {
  if (z.count() != 1)
    throw DimensionError("wavelet coefficients must have one component");
  check_levels(z.height(), z.width(), levels);
  ComplexImage out = z[0];
  inverse_plane(out.re_data(), out.height(), out.width(), levels);
  inverse_plane(out.im_data(), out.height(), out.width(), levels);
  return out;
}

}  // namespace bmri
