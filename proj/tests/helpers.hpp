//
// bmri - Copyright 2026 The bmri Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "bmri/core.hpp"

namespace bmri::test {

inline double max_abs_diff(const ComplexImage &a, const ComplexImage &b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    m = std::max(m, std::abs(a.re()[i] - b.re()[i]));
    m = std::max(m, std::abs(a.im()[i] - b.im()[i]));
  }
  return m;
}

inline bool same(std::span<const double> a, std::span<const double> b) {
  return std::ranges::equal(a, b);
}

inline double rel_diff(const ComplexImage &a, const ComplexImage &b) {
  const ComplexImage d = a - b;
  return norm(d) / std::max(norm(b), 1e-300);
}

inline MultiField random_field(Rng &rng, std::size_t m, std::size_t h,
                               std::size_t w, double sigma = 1.0) {
  std::vector<ComplexImage> c;
  for (std::size_t p = 0; p < m; ++p)
    c.push_back(cgauss_sample(rng, h, w, sigma));
  return MultiField(std::move(c));
}

/// Naive O(N^2) unitary DFT.
inline ComplexImage naive_dft(const ComplexImage &u, int sign) {
  const std::size_t h = u.height(), w = u.width();
  ComplexImage out(h, w);
  const double pi = std::acos(-1.0);
  for (std::size_t k = 0; k < h; ++k)
    for (std::size_t l = 0; l < w; ++l) {
      std::complex<double> s = 0.0;
      for (std::size_t r = 0; r < h; ++r)
        for (std::size_t c = 0; c < w; ++c) {
          const double ph = sign * 2.0 * pi
                            * (double(k * r) / double(h) + double(l * c) / double(w));
          s += std::complex<double>(u.re()[r * w + c], u.im()[r * w + c])
               * std::polar(1.0, ph);
        }
      s /= std::sqrt(double(h * w));
      out.re()[k * w + l] = s.real();
      out.im()[k * w + l] = s.imag();
    }
  return out;
}

}  // namespace bmri::test
