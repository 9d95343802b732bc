//
// bmri - Copyright 2026 The bmri Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <cmath>
#include <vector>

#include "bmri/eval.hpp"

namespace bmri {
namespace {
  // Periodic Gaussian taps indexed by offset modulo n, summing to one.
  std::vector<double> circular_kernel(std::size_t n, double bandwidth) {
    std::vector<double> k(n);
    double s = 0.0;
    for (std::size_t d = 0; d < n; ++d) {
      const double dist = static_cast<double>(std::min(d, n - d));
      k[d] = std::exp(-dist * dist / (2.0 * bandwidth * bandwidth));
      s += k[d];
    }
    for (double &v : k)
      v /= s;
    return k;
  }
}  // namespace

RealImage kde_pattern(const ParamVector &p, double bandwidth) {
  if (!(bandwidth > 0.0))
    throw DomainError("KDE bandwidth must be positive");
  p.validate();
  double mass = 0.0;
  for (double v : p.weights)
    mass += v;
  if (!(mass > 0.0))
    throw DegenerateError("cannot estimate the density of an empty pattern");
  const std::size_t h = p.height, w = p.width;
  const auto kr = circular_kernel(h, bandwidth);
  const auto kc = circular_kernel(w, bandwidth);
  RealImage tmp(h, w), out(h, w);
  for (std::size_t r = 0; r < h; ++r)
    for (std::size_t c = 0; c < w; ++c) {
      double s = 0.0;
      for (std::size_t j = 0; j < w; ++j)
        s += kc[(c + w - j) % w] * p.weights[r * w + j];
      tmp(r, c) = s;
    }
  double total = 0.0;
  for (std::size_t r = 0; r < h; ++r)
    for (std::size_t c = 0; c < w; ++c) {
      double s = 0.0;
      for (std::size_t i = 0; i < h; ++i)
        s += kr[(r + h - i) % h] * tmp(i, c);
      out(r, c) = s;
      total += s;
    }
  for (double &v : out.data)
    v /= total;
  return out;
}

RealImage fftshift(const RealImage &plane) {
  RealImage out(plane.height, plane.width);
  const std::size_t sh = plane.height / 2, sw = plane.width / 2;
  for (std::size_t r = 0; r < plane.height; ++r)
    for (std::size_t c = 0; c < plane.width; ++c)
      out((r + sh) % plane.height, (c + sw) % plane.width) = plane(r, c);
  return out;
}

RealImage pattern_plane(const ParamVector &p) {
  RealImage out(p.height, p.width);
  out.data = p.weights;
  return out;
}

}  // namespace bmri
