//
// bmri - Copyright 2026 The bmri Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "bmri/linops.hpp"

#include <cmath>
#include <vector>

#include "bmri/kernels.hpp"

namespace bmri {
namespace {
  void forward_diff(const double *u, double *dv, double *dh, std::size_t h,
                    std::size_t w) {
    const auto &k = kernels::active();
    // vertical: rows 0..h-2 are u[r+1] - u[r]; last row stays zero
    if (h > 1)
      k.sub(u + w, u, dv, (h - 1) * w);
    if (w > 1)
      for (std::size_t r = 0; r < h; ++r)
        k.sub(u + r * w + 1, u + r * w, dh + r * w, w - 1);
  }

  void backward_div(const double *zv, const double *zh, double *out,
                    std::size_t h, std::size_t w) {
    const auto &k = kernels::active();
    if (h > 1) {
      k.axpy(-1.0, zv, out, (h - 1) * w);
      k.axpy(1.0, zv, out + w, (h - 1) * w);
    }
    if (w > 1) {
      for (std::size_t r = 0; r < h; ++r) {
        k.axpy(-1.0, zh + r * w, out + r * w, w - 1);
        k.axpy(1.0, zh + r * w, out + r * w + 1, w - 1);
      }
    }
  }
}  // namespace

MultiField grad_apply(const ComplexImage &u) {
  MultiField z(2, u.height(), u.width());
  forward_diff(u.re_data(), z[0].re_data(), z[1].re_data(), u.height(),
               u.width());
  forward_diff(u.im_data(), z[0].im_data(), z[1].im_data(), u.height(),
               u.width());
  return z;
}

ComplexImage grad_adjoint(const MultiField &z) {
  if (z.count() != 2)
    throw DimensionError("gradient adjoint expects two components");
  ComplexImage out(z.height(), z.width());
  backward_div(z[0].re_data(), z[1].re_data(), out.re_data(), z.height(),
               z.width());
  backward_div(z[0].im_data(), z[1].im_data(), out.im_data(), z.height(),
               z.width());
  return out;
}

AnalysisOp AnalysisOp::wavelet(int levels) {
  if (levels < 1)
    throw DomainError("wavelet levels must be positive");
  return AnalysisOp(Kind::kWavelet, levels);
}

double AnalysisOp::norm_bound() const noexcept {
  return kind_ == Kind::kGradient ? std::sqrt(8.0) : 1.0;
}

MultiField AnalysisOp::apply(const ComplexImage &u) const {
  switch (kind_) {
  case Kind::kGradient:
    return grad_apply(u);
  case Kind::kWavelet:
    return dwt2(u, levels_);
  case Kind::kIdentity:
    break;
  }
  std::vector<ComplexImage> comps { u };
  return MultiField(std::move(comps));
}

ComplexImage AnalysisOp::adjoint(const MultiField &z) const {
  switch (kind_) {
  case Kind::kGradient:
    return grad_adjoint(z);
  case Kind::kWavelet:
    return idwt2(z, levels_);
  case Kind::kIdentity:
    break;
  }
  if (z.count() != 1)
    throw DimensionError("identity adjoint expects one component");
  return z[0];
}

const char *to_string(AnalysisOp::Kind kind) noexcept {
  switch (kind) {
  case AnalysisOp::Kind::kGradient:
    return "gradient";
  case AnalysisOp::Kind::kWavelet:
    return "wavelet";
  case AnalysisOp::Kind::kIdentity:
    return "identity";
  }
  return "?";
}

double power_norm(const std::function<MultiField(const ComplexImage &)> &apply,
                  const std::function<ComplexImage(const MultiField &)> &adjoint,
                  std::size_t height, std::size_t width, int iters, Rng &rng) {
  if (iters < 1)
    throw DomainError("power iteration needs at least one step");
  ComplexImage x = cgauss_sample(rng, height, width, 1.0);
  x *= 1.0 / norm(x);
  for (int k = 0; k < iters; ++k) {
    ComplexImage next = adjoint(apply(x));
    const double nn = norm(next);
    if (nn == 0.0)
      return 0.0;
    next *= 1.0 / nn;
    x = std::move(next);
  }
  return norm(apply(x));
}

double power_norm(const AnalysisOp &op, std::size_t height, std::size_t width,
                  int iters, Rng &rng) {
  return power_norm([&op](const ComplexImage &u) { return op.apply(u); },
                    [&op](const MultiField &z) { return op.adjoint(z); },
                    height, width, iters, rng);
}

}  // namespace bmri
