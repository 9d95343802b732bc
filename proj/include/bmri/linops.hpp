//
// bmri - Copyright 2026 The bmri Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <array>
#include <cstddef>
#include <functional>

#include "bmri/core.hpp"

namespace bmri {

/// Unitary 2-D DFT (1/sqrt(N) in both directions), DC at index (0,0).
ComplexImage dft2(const ComplexImage &u);
ComplexImage idft2(const ComplexImage &y);

/// Forward differences with replicate (Neumann) boundary. Component 0 is
/// the vertical difference u(i+1,j) - u(i,j), component 1 the horizontal
/// difference u(i,j+1) - u(i,j); the last row/column difference is zero.
MultiField grad_apply(const ComplexImage &u);
/// Exact adjoint of grad_apply (negative discrete divergence).
ComplexImage grad_adjoint(const MultiField &z);

/// Daubechies-4 (8-tap) low-pass analysis filter.
const std::array<double, 8> &db4_lowpass() noexcept;

/// Orthonormal periodized Daubechies-4 transform of both planes, packed
/// into one component in the usual quadrant layout (coarsest LL top-left).
MultiField dwt2(const ComplexImage &u, int levels);
ComplexImage idwt2(const MultiField &z, int levels);

/// The analysis operator A of the regularizer J(Au).
class AnalysisOp {
 public:
  enum class Kind { kGradient, kWavelet, kIdentity };

  static AnalysisOp gradient() { return AnalysisOp(Kind::kGradient, 0); }
  static AnalysisOp wavelet(int levels);
  static AnalysisOp identity() { return AnalysisOp(Kind::kIdentity, 0); }

  Kind kind() const noexcept { return kind_; }
  int levels() const noexcept { return levels_; }
  /// Component count M.
  std::size_t components() const noexcept {
    return kind_ == Kind::kGradient ? 2 : 1;
  }
  /// Upper bound on the operator norm: sqrt(8) for the gradient, 1 otherwise.
  double norm_bound() const noexcept;

  MultiField apply(const ComplexImage &u) const;
  ComplexImage adjoint(const MultiField &z) const;

 private:
  AnalysisOp(Kind kind, int levels) : kind_(kind), levels_(levels) { }

  Kind kind_;
  int levels_;
};

const char *to_string(AnalysisOp::Kind kind) noexcept;

/// Power iteration on A*A. Returns ||A x_k|| for the normalized iterate
/// x_k, which is nondecreasing in the iteration count.
double power_norm(const std::function<MultiField(const ComplexImage &)> &apply,
                  const std::function<ComplexImage(const MultiField &)> &adjoint,
                  std::size_t height, std::size_t width, int iters, Rng &rng);

double power_norm(const AnalysisOp &op, std::size_t height, std::size_t width,
                  int iters, Rng &rng);

}  // namespace bmri
