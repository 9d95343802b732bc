//
// bmri - Copyright 2026 The bmri Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <vector>

#include "bmri/core.hpp"
#include "bmri/lower_level.hpp"

namespace bmri {

/// D_u E(u) = F^{-1} S^2 (F u - y) + alpha A*(phi(|Au|) Au) + eps u
ComplexImage E_grad(const ComplexImage &u, const LowerLevelProblem &problem);

/// D^2_u E at a fixed point, with A u and the pixelwise phi/psi cached.
class HessianOperator {
 public:
  HessianOperator(const ComplexImage &u_hat, const LowerLevelProblem &problem);

  ComplexImage apply(const ComplexImage &w) const;

  const ComplexImage &u_hat() const noexcept { return u_hat_; }
  const LowerLevelProblem &problem() const noexcept { return *problem_; }
  const MultiField &au_hat() const noexcept { return au_; }

 private:
  ComplexImage u_hat_;
  const LowerLevelProblem *problem_;
  bool reg_active_;
  MultiField au_;
  std::vector<double> phi_;
  std::vector<double> psi_;
  std::vector<double> w2_;
};

inline ComplexImage E_hess_apply(const HessianOperator &H,
                                 const ComplexImage &w) {
  return H.apply(w);
}

/// D_{p,u}E(u_hat) w as a vector of length n + 1 (weights, then alpha).
std::vector<double> E_mixed_apply(const ComplexImage &u_hat,
                                  const LowerLevelProblem &problem,
                                  const ComplexImage &w);

struct CgResult {
  ComplexImage x;
  int iters = 0;
  /// Relative residual ||H x_k - b|| / ||b|| after each iteration.
  std::vector<double> residuals;
};

/// Conjugate gradient on H x = b, stopping at ||Hx - b|| <= tol ||b||.
CgResult cg_solve(const HessianOperator &H, const ComplexImage &b, double tol,
                  int maxit = 2000);

/// -D_{p,u}E [D^2_u E]^{-1} loss_grad, the gradient of the reduced loss.
std::vector<double> implicit_grad(const ComplexImage &u_hat,
                                  const LowerLevelProblem &problem,
                                  const ComplexImage &loss_grad, double tol,
                                  int maxit = 2000);

}  // namespace bmri
