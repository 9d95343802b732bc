//
// bmri - Copyright 2026 The bmri Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <functional>
#include <optional>
#include <ostream>

#include "bmri/core.hpp"
#include "bmri/regularizer.hpp"

namespace bmri {

/// Reconstruction energy for full k-space data y:
///   E(u) = 1/2 ||S(p)(F u - y)||^2 + alpha J(A u) + eps/2 ||u||^2
struct LowerLevelProblem {
  ComplexImage y;
  ParamVector params;
  Regularizer reg;
  double eps = 1e-4;

  void validate() const;
  /// True when the alpha J(Au) term vanishes identically.
  bool regularizer_inactive() const noexcept {
    return reg.rho.is_zero() || params.alpha == 0.0;
  }
};

double energy(const ComplexImage &u, const LowerLevelProblem &problem);

/// Step sizes of the linearly convergent primal-dual iteration.
struct PdhgParams {
  double mu = 0.0;
  double tau = 0.0;
  double sigma = 0.0;
  double theta = 0.0;
  /// Smoothness bound of F = F1 + F2.
  double eta = 0.0;
};

/// Floor applied to eta when the problem has no smooth part at all.
inline constexpr double kEtaFloor = 1e-12;

PdhgParams pdhg_params(const LowerLevelProblem &problem);

/// prox of tau F1, F1(v) = 1/2 ||S(F v - y)||^2:
/// F^{-1} (I + tau S^2)^{-1} (F v + tau S^2 y)
ComplexImage prox_F1(const ComplexImage &v, double tau, const ComplexImage &y,
                     const ParamVector &params);
/// prox of tau G, G(u) = eps/2 ||u||^2
ComplexImage prox_G(const ComplexImage &u, double tau, double eps);

struct SolveState {
  ComplexImage u;
  ComplexImage v1;
  MultiField v2;
  ComplexImage u_bar;
  int iters = 0;
  double rel_change = 0.0;
};

struct SolveOptions {
  double tol = 1e-9;
  int maxit = 20000;
  /// When set, one CSV row (iter,rel_change,energy) per iteration.
  std::ostream *trace = nullptr;
  /// Called with every new primal iterate.
  std::function<void(int, const ComplexImage &)> observer;
};

/// Zero-filling reconstruction F^{-1}(S^2 y).
ComplexImage zero_filling(const LowerLevelProblem &problem);

/// Primal-dual hybrid gradient on min_u F(Ku) + G(u), K = (I, A). Starts
/// from `warm` when given, otherwise from the zero-filling reconstruction.
SolveState solve(const LowerLevelProblem &problem,
                 const SolveState *warm = nullptr,
                 const SolveOptions &options = {});

}  // namespace bmri
