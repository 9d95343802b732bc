//
// bmri - Copyright 2026 The bmri Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <string>

#include "bmri/core.hpp"
#include "bmri/linops.hpp"

namespace bmri {

/// The scalar penalty rho applied to pixel magnitudes.
///
/// kHuberCubic is the C^2 cubic/linear smoothing of |x| with knee gamma:
///   rho(x) = -x^3/(3 gamma^2) + x^2/gamma   for x <= gamma
///   rho(x) = x - gamma/3                    otherwise.
/// kQuadratic is x^2/2 and kZero turns the regularizer off.
struct RhoSpec {
  enum class Kind { kHuberCubic, kQuadratic, kZero };

  Kind kind = Kind::kHuberCubic;
  double gamma = 0.0;

  static RhoSpec huber(double gamma);
  static RhoSpec quadratic() { return { Kind::kQuadratic, 0.0 }; }
  static RhoSpec zero() { return { Kind::kZero, 0.0 }; }

  bool is_zero() const noexcept { return kind == Kind::kZero; }
};

std::string to_string(const RhoSpec &spec);

double rho(const RhoSpec &spec, double x);
double rho_prime(const RhoSpec &spec, double x);
/// rho'(x)/x, extended continuously to x = 0.
double phi(const RhoSpec &spec, double x);
/// phi'(x)/x for x > 0 and 0 at x = 0.
double psi(const RhoSpec &spec, double x);

/// J(z) = sum_i rho(|z|_i)
double J_eval(const RhoSpec &spec, const MultiField &z);
/// DJ(z) = phi(|z|) * z, per component and per real/imaginary part.
MultiField J_grad(const RhoSpec &spec, const MultiField &z);
/// D^2J(z) w = psi(|z|) z <z, w>_pixel + phi(|z|) w
MultiField J_hess_apply(const RhoSpec &spec, const MultiField &z,
                        const MultiField &w);

/// Lipschitz constant of DJ for M components:
/// sqrt(2) M^{3/2} sup(|phi'(x)| x) + sup |phi(x)|, suprema in closed form.
double smoothness_bound(const RhoSpec &spec, std::size_t components);

/// Pixelwise prox of t * rho(|.|): C(|z_i|, t) z_i / |z_i| where C solves
/// (1 + t phi(C)) C = |z_i|.
MultiField prox_F2(const RhoSpec &spec, const MultiField &z, double t);

/// Scalar solution C of (1 + t phi(C)) C = m.
double prox_magnitude(const RhoSpec &spec, double m, double t);

/// A penalty rho paired with the analysis operator it is applied through.
struct Regularizer {
  RhoSpec rho = RhoSpec::zero();
  AnalysisOp op = AnalysisOp::identity();
};

}  // namespace bmri
