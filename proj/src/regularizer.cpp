//
// bmri - Copyright 2026 The bmri Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "bmri/regularizer.hpp"

#include <cmath>
#include <sstream>

#include "bmri/kernels.hpp"

namespace bmri {

RhoSpec RhoSpec::huber(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw DomainError("Huber gamma must be positive");
  return { Kind::kHuberCubic, gamma };
}

std::string to_string(const RhoSpec &spec) {
  switch (spec.kind) {
  case RhoSpec::Kind::kHuberCubic: {
    std::ostringstream os;
    os << "huber(" << spec.gamma << ")";
    return os.str();
  }
  case RhoSpec::Kind::kQuadratic:
    return "quadratic";
  case RhoSpec::Kind::kZero:
    return "zero";
  }
  return "?";
}

namespace {
  void require_nonneg(double x) {
    if (!(x >= 0.0))
      throw DomainError("rho is defined on [0, inf)");
  }
}  // namespace

double rho(const RhoSpec &spec, double x) {
  require_nonneg(x);
  switch (spec.kind) {
  case RhoSpec::Kind::kHuberCubic: {
    const double g = spec.gamma;
    if (x <= g)
      return -x * x * x / (3.0 * g * g) + x * x / g;
    return x - g / 3.0;
  }
  case RhoSpec::Kind::kQuadratic:
    return 0.5 * x * x;
  case RhoSpec::Kind::kZero:
    return 0.0;
  }
  return 0.0;
}

double rho_prime(const RhoSpec &spec, double x) {
  require_nonneg(x);
  switch (spec.kind) {
  case RhoSpec::Kind::kHuberCubic: {
    const double g = spec.gamma;
    if (x <= g)
      return -x * x / (g * g) + 2.0 * x / g;
    return 1.0;
  }
  case RhoSpec::Kind::kQuadratic:
    return x;
  case RhoSpec::Kind::kZero:
    return 0.0;
  }
  return 0.0;
}

double phi(const RhoSpec &spec, double x) {
  require_nonneg(x);
  switch (spec.kind) {
  case RhoSpec::Kind::kHuberCubic: {
    const double g = spec.gamma;
    return x <= g ? (2.0 - x / g) / g : 1.0 / x;
  }
  case RhoSpec::Kind::kQuadratic:
    return 1.0;
  case RhoSpec::Kind::kZero:
    return 0.0;
  }
  return 0.0;
}

double psi(const RhoSpec &spec, double x) {
  require_nonneg(x);
  if (x == 0.0)
    return 0.0;
  switch (spec.kind) {
  case RhoSpec::Kind::kHuberCubic: {
    const double g = spec.gamma;
    return x <= g ? -1.0 / (g * g * x) : -1.0 / (x * x * x);
  }
  case RhoSpec::Kind::kQuadratic:
  case RhoSpec::Kind::kZero:
    return 0.0;
  }
  return 0.0;
}

double J_eval(const RhoSpec &spec, const MultiField &z) {
  if (spec.is_zero())
    return 0.0;
  const RealImage mag = pixel_abs(z);
  double s = 0.0;
  for (double m : mag.data)
    s += rho(spec, m);
  return s;
}

MultiField J_grad(const RhoSpec &spec, const MultiField &z) {
  switch (spec.kind) {
  case RhoSpec::Kind::kZero: {
    MultiField out = z;
    out.set_zero();
    return out;
  }
  case RhoSpec::Kind::kQuadratic:
    return z;
  case RhoSpec::Kind::kHuberCubic:
    break;
  }
  const auto &k = kernels::active();
  RealImage weight = pixel_abs(z);
  k.huber_phi(weight.data.data(), spec.gamma, weight.data.data(),
              weight.size());
  MultiField out = z;
  for (auto &c : out.components) {
    k.mul(weight.data.data(), c.re_data(), c.re_data(), c.size());
    k.mul(weight.data.data(), c.im_data(), c.im_data(), c.size());
  }
  return out;
}

MultiField J_hess_apply(const RhoSpec &spec, const MultiField &z,
                        const MultiField &w) {
  if (!z.same_shape(w))
    throw DimensionError("Hessian point and direction differ in shape");
  switch (spec.kind) {
  case RhoSpec::Kind::kZero: {
    MultiField out = w;
    out.set_zero();
    return out;
  }
  case RhoSpec::Kind::kQuadratic:
    return w;
  case RhoSpec::Kind::kHuberCubic:
    break;
  }
  const auto &k = kernels::active();
  const std::size_t n = z[0].size();
  const RealImage mag = pixel_abs(z);
  std::vector<double> ph(n), ps(n), zw(n, 0.0);
  k.huber_phi(mag.data.data(), spec.gamma, ph.data(), n);
  k.huber_psi(mag.data.data(), spec.gamma, ps.data(), n);
  for (std::size_t p = 0; p < z.count(); ++p) {
    k.mul_add(z[p].re_data(), w[p].re_data(), zw.data(), n);
    k.mul_add(z[p].im_data(), w[p].im_data(), zw.data(), n);
  }
  k.mul(ps.data(), zw.data(), zw.data(), n);
  MultiField out(z.count(), z.height(), z.width());
  for (std::size_t p = 0; p < z.count(); ++p) {
    k.mul(ph.data(), w[p].re_data(), out[p].re_data(), n);
    k.mul_add(zw.data(), z[p].re_data(), out[p].re_data(), n);
    k.mul(ph.data(), w[p].im_data(), out[p].im_data(), n);
    k.mul_add(zw.data(), z[p].im_data(), out[p].im_data(), n);
  }
  return out;
}

double smoothness_bound(const RhoSpec &spec, std::size_t components) {
  if (components < 1)
    throw DomainError("component count must be positive");
  double sup_phi = 0.0;
  double sup_dphi_x = 0.0;
  switch (spec.kind) {
  case RhoSpec::Kind::kHuberCubic:
    // phi(x) = 2/g - x/g^2 on [0, g], 1/x beyond: max 2/g at 0.
    // |phi'(x)| x = x/g^2 on [0, g], 1/x beyond: max 1/g at x = g.
    sup_phi = 2.0 / spec.gamma;
    sup_dphi_x = 1.0 / spec.gamma;
    break;
  case RhoSpec::Kind::kQuadratic:
    sup_phi = 1.0;
    break;
  case RhoSpec::Kind::kZero:
    break;
  }
  const double m = static_cast<double>(components);
  return std::sqrt(2.0) * m * std::sqrt(m) * sup_dphi_x + sup_phi;
}

double prox_magnitude(const RhoSpec &spec, double m, double t) {
  if (!(m >= 0.0) || !(t >= 0.0))
    throw DomainError("prox magnitude and step must be nonnegative");
  switch (spec.kind) {
  case RhoSpec::Kind::kHuberCubic: {
    const double g = spec.gamma;
    const double a = 1.0 + 2.0 * t / g;
    const double disc = a * a - 4.0 * t * m / (g * g);
    if (disc >= 0.0) {
      const double c = 2.0 * m / (a + std::sqrt(disc));
      if (c <= g)
        return c;
    }
    return m - t;
  }
  case RhoSpec::Kind::kQuadratic:
    return m / (1.0 + t);
  case RhoSpec::Kind::kZero:
    return m;
  }
  return m;
}

MultiField prox_F2(const RhoSpec &spec, const MultiField &z, double t) {
  if (!(t >= 0.0))
    throw DomainError("prox step must be nonnegative");
  if (spec.is_zero() || t == 0.0)
    return z;
  MultiField out = z;
  if (spec.kind == RhoSpec::Kind::kQuadratic) {
    out *= 1.0 / (1.0 + t);
    return out;
  }
  const auto &k = kernels::active();
  RealImage factor = pixel_abs(z);
  k.huber_prox_factor(factor.data.data(), spec.gamma, t, factor.data.data(),
                      factor.size());
  for (auto &c : out.components) {
    k.mul(factor.data.data(), c.re_data(), c.re_data(), c.size());
    k.mul(factor.data.data(), c.im_data(), c.im_data(), c.size());
  }
  return out;
}

}  // namespace bmri
