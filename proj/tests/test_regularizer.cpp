//
// bmri - Copyright 2026 The bmri Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <doctest.h>

#include <cmath>
#include <vector>

#include "bmri/regularizer.hpp"
#include "helpers.hpp"

using namespace bmri;

namespace {
const RhoSpec kSpecs[] = { RhoSpec::huber(0.05), RhoSpec::quadratic(),
                           RhoSpec::zero() };

// argmin_C (C - m)^2/2 + t rho(C) on [0, m]: grid, then ternary refinement
double brute_prox(const RhoSpec &spec, double m, double t) {
  auto obj = [&](double c) { return 0.5 * (c - m) * (c - m) + t * rho(spec, c); };
  const int n = 20000;
  double best = 0.0, fbest = obj(0.0);
  for (int i = 1; i <= n; ++i) {
    const double c = m * double(i) / n;
    const double f = obj(c);
    if (f < fbest) {
      fbest = f;
      best = c;
    }
  }
  double lo = std::max(0.0, best - m / n), hi = std::min(m, best + m / n);
  for (int it = 0; it < 200; ++it) {
    const double a = lo + (hi - lo) / 3.0, b = hi - (hi - lo) / 3.0;
    if (obj(a) <= obj(b))
      hi = b;
    else
      lo = a;
  }
  return 0.5 * (lo + hi);
}

MultiField operator-(MultiField a, const MultiField &b) {
  a -= b;
  return a;
}
}  // namespace

TEST_CASE("rho and derivatives at reference points") {
  const RhoSpec h = RhoSpec::huber(0.1);
  const double g = 0.1;
  CHECK(rho(h, g) == doctest::Approx(2.0 * g / 3.0).epsilon(1e-14));
  CHECK(-g * g * g / (3 * g * g) + g * g / g == doctest::Approx(g - g / 3.0));
  CHECK(rho_prime(h, 0.0) == 0.0);
  CHECK(rho_prime(h, g) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rho(RhoSpec::quadratic(), 2.0) == 2.0);
  CHECK(rho_prime(RhoSpec::quadratic(), 2.0) == 2.0);
  CHECK(rho(RhoSpec::zero(), 5.0) == 0.0);
  CHECK_THROWS_AS(rho(h, -1.0), DomainError);
  CHECK_THROWS_AS(RhoSpec::huber(0.0), DomainError);

  CHECK(phi(h, 0.0) == doctest::Approx(2.0 / g));
  CHECK(phi(h, g) == doctest::Approx(1.0 / g));
  CHECK(phi(h, std::nextafter(g, 1.0)) == doctest::Approx(1.0 / g));
  CHECK(phi(RhoSpec::quadratic(), 0.3) == 1.0);
  CHECK(psi(RhoSpec::quadratic(), 0.3) == 0.0);
  for (const auto &s : kSpecs)
    CHECK(psi(s, 0.0) == 0.0);
}

TEST_CASE("rho derivatives match finite differences") {
  const RhoSpec h = RhoSpec::huber(0.1);
  const double d = 1e-6;
  for (double x : { 0.01, 0.05, 0.099, 0.101, 0.3, 2.0 }) {
    CAPTURE(x);
    const double fd = (rho(h, x + d) - rho(h, x - d)) / (2 * d);
    CHECK(std::abs(fd - rho_prime(h, x)) < 1e-8);
    CHECK(phi(h, x) == doctest::Approx(rho_prime(h, x) / x).epsilon(1e-14));
    const double dphi = (phi(h, x + d) - phi(h, x - d)) / (2 * d);
    CHECK(std::abs(dphi / x - psi(h, x)) < 1e-5 * std::max(1.0, std::abs(psi(h, x))));
  }
}

TEST_CASE("J_eval") {
  Rng rng(3);
  const MultiField z = test::random_field(rng, 2, 6, 5);
  CHECK(J_eval(kSpecs[0], MultiField(2, 6, 5)) == 0.0);
  CHECK(J_eval(RhoSpec::zero(), z) == 0.0);
  for (const auto &s : kSpecs) {
    double ref = 0.0;
    for (std::size_t i = 0; i < 30; ++i) {
      double m2 = 0.0;
      for (std::size_t p = 0; p < 2; ++p)
        m2 += z[p].re()[i] * z[p].re()[i] + z[p].im()[i] * z[p].im()[i];
      ref += rho(s, std::sqrt(m2));
    }
    CHECK(std::abs(J_eval(s, z) - ref) < 1e-12 * std::max(1.0, ref));
  }
}

TEST_CASE("J_grad matches finite differences") {
  Rng rng(4);
  CHECK(norm(J_grad(kSpecs[0], MultiField(1, 8, 8))) == 0.0);
  {
    const MultiField z = test::random_field(rng, 2, 4, 4);
    const MultiField g = J_grad(RhoSpec::quadratic(), z);
    CHECK(norm(g - z) == 0.0);
  }
  for (const auto &s : kSpecs) {
    for (std::size_t m : { 1u, 2u }) {
      for (int probe = 0; probe < 100; ++probe) {
        const MultiField z = test::random_field(rng, m, 8, 8, 0.05);
        const MultiField d = test::random_field(rng, m, 8, 8, 1.0);
        const double h = 1e-6;
        MultiField zp = z, zm = z;
        axpy(h, d, zp);
        axpy(-h, d, zm);
        const double fd = (J_eval(s, zp) - J_eval(s, zm)) / (2 * h);
        const double an = dot(J_grad(s, z), d);
        CHECK(std::abs(fd - an) <= 1e-6 * std::max(std::abs(an), 1e-3));
      }
    }
  }
}

TEST_CASE("J_hess_apply: finite differences, symmetry, PSD") {
  Rng rng(5);
  for (const auto &s : kSpecs) {
    CAPTURE(to_string(s));
    for (std::size_t m : { 1u, 2u }) {
      const MultiField z0 = test::random_field(rng, m, 4, 4);
      CHECK(norm(J_hess_apply(s, z0, MultiField(m, 4, 4))) == 0.0);
      for (int probe = 0; probe < 100; ++probe) {
        const MultiField z = test::random_field(rng, m, 6, 6, 0.05);
        const MultiField w = test::random_field(rng, m, 6, 6);
        const MultiField v = test::random_field(rng, m, 6, 6);
        const MultiField hw = J_hess_apply(s, z, w);
        const double h = 1e-5;
        MultiField zp = z, zm = z;
        axpy(h, w, zp);
        axpy(-h, w, zm);
        MultiField fd = J_grad(s, zp) - J_grad(s, zm);
        fd *= 1.0 / (2 * h);
        CHECK(norm(fd - hw) <= 1e-5 * std::max(norm(hw), 1e-8));
        const double a = dot(hw, v), b = dot(w, J_hess_apply(s, z, v));
        CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(a)));
        CHECK(dot(w, hw) >= -1e-12);
      }
    }
  }
  {
    Rng r2(6);
    const MultiField z = test::random_field(r2, 2, 3, 3);
    const MultiField w = test::random_field(r2, 2, 3, 3);
    CHECK(norm(J_hess_apply(RhoSpec::quadratic(), z, w) - w) == 0.0);
    CHECK_THROWS_AS(J_hess_apply(RhoSpec::quadratic(), z, MultiField(1, 3, 3)),
                    DimensionError);
  }
}

TEST_CASE("smoothness bound") {
  CHECK(smoothness_bound(RhoSpec::zero(), 2) == 0.0);
  CHECK(smoothness_bound(RhoSpec::quadratic(), 1) == 1.0);
  CHECK(smoothness_bound(RhoSpec::huber(0.01), 2)
        == doctest::Approx(std::sqrt(2.0) * std::pow(2.0, 1.5) * 100.0 + 200.0)
               .epsilon(1e-14));
  CHECK(smoothness_bound(RhoSpec::huber(0.01), 2)
        == doctest::Approx(600.0).epsilon(1e-12));
  CHECK_THROWS_AS(smoothness_bound(RhoSpec::zero(), 0), DomainError);

  // the suprema by dense sampling of both branches
  const double g = 0.2;
  const RhoSpec h = RhoSpec::huber(g);
  double sup_phi = 0.0, sup_dphi_x = 0.0;
  for (int i = 0; i <= 200000; ++i) {
    const double x = 5.0 * g * i / 200000.0;
    sup_phi = std::max(sup_phi, std::abs(phi(h, x)));
    sup_dphi_x = std::max(sup_dphi_x, std::abs(psi(h, x)) * x * x);
  }
  CHECK(sup_phi == doctest::Approx(2.0 / g).epsilon(1e-12));
  CHECK(sup_dphi_x == doctest::Approx(1.0 / g).epsilon(1e-9));

  Rng rng(7);
  for (const auto &s : { RhoSpec::huber(0.03), RhoSpec::quadratic() })
    for (std::size_t m : { 1u, 2u }) {
      const double L = smoothness_bound(s, m);
      for (int probe = 0; probe < 100; ++probe) {
        const MultiField z = test::random_field(rng, m, 5, 5, 0.03);
        const MultiField w = test::random_field(rng, m, 5, 5);
        CHECK(norm(J_hess_apply(s, z, w)) <= L * norm(w) * (1 + 1e-12));
      }
    }
}

TEST_CASE("prox_magnitude against brute force") {
  const RhoSpec h = RhoSpec::huber(0.1);
  for (double m : { 0.0, 0.001, 0.02, 0.05, 0.1, 0.15, 0.3, 1.0 }) {
    CAPTURE(m);
    const double c = prox_magnitude(h, m, 0.05);
    CHECK(std::abs(c - brute_prox(h, m, 0.05)) < 1e-6);
    CHECK(std::abs((1.0 + 0.05 * phi(h, c)) * c - m) < 1e-10);
  }
  CHECK(prox_magnitude(RhoSpec::quadratic(), 2.0, 1.0) == 1.0);
  CHECK(prox_magnitude(RhoSpec::zero(), 2.0, 1.0) == 2.0);
  CHECK_THROWS_AS(prox_magnitude(h, -1.0, 1.0), DomainError);
}

TEST_CASE("prox_F2") {
  Rng rng(8);
  const MultiField z = test::random_field(rng, 2, 6, 6, 0.2);
  CHECK(norm(prox_F2(kSpecs[0], z, 0.0) - z) == 0.0);
  CHECK(norm(prox_F2(RhoSpec::zero(), z, 3.0) - z) == 0.0);
  {
    MultiField half = z;
    half *= 0.5;
    CHECK(norm(prox_F2(RhoSpec::quadratic(), z, 1.0) - half) < 1e-15);
  }
  CHECK_THROWS_AS(prox_F2(kSpecs[0], z, -1.0), DomainError);

  const RhoSpec h = RhoSpec::huber(0.1);
  const MultiField p = prox_F2(h, z, 0.05);
  const RealImage mz = pixel_abs(z), mp = pixel_abs(p);
  for (std::size_t i = 0; i < mz.size(); ++i) {
    const double c = mp.data[i];
    CHECK(std::abs((1.0 + 0.05 * phi(h, c)) * c - mz.data[i]) < 1e-10);
    // direction preserved
    for (std::size_t q = 0; q < 2; ++q)
      CHECK(std::abs(p[q].re()[i] * mz.data[i] - z[q].re()[i] * c) < 1e-12);
  }

  // zero pixels stay zero
  const MultiField zero(2, 3, 3);
  CHECK(norm(prox_F2(h, zero, 0.5)) == 0.0);

  for (int probe = 0; probe < 100; ++probe) {
    const MultiField a = test::random_field(rng, 2, 4, 4, 0.1);
    const MultiField b = test::random_field(rng, 2, 4, 4, 0.1);
    CHECK(norm(prox_F2(h, a, 0.07) - prox_F2(h, b, 0.07))
          <= norm(a - b) * (1 + 1e-12));
  }
}
