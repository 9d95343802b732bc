//
// bmri - Copyright 2026 The bmri Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <doctest.h>

#include <cmath>
#include <vector>

#include "bmri/core.hpp"
#include "bmri/kernels.hpp"
#include "bmri/regularizer.hpp"

using namespace bmri;
namespace k = bmri::kernels;

namespace {
std::vector<double> rand_vec(Rng &rng, std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (auto &x : v)
    x = lo + (hi - lo) * rng.uniform();
  return v;
}

bool close(double a, double b, double tol = 1e-13) {
  return std::abs(a - b) <= tol * std::max(1.0, std::abs(b));
}

bool all_close(const std::vector<double> &a, const std::vector<double> &b,
               double tol = 1e-13) {
  if (a.size() != b.size())
    return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!close(a[i], b[i], tol))
      return false;
  return true;
}

const std::size_t kLengths[] = { 0, 1, 3, 4, 5, 7, 8, 17, 1024, 1031 };
}  // namespace

TEST_CASE("scalar table matches closed forms") {
  const k::Table &s = k::scalar_table();
  Rng rng(1);
  const auto a = rand_vec(rng, 9, -2, 2), b = rand_vec(rng, 9, -2, 2);
  double d = 0.0;
  for (std::size_t i = 0; i < 9; ++i)
    d += a[i] * b[i];
  CHECK(close(s.dot(a.data(), b.data(), 9), d));

  const RhoSpec h = RhoSpec::huber(0.3);
  const auto mag = rand_vec(rng, 50, 0.0, 1.0);
  std::vector<double> ph(50), ps(50), pf(50);
  s.huber_phi(mag.data(), 0.3, ph.data(), 50);
  s.huber_psi(mag.data(), 0.3, ps.data(), 50);
  s.huber_prox_factor(mag.data(), 0.3, 0.7, pf.data(), 50);
  for (std::size_t i = 0; i < 50; ++i) {
    CHECK(close(ph[i], phi(h, mag[i])));
    CHECK(close(ps[i], psi(h, mag[i])));
    CHECK(close(pf[i] * mag[i], prox_magnitude(h, mag[i], 0.7), 1e-12));
  }
}

TEST_CASE("isa parsing and selection") {
  CHECK(k::parse_isa("scalar") == k::Isa::kScalar);
  CHECK(k::parse_isa("avx2") == k::Isa::kAvx2);
  CHECK_THROWS_AS(k::parse_isa("sse9"), ConfigError);
  const k::Isa before = k::active().isa;
  k::select(k::Isa::kScalar);
  CHECK(k::active().isa == k::Isa::kScalar);
  if (k::avx2_table() != nullptr && k::cpu_has_avx2()) {
    k::select(k::Isa::kAvx2);
    CHECK(k::active().isa == k::Isa::kAvx2);
  }
  k::select(before);
}

TEST_CASE("avx2 kernels agree with the scalar reference") {
  const k::Table *v = k::avx2_table();
  if (v == nullptr || !k::cpu_has_avx2()) {
    MESSAGE("AVX2 variants unavailable on this host");
    return;
  }
  const k::Table &s = k::scalar_table();
  Rng rng(42);
  for (std::size_t n : kLengths) {
    CAPTURE(n);
    const auto a = rand_vec(rng, n, -3, 3), b = rand_vec(rng, n, -3, 3);
    const auto w = rand_vec(rng, n, 0, 1);
    CHECK(close(v->dot(a.data(), b.data(), n), s.dot(a.data(), b.data(), n),
                1e-12));

    auto y1 = b, y2 = b;
    s.axpy(0.37, a.data(), y1.data(), n);
    v->axpy(0.37, a.data(), y2.data(), n);
    CHECK(all_close(y1, y2));

    y1 = a, y2 = a;
    s.scale(-1.5, y1.data(), n);
    v->scale(-1.5, y2.data(), n);
    CHECK(all_close(y1, y2));

    std::vector<double> o1(n), o2(n);
    s.sub(a.data(), b.data(), o1.data(), n);
    v->sub(a.data(), b.data(), o2.data(), n);
    CHECK(all_close(o1, o2));

    s.mul(a.data(), b.data(), o1.data(), n);
    v->mul(a.data(), b.data(), o2.data(), n);
    CHECK(all_close(o1, o2));

    y1 = w, y2 = w;
    s.mul_add(a.data(), b.data(), y1.data(), n);
    v->mul_add(a.data(), b.data(), y2.data(), n);
    CHECK(all_close(y1, y2));

    y1 = w, y2 = w;
    s.add_sq(a.data(), y1.data(), n);
    v->add_sq(a.data(), y2.data(), n);
    CHECK(all_close(y1, y2));

    y1 = w, y2 = w;
    s.sqrt_inplace(y1.data(), n);
    v->sqrt_inplace(y2.data(), n);
    CHECK(all_close(y1, y2));

    s.data_prox(a.data(), b.data(), w.data(), 2.5, o1.data(), n);
    v->data_prox(a.data(), b.data(), w.data(), 2.5, o2.data(), n);
    CHECK(all_close(o1, o2));

    // magnitudes straddling the knee, including exact zeros and the knee
    auto mag = rand_vec(rng, n, 0, 0.5);
    if (n > 2) {
      mag[0] = 0.0;
      mag[1] = 0.2;
    }
    for (double t : { 0.0, 0.05, 3.0 }) {
      s.huber_prox_factor(mag.data(), 0.2, t, o1.data(), n);
      v->huber_prox_factor(mag.data(), 0.2, t, o2.data(), n);
      CHECK(all_close(o1, o2, 1e-12));
    }
    s.huber_phi(mag.data(), 0.2, o1.data(), n);
    v->huber_phi(mag.data(), 0.2, o2.data(), n);
    CHECK(all_close(o1, o2));
    s.huber_psi(mag.data(), 0.2, o1.data(), n);
    v->huber_psi(mag.data(), 0.2, o2.data(), n);
    CHECK(all_close(o1, o2, 1e-12));
  }
}
