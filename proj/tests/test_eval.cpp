//
// bmri - Copyright 2026 The bmri Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <doctest.h>

#include <cmath>
#include <limits>

#include "bmri/data_io.hpp"
#include "bmri/eval.hpp"
#include "helpers.hpp"

using namespace bmri;

namespace {
// Straightforward SSIM: explicit 2-D Gaussian, local statistics as
// weighted sums, mean over every fully covered window position.
double ssim_reference(const RealImage &x, const RealImage &y) {
  double g[11][11], gs = 0.0;
  for (int i = 0; i < 11; ++i)
    for (int j = 0; j < 11; ++j) {
      g[i][j] = std::exp(-((i - 5) * (i - 5) + (j - 5) * (j - 5)) / 4.5);
      gs += g[i][j];
    }
  double L = 0.0;
  for (double v : y.data)
    L = std::max(L, v);
  const double k1 = 0.01 * L, k2 = 0.03 * L;
  double acc = 0.0;
  int count = 0;
  for (std::size_t r = 0; r + 11 <= x.height; ++r)
    for (std::size_t c = 0; c + 11 <= x.width; ++c) {
      double mx = 0, my = 0;
      for (int i = 0; i < 11; ++i)
        for (int j = 0; j < 11; ++j) {
          mx += g[i][j] / gs * x(r + i, c + j);
          my += g[i][j] / gs * y(r + i, c + j);
        }
      double vx = 0, vy = 0, cv = 0;
      for (int i = 0; i < 11; ++i)
        for (int j = 0; j < 11; ++j) {
          const double dx = x(r + i, c + j) - mx, dy = y(r + i, c + j) - my;
          vx += g[i][j] / gs * dx * dx;
          vy += g[i][j] / gs * dy * dy;
          cv += g[i][j] / gs * dx * dy;
        }
      acc += (2 * mx * my + k1 * k1) * (2 * cv + k2 * k2)
             / ((mx * mx + my * my + k1 * k1) * (vx + vy + k2 * k2));
      ++count;
    }
  return acc / count;
}

RealImage checkerboard(std::size_t n) {
  RealImage b(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      b(r, c) = ((r / 2 + c / 2) % 2 == 0) ? 1.0 : 0.0;
  return b;
}

RealImage random_plane(Rng &rng, std::size_t h, std::size_t w) {
  RealImage p(h, w);
  for (auto &v : p.data)
    v = rng.uniform();
  return p;
}
}  // namespace

TEST_CASE("ssim") {
  Rng rng(1);
  const RealImage a = random_plane(rng, 20, 24);
  CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-14));
  const RealImage b = checkerboard(16);
  RealImage inv = b;
  for (auto &v : inv.data)
    v = 1.0 - v;
  const double s = ssim(inv, b);
  CHECK(s < 0.5);
  CHECK(s == doctest::Approx(ssim_reference(inv, b)).epsilon(1e-10));
  const RealImage c = random_plane(rng, 20, 24);
  CHECK(ssim(c, a) == doctest::Approx(ssim_reference(c, a)).epsilon(1e-10));
  CHECK_THROWS_AS(ssim(a, RealImage(20, 23)), DimensionError);
  CHECK_THROWS_AS(ssim(RealImage(8, 8), RealImage(8, 8)), DimensionError);

  // more noise, lower SSIM on average
  Rng pr(2);
  const ComplexImage ph = make_phantom(pr, 32, 32, 5);
  double prev = 1.0;
  for (double sigma : { 0.02, 0.05, 0.1, 0.2 }) {
    double m = 0.0;
    for (int seed = 0; seed < 8; ++seed) {
      Rng nr(100 + seed);
      ComplexImage noisy = ph + cgauss_sample(nr, 32, 32, sigma);
      m += ssim(noisy, ph) / 8.0;
    }
    CHECK(m < prev);
    prev = m;
  }
}

TEST_CASE("psnr") {
  RealImage ref(2, 2);
  ref.data = { 0.0, 2.0, 1.0, 0.5 };
  CHECK(psnr(ref, ref) == std::numeric_limits<double>::infinity());
  RealImage u = ref;
  for (auto &v : u.data)
    v += 2.0;  // MSE = L^2
  CHECK(psnr(u, ref) == doctest::Approx(0.0).epsilon(1e-12));
  RealImage h1 = ref, h2 = ref;
  h1.data[0] += 0.4;
  h2.data[0] += 0.4 / std::sqrt(2.0);
  CHECK(psnr(h2, ref) - psnr(h1, ref) == doctest::Approx(10 * std::log10(2.0)));
  Rng rng(3);
  const RealImage x = random_plane(rng, 9, 7), y = random_plane(rng, 9, 7);
  double mse = 0, L = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mse += (x.data[i] - y.data[i]) * (x.data[i] - y.data[i]) / x.size();
    L = std::max(L, std::abs(y.data[i]));
  }
  CHECK(std::abs(psnr(x, y) - 10 * std::log10(L * L / mse)) < 1e-10);
}

TEST_CASE("mean and standard error") {
  const MeanSe a = mean_se({ 1.0, 2.0, 3.0, 6.0 });
  CHECK(a.mean == doctest::Approx(3.0));
  // s^2 = (4 + 1 + 0 + 9) / 3
  CHECK(a.se == doctest::Approx(std::sqrt(14.0 / 3.0) / 2.0));
  CHECK(mean_se({ 5.0 }).se == 0.0);
  CHECK_THROWS_AS(mean_se({}), DomainError);
}

TEST_CASE("baseline patterns") {
  using K = BaselineSpec::Kind;
  Rng rng(4);
  for (K k : { K::kUniformRandom, K::kVariableDensity, K::kLowPass, K::kRandomLines }) {
    CAPTURE(to_string(k));
    BaselineSpec spec;
    spec.kind = k;
    spec.rate = 1.0;
    CHECK(baseline_pattern(spec, 8, 8, rng).active_count() == 64);
    spec.rate = 0.0;
    CHECK_THROWS_AS(baseline_pattern(spec, 8, 8, rng), DomainError);
    spec.rate = 0.25;
    const ParamVector p = baseline_pattern(spec, 32, 32, rng);
    CHECK(p.active_count() == 256);
    CHECK(p.alpha == 0.0);
    for (double w : p.weights)
      CHECK((w == 0.0 || w == 1.0));
    CHECK(parse_baseline_kind(to_string(k)) == k);
  }
  CHECK_THROWS_AS(parse_baseline_kind("spiral"), ConfigError);

  BaselineSpec vd;
  vd.kind = K::kVariableDensity;
  vd.rate = 0.05;
  CHECK(baseline_pattern(vd, 32, 32, rng).weights[0] == 1.0);

  BaselineSpec lp;
  lp.kind = K::kLowPass;
  lp.rate = 0.3;
  const ParamVector p = baseline_pattern(lp, 32, 32, rng);
  double max_on = 0.0, min_off = 1e9;
  for (std::size_t r = 0; r < 32; ++r)
    for (std::size_t c = 0; c < 32; ++c) {
      const double rad = std::hypot(centered_frequency(r, 32), centered_frequency(c, 32));
      if (p.weights[r * 32 + c] == 1.0)
        max_on = std::max(max_on, rad);
      else
        min_off = std::min(min_off, rad);
    }
  CHECK(max_on <= min_off);

  CHECK(centered_frequency(0, 8) == 0.0);
  CHECK(centered_frequency(4, 8) == 4.0);
  CHECK(centered_frequency(5, 8) == -3.0);
  CHECK(centered_frequency(3, 7) == 3.0);
  CHECK(centered_frequency(4, 7) == -3.0);

  const ParamVector lines =
      random_lines_pattern(16, 16, 5, Parametrization::Axis::kVertical, 4.0, rng);
  CHECK(lines.active_count() == 80);
  CHECK(lines.weights[0] == 1.0);
  for (std::size_t c = 0; c < 16; ++c)
    for (std::size_t r = 1; r < 16; ++r)
      CHECK(lines.weights[r * 16 + c] == lines.weights[c]);
}

TEST_CASE("kde") {
  Rng rng(5);
  ParamVector p(16, 16, 0.0, 0.0);
  for (auto &w : p.weights)
    w = rng.uniform() < 0.3 ? rng.uniform() : 0.0;
  const RealImage d = kde_pattern(p, 1.7);
  double sum = 0.0;
  for (double v : d.data) {
    CHECK(v >= 0.0);
    sum += v;
  }
  CHECK(std::abs(sum - 1.0) < 1e-12);

  // direct circular 2-D convolution with an unnormalized Gaussian
  RealImage ref(16, 16);
  double total = 0.0;
  for (std::size_t r = 0; r < 16; ++r)
    for (std::size_t c = 0; c < 16; ++c) {
      double s = 0.0;
      for (std::size_t i = 0; i < 16; ++i)
        for (std::size_t j = 0; j < 16; ++j) {
          const double dr = std::min<double>((r + 16 - i) % 16, (i + 16 - r) % 16);
          const double dc = std::min<double>((c + 16 - j) % 16, (j + 16 - c) % 16);
          s += std::exp(-(dr * dr + dc * dc) / (2 * 1.7 * 1.7)) * p.weights[i * 16 + j];
        }
      ref(r, c) = s;
      total += s;
    }
  for (std::size_t i = 0; i < ref.size(); ++i)
    CHECK(std::abs(d.data[i] - ref.data[i] / total) < 1e-10);

  ParamVector one(16, 16, 0.0, 0.0);
  one.weights[5 * 16 + 9] = 1.0;
  const RealImage bump = kde_pattern(one, 2.0);
  CHECK(bump(5, 9) > bump(5, 10));
  CHECK(bump(5, 10) == doctest::Approx(bump(5, 8)));
  CHECK(bump(4, 9) == doctest::Approx(bump(5, 10)));

  CHECK_THROWS_AS(kde_pattern(ParamVector(4, 4, 0.0, 0.0), 2.0), DegenerateError);
  CHECK_THROWS_AS(kde_pattern(one, 0.0), DomainError);
}

TEST_CASE("fftshift moves DC to the center") {
  RealImage a(4, 6);
  a(0, 0) = 1.0;
  const RealImage s = fftshift(a);
  CHECK(s(2, 3) == 1.0);
}

TEST_CASE("greedy line selection") {
  DatasetSpec spec;
  spec.height = spec.width = 16;
  spec.n_train = 2;
  spec.n_test = 0;
  spec.ellipses = 3;
  spec.noise_rel = 0.01;
  const auto pairs = generate_dataset(spec).subset(Split::kTrain);
  LearnConfig cfg;
  cfg.reg = { RhoSpec::huber(0.05), AnalysisOp::gradient() };
  cfg.pdhg_tol = 1e-6;

  const GreedyResult g = greedy_lines(pairs, cfg, 0.25, Parametrization::Axis::kVertical);
  REQUIRE(g.order.size() == 4);
  CHECK(g.params.active_count() == 64);
  CHECK(g.params.alpha > 0.0);

  // the first pick is the best single line, computed directly
  double best = -2.0;
  std::size_t arg = 0;
  for (std::size_t l = 0; l < 16; ++l) {
    ParamVector p(16, 16, 0.0, g.alpha_fixed);
    for (std::size_t r = 0; r < 16; ++r)
      p.weights[r * 16 + l] = 1.0;
    double s = 0.0;
    for (const auto &pair : pairs)
      s += ssim(reconstruct(pair, p, cfg), pair.u_star) / 2.0;
    if (s > best) {
      best = s;
      arg = l;
    }
  }
  CHECK(g.order.front() == arg);
  CHECK(arg == 0);
  CHECK(g.values.front() == doctest::Approx(best).epsilon(1e-12));
  for (std::size_t k = 1; k < g.values.size(); ++k)
    CHECK(g.values[k] >= g.values[k - 1]);

  const GreedyResult all = greedy_lines(pairs, cfg, 1.0, Parametrization::Axis::kHorizontal);
  CHECK(all.params.active_count() == 256);
  CHECK_THROWS_AS(greedy_lines(pairs, cfg, 0.01, Parametrization::Axis::kVertical),
                  DegenerateError);
}
