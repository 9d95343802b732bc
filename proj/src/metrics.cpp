//
// bmri - Copyright 2026 The bmri Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "bmri/eval.hpp"
#include "bmri/parallel.hpp"

namespace bmri {
namespace {
  constexpr int kWin = 11;

  std::array<double, kWin * kWin> gaussian_window() {
    std::array<double, kWin * kWin> w {};
    double s = 0.0;
    for (int r = 0; r < kWin; ++r)
      for (int c = 0; c < kWin; ++c) {
        const double dr = r - kWin / 2, dc = c - kWin / 2;
        w[r * kWin + c] = std::exp(-(dr * dr + dc * dc) / (2.0 * 1.5 * 1.5));
        s += w[r * kWin + c];
      }
    for (double &v : w)
      v /= s;
    return w;
  }

  void same_shape(const RealImage &a, const RealImage &b) {
    if (a.height != b.height || a.width != b.width)
      throw DimensionError("metric operands differ in shape");
  }
}  // namespace

double ssim(const RealImage &u, const RealImage &ref) {
  same_shape(u, ref);
  if (u.height < kWin || u.width < kWin)
    throw DimensionError("SSIM needs images of at least 11x11");
  static const auto win = gaussian_window();
  double L = *std::max_element(ref.data.begin(), ref.data.end());
  if (!(L > 0.0))
    L = 1.0;
  const double c1 = (0.01 * L) * (0.01 * L), c2 = (0.03 * L) * (0.03 * L);
  double total = 0.0;
  const std::size_t oh = u.height - kWin + 1, ow = u.width - kWin + 1;
  for (std::size_t r = 0; r < oh; ++r)
    for (std::size_t c = 0; c < ow; ++c) {
      double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
      for (int i = 0; i < kWin; ++i)
        for (int j = 0; j < kWin; ++j) {
          const double w = win[i * kWin + j];
          const double x = u(r + i, c + j), y = ref(r + i, c + j);
          mx += w * x;
          my += w * y;
          sxx += w * x * x;
          syy += w * y * y;
          sxy += w * x * y;
        }
      const double vx = sxx - mx * mx, vy = syy - my * my, cxy = sxy - mx * my;
      total += ((2 * mx * my + c1) * (2 * cxy + c2))
               / ((mx * mx + my * my + c1) * (vx + vy + c2));
    }
  return total / static_cast<double>(oh * ow);
}

double ssim(const ComplexImage &u, const ComplexImage &ref) {
  return ssim(u.magnitude(), ref.magnitude());
}

double psnr(const RealImage &u, const RealImage &ref) {
  same_shape(u, ref);
  double L = 0.0, mse = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    L = std::max(L, std::abs(ref.data[i]));
    const double d = u.data[i] - ref.data[i];
    mse += d * d;
  }
  mse /= static_cast<double>(u.size());
  if (mse == 0.0)
    return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(L * L / mse);
}

double psnr(const ComplexImage &u, const ComplexImage &ref) {
  return psnr(u.magnitude(), ref.magnitude());
}

MeanSe mean_se(const std::vector<double> &values) {
  if (values.empty())
    throw DomainError("mean of an empty sample");
  MeanSe out;
  const double n = static_cast<double>(values.size());
  for (double v : values)
    out.mean += v;
  out.mean /= n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values)
      ss += (v - out.mean) * (v - out.mean);
    out.se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return out;
}

ComplexImage reconstruct(const TrainingPair &pair, const ParamVector &params,
                         const LearnConfig &cfg) {
  SolveOptions so;
  so.tol = cfg.pdhg_tol;
  so.maxit = cfg.pdhg_maxit;
  return solve(make_problem(pair, params, cfg), nullptr, so).u;
}

PatternScore score_pattern(const std::vector<TrainingPair> &pairs,
                           const ParamVector &params, const LearnConfig &cfg) {
  PatternScore s;
  s.ssim.resize(pairs.size());
  s.psnr.resize(pairs.size());
  parallel_for(pairs.size(), cfg.threads, [&](std::size_t i) {
    const ComplexImage u = reconstruct(pairs[i], params, cfg);
    s.ssim[i] = ssim(u, pairs[i].u_star);
    s.psnr[i] = psnr(u, pairs[i].u_star);
  });
  s.ssim_stats = mean_se(s.ssim);
  s.psnr_stats = mean_se(s.psnr);
  s.sampling_fraction = params.sampling_fraction();
  return s;
}

}  // namespace bmri
