//
// bmri - Copyright 2026 The bmri Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bmri/core.hpp"
#include "bmri/upper_level.hpp"

namespace bmri {

// Metrics

/// Gaussian-windowed SSIM (11x11, sigma 1.5) averaged over the positions
/// where the window fits; L is the maximum of the reference.
double ssim(const RealImage &u, const RealImage &ref);
/// On magnitudes.
double ssim(const ComplexImage &u, const ComplexImage &ref);

/// 10 log10(L^2 / MSE), L = max |ref|; +inf for identical images.
double psnr(const RealImage &u, const RealImage &ref);
double psnr(const ComplexImage &u, const ComplexImage &ref);

struct MeanSe {
  double mean = 0.0;
  /// Sample standard deviation over sqrt(N); zero for N = 1.
  double se = 0.0;
};
MeanSe mean_se(const std::vector<double> &values);

/// Lower-level reconstruction of one pair with the given pattern and alpha.
ComplexImage reconstruct(const TrainingPair &pair, const ParamVector &params,
                         const LearnConfig &cfg);

struct PatternScore {
  std::vector<double> ssim;
  std::vector<double> psnr;
  MeanSe ssim_stats;
  MeanSe psnr_stats;
  double sampling_fraction = 0.0;
};

PatternScore score_pattern(const std::vector<TrainingPair> &pairs,
                           const ParamVector &params, const LearnConfig &cfg);

// Baseline patterns

struct BaselineSpec {
  enum class Kind { kUniformRandom, kVariableDensity, kLowPass, kRandomLines };
  Kind kind = Kind::kUniformRandom;
  double rate = 0.25;
  double decay = 4.0;
  Parametrization::Axis axis = Parametrization::Axis::kVertical;
};

const char *to_string(BaselineSpec::Kind kind) noexcept;
BaselineSpec::Kind parse_baseline_kind(const std::string &text);

/// Signed frequency of DFT index i on an axis of length n.
double centered_frequency(std::size_t i, std::size_t n) noexcept;

/// Binary pattern with round(rate * n) active samples (line kinds: whole
/// lines, round(rate * line count) of them). alpha is left at zero.
ParamVector baseline_pattern(const BaselineSpec &spec, std::size_t height,
                             std::size_t width, Rng &rng);

/// Uniform random pattern with exactly `count` samples.
ParamVector uniform_random_pattern(std::size_t height, std::size_t width,
                                   std::size_t count, Rng &rng);
/// Random lines with exactly `count` lines.
ParamVector random_lines_pattern(std::size_t height, std::size_t width,
                                 std::size_t count,
                                 Parametrization::Axis axis, double decay,
                                 Rng &rng);

// Greedy line selection

struct GreedyResult {
  ParamVector params;
  std::vector<std::size_t> order;
  /// Mean training SSIM after each selection, at the pre-tuned alpha.
  std::vector<double> values;
  double alpha_fixed = 0.0;
  long lower_solves = 0;
};

GreedyResult greedy_lines(const std::vector<TrainingPair> &pairs,
                          const LearnConfig &cfg, double rate,
                          Parametrization::Axis axis);

// Density estimate

/// Circular Gaussian blur of the weight plane (standard deviation
/// `bandwidth` pixels), normalized to unit sum.
RealImage kde_pattern(const ParamVector &p, double bandwidth);

/// Moves DC from (0,0) to the center, for viewing.
RealImage fftshift(const RealImage &plane);
RealImage pattern_plane(const ParamVector &p);

}  // namespace bmri
