//
// bmri - Copyright 2026 The bmri Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bmri/eval.hpp"

namespace bmri {

const char *to_string(BaselineSpec::Kind kind) noexcept {
  switch (kind) {
  case BaselineSpec::Kind::kUniformRandom:
    return "uniform";
  case BaselineSpec::Kind::kVariableDensity:
    return "variable-density";
  case BaselineSpec::Kind::kLowPass:
    return "lowpass";
  case BaselineSpec::Kind::kRandomLines:
    return "random-lines";
  }
  return "?";
}

BaselineSpec::Kind parse_baseline_kind(const std::string &text) {
  if (text == "uniform")
    return BaselineSpec::Kind::kUniformRandom;
  if (text == "variable-density")
    return BaselineSpec::Kind::kVariableDensity;
  if (text == "lowpass")
    return BaselineSpec::Kind::kLowPass;
  if (text == "random-lines")
    return BaselineSpec::Kind::kRandomLines;
  throw ConfigError("unknown baseline kind '" + text + "'");
}

double centered_frequency(std::size_t i, std::size_t n) noexcept {
  const auto k = static_cast<double>(i);
  return 2 * i < n + 1 ? k : k - static_cast<double>(n);
}

namespace {
  std::size_t rate_count(double rate, std::size_t n) {
    if (!(rate > 0.0 && rate <= 1.0))
      throw DomainError("sampling rate must lie in (0, 1]");
    const auto k = static_cast<std::size_t>(std::lround(rate * static_cast<double>(n)));
    if (k == 0)
      throw DegenerateError("sampling rate selects no samples");
    return k;
  }

  // Efraimidis-Spirakis: the k largest keys u^(1/w) form a weighted sample
  // without replacement. `forced` entries are always taken first.
  std::vector<std::size_t> weighted_sample(const std::vector<double> &w,
                                           std::size_t k, Rng &rng,
                                           std::size_t forced) {
    std::vector<std::pair<double, std::size_t>> keys;
    keys.reserve(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double u = rng.uniform();
      const double key = i == forced ? 2.0 : std::log(std::max(u, 1e-300)) / w[i];
      keys.emplace_back(key, i);
    }
    std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(k),
                      keys.end(), [](const auto &a, const auto &b) {
                        return a.first > b.first
                               || (a.first == b.first && a.second < b.second);
                      });
    std::vector<std::size_t> out(k);
    for (std::size_t j = 0; j < k; ++j)
      out[j] = keys[j].second;
    return out;
  }

  double density(double radius, double kmax, double decay) {
    return std::pow(1.0 + radius / kmax, -decay);
  }

  double radius(std::size_t r, std::size_t c, std::size_t h, std::size_t w) {
    return std::hypot(centered_frequency(r, h), centered_frequency(c, w));
  }
}  // namespace

ParamVector uniform_random_pattern(std::size_t height, std::size_t width,
                                   std::size_t count, Rng &rng) {
  const std::size_t n = height * width;
  if (count == 0 || count > n)
    throw DomainError("sample count out of range");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t j = 0; j < count; ++j)
    std::swap(idx[j], idx[j + rng.below(n - j)]);
  ParamVector p(height, width, 0.0, 0.0);
  for (std::size_t j = 0; j < count; ++j)
    p.weights[idx[j]] = 1.0;
  return p;
}

ParamVector random_lines_pattern(std::size_t height, std::size_t width,
                                 std::size_t count,
                                 Parametrization::Axis axis, double decay,
                                 Rng &rng) {
  const bool vertical = axis == Parametrization::Axis::kVertical;
  const std::size_t lines = vertical ? width : height;
  if (count == 0 || count > lines)
    throw DomainError("line count out of range");
  std::vector<double> w(lines);
  double kmax = 0.0;
  for (std::size_t i = 0; i < lines; ++i)
    kmax = std::max(kmax, std::abs(centered_frequency(i, lines)));
  kmax = std::max(kmax, 1.0);
  for (std::size_t i = 0; i < lines; ++i)
    w[i] = density(std::abs(centered_frequency(i, lines)), kmax, decay);
  const auto chosen = weighted_sample(w, count, rng, 0);
  ParamVector p(height, width, 0.0, 0.0);
  for (std::size_t line : chosen)
    for (std::size_t j = 0; j < (vertical ? height : width); ++j)
      p.weights[vertical ? j * width + line : line * width + j] = 1.0;
  return p;
}

ParamVector baseline_pattern(const BaselineSpec &spec, std::size_t height,
                             std::size_t width, Rng &rng) {
  if (height == 0 || width == 0)
    throw DimensionError("pattern grid must be nonempty");
  const std::size_t n = height * width;
  switch (spec.kind) {
  case BaselineSpec::Kind::kUniformRandom:
    return uniform_random_pattern(height, width, rate_count(spec.rate, n), rng);
  case BaselineSpec::Kind::kVariableDensity: {
    const std::size_t k = rate_count(spec.rate, n);
    std::vector<double> w(n);
    double kmax = 0.0;
    for (std::size_t r = 0; r < height; ++r)
      for (std::size_t c = 0; c < width; ++c)
        kmax = std::max(kmax, radius(r, c, height, width));
    kmax = std::max(kmax, 1.0);
    for (std::size_t r = 0; r < height; ++r)
      for (std::size_t c = 0; c < width; ++c)
        w[r * width + c] = density(radius(r, c, height, width), kmax, spec.decay);
    ParamVector p(height, width, 0.0, 0.0);
    for (std::size_t i : weighted_sample(w, k, rng, 0))
      p.weights[i] = 1.0;
    return p;
  }
  case BaselineSpec::Kind::kLowPass: {
    const std::size_t k = rate_count(spec.rate, n);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return radius(a / width, a % width, height, width)
             < radius(b / width, b % width, height, width);
    });
    ParamVector p(height, width, 0.0, 0.0);
    for (std::size_t j = 0; j < k; ++j)
      p.weights[idx[j]] = 1.0;
    return p;
  }
  case BaselineSpec::Kind::kRandomLines: {
    const bool vertical = spec.axis == Parametrization::Axis::kVertical;
    const std::size_t lines = vertical ? width : height;
    return random_lines_pattern(height, width, rate_count(spec.rate, lines),
                                spec.axis, spec.decay, rng);
  }
  }
  throw ConfigError("unknown baseline kind");
}

}  // namespace bmri
