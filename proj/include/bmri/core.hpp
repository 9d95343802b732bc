//
// bmri - Copyright 2026 The bmri Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "bmri/errors.hpp"

namespace bmri {

/// Row-major real plane.
struct RealImage {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> data;

  RealImage() = default;
  RealImage(std::size_t h, std::size_t w, double fill = 0.0);

  std::size_t size() const noexcept { return data.size(); }
  double &operator()(std::size_t r, std::size_t c) { return data[r * width + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data[r * width + c];
  }
};

/// A 2-D complex field, stored as separate row-major real and imaginary
/// planes. Used for images as well as their k-space.
class ComplexImage {
 public:
  ComplexImage() = default;
  ComplexImage(std::size_t height, std::size_t width);

  static ComplexImage from_real(const RealImage &re);
  static ComplexImage from_planes(std::size_t height, std::size_t width,
                                  std::vector<double> re,
                                  std::vector<double> im);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t size() const noexcept { return re_.size(); }
  bool empty() const noexcept { return re_.empty(); }

  std::span<double> re() noexcept { return re_; }
  std::span<const double> re() const noexcept { return re_; }
  std::span<double> im() noexcept { return im_; }
  std::span<const double> im() const noexcept { return im_; }

  double *re_data() noexcept { return re_.data(); }
  const double *re_data() const noexcept { return re_.data(); }
  double *im_data() noexcept { return im_.data(); }
  const double *im_data() const noexcept { return im_.data(); }

  bool same_shape(const ComplexImage &other) const noexcept {
    return height_ == other.height_ && width_ == other.width_;
  }
  bool all_finite() const noexcept;

  RealImage real_part() const;
  RealImage magnitude() const;

  void set_zero() noexcept;

  ComplexImage &operator+=(const ComplexImage &rhs);
  ComplexImage &operator-=(const ComplexImage &rhs);
  ComplexImage &operator*=(double s) noexcept;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<double> re_;
  std::vector<double> im_;
};

ComplexImage operator+(ComplexImage lhs, const ComplexImage &rhs);
ComplexImage operator-(ComplexImage lhs, const ComplexImage &rhs);
ComplexImage operator*(double s, ComplexImage rhs);

/// Real inner product: sum of re*re + im*im over all pixels.
double dot(const ComplexImage &a, const ComplexImage &b);
double norm(const ComplexImage &a);
/// y += alpha * x
void axpy(double alpha, const ComplexImage &x, ComplexImage &y);

/// Stacked analysis coefficients (z^1, ..., z^M), all of the same shape.
struct MultiField {
  std::vector<ComplexImage> components;

  MultiField() = default;
  MultiField(std::size_t m, std::size_t height, std::size_t width);
  explicit MultiField(std::vector<ComplexImage> comps);

  std::size_t count() const noexcept { return components.size(); }
  std::size_t height() const noexcept {
    return components.empty() ? 0 : components.front().height();
  }
  std::size_t width() const noexcept {
    return components.empty() ? 0 : components.front().width();
  }
  bool same_shape(const MultiField &other) const noexcept;
  void set_zero() noexcept;

  ComplexImage &operator[](std::size_t p) { return components[p]; }
  const ComplexImage &operator[](std::size_t p) const { return components[p]; }

  MultiField &operator+=(const MultiField &rhs);
  MultiField &operator-=(const MultiField &rhs);
  MultiField &operator*=(double s) noexcept;
};

double dot(const MultiField &a, const MultiField &b);
double norm(const MultiField &a);
void axpy(double alpha, const MultiField &x, MultiField &y);

/// |z|_i = sqrt(sum_p re_p,i^2 + im_p,i^2)
RealImage pixel_abs(const MultiField &z);

/// Upper-level variable: pattern weights on the k-space grid plus alpha.
struct ParamVector {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> weights;
  double alpha = 0.0;

  ParamVector() = default;
  ParamVector(std::size_t h, std::size_t w, double weight, double alpha_value);

  std::size_t size() const noexcept { return weights.size(); }
  /// Throws DomainError when a weight leaves [0,1] or alpha is negative.
  void validate() const;
  /// Fraction of weights that are strictly positive.
  double sampling_fraction() const;
  std::size_t active_count() const;
};

/// Counter-based splittable generator (SplitMix64 over a counter).
/// Streams for different purposes come from derive(), so results never
/// depend on the order in which sibling streams are consumed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) noexcept : seed_(seed) { }

  std::uint64_t seed() const noexcept { return seed_; }
  Rng derive(std::string_view label) const noexcept;
  Rng derive(std::uint64_t index) const noexcept;

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1).
  double uniform() noexcept;
  /// Standard normal via Box-Muller.
  double normal() noexcept;
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) noexcept;

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t mix64(std::uint64_t x) noexcept;

/// Independent N(0, sigma^2) real and imaginary parts.
ComplexImage cgauss_sample(Rng &rng, std::size_t height, std::size_t width,
                           double sigma);

}  // namespace bmri
