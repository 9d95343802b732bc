//
// bmri - Copyright 2026 The bmri Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "bmri/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "bmri/kernels.hpp"

namespace bmri {

RealImage::RealImage(std::size_t h, std::size_t w, double fill)
    : height(h), width(w), data(h * w, fill) {
  if (h == 0 || w == 0)
    throw DimensionError("image dimensions must be positive");
}

ComplexImage::ComplexImage(std::size_t height, std::size_t width)
    : height_(height), width_(width), re_(height * width, 0.0),
      im_(height * width, 0.0) {
  if (height == 0 || width == 0)
    throw DimensionError("image dimensions must be positive");
}

ComplexImage ComplexImage::from_real(const RealImage &re) {
  ComplexImage out(re.height, re.width);
  std::copy(re.data.begin(), re.data.end(), out.re_.begin());
  return out;
}

ComplexImage ComplexImage::from_planes(std::size_t height, std::size_t width,
                                       std::vector<double> re,
                                       std::vector<double> im) {
  if (height == 0 || width == 0)
    throw DimensionError("image dimensions must be positive");
  if (re.size() != height * width || im.size() != height * width)
    throw DimensionError("plane sizes do not match image dimensions");
  ComplexImage out;
  out.height_ = height;
  out.width_ = width;
  out.re_ = std::move(re);
  out.im_ = std::move(im);
  return out;
}

bool ComplexImage::all_finite() const noexcept {
  auto finite = [](double v) { return std::isfinite(v); };
  return std::all_of(re_.begin(), re_.end(), finite)
         && std::all_of(im_.begin(), im_.end(), finite);
}

RealImage ComplexImage::real_part() const {
  RealImage out(height_, width_);
  std::copy(re_.begin(), re_.end(), out.data.begin());
  return out;
}

RealImage ComplexImage::magnitude() const {
  RealImage out(height_, width_);
  for (std::size_t i = 0; i < size(); ++i)
    out.data[i] = std::hypot(re_[i], im_[i]);
  return out;
}

void ComplexImage::set_zero() noexcept {
  std::fill(re_.begin(), re_.end(), 0.0);
  std::fill(im_.begin(), im_.end(), 0.0);
}

namespace {
  void require_same(const ComplexImage &a, const ComplexImage &b) {
    if (!a.same_shape(b))
      throw DimensionError("image shapes differ");
  }
}  // namespace

ComplexImage &ComplexImage::operator+=(const ComplexImage &rhs) {
  require_same(*this, rhs);
  const auto &k = kernels::active();
  k.axpy(1.0, rhs.re_data(), re_data(), size());
  k.axpy(1.0, rhs.im_data(), im_data(), size());
  return *this;
}

ComplexImage &ComplexImage::operator-=(const ComplexImage &rhs) {
  require_same(*this, rhs);
  const auto &k = kernels::active();
  k.sub(re_data(), rhs.re_data(), re_data(), size());
  k.sub(im_data(), rhs.im_data(), im_data(), size());
  return *this;
}

ComplexImage &ComplexImage::operator*=(double s) noexcept {
  const auto &k = kernels::active();
  k.scale(s, re_data(), size());
  k.scale(s, im_data(), size());
  return *this;
}

ComplexImage operator+(ComplexImage lhs, const ComplexImage &rhs) {
  lhs += rhs;
  return lhs;
}

ComplexImage operator-(ComplexImage lhs, const ComplexImage &rhs) {
  lhs -= rhs;
  return lhs;
}

ComplexImage operator*(double s, ComplexImage rhs) {
  rhs *= s;
  return rhs;
}

double dot(const ComplexImage &a, const ComplexImage &b) {
  require_same(a, b);
  const auto &k = kernels::active();
  return k.dot(a.re_data(), b.re_data(), a.size())
         + k.dot(a.im_data(), b.im_data(), a.size());
}

double norm(const ComplexImage &a) {
  return std::sqrt(dot(a, a));
}

void axpy(double alpha, const ComplexImage &x, ComplexImage &y) {
  require_same(x, y);
  const auto &k = kernels::active();
  k.axpy(alpha, x.re_data(), y.re_data(), x.size());
  k.axpy(alpha, x.im_data(), y.im_data(), x.size());
}

MultiField::MultiField(std::size_t m, std::size_t height, std::size_t width) {
  if (m == 0)
    throw DimensionError("a MultiField needs at least one component");
  components.reserve(m);
  for (std::size_t p = 0; p < m; ++p)
    components.emplace_back(height, width);
}

MultiField::MultiField(std::vector<ComplexImage> comps)
    : components(std::move(comps)) {
  if (components.empty())
    throw DimensionError("a MultiField needs at least one component");
  for (const auto &c : components)
    if (!c.same_shape(components.front()))
      throw DimensionError("MultiField components differ in shape");
}

bool MultiField::same_shape(const MultiField &other) const noexcept {
  return count() == other.count() && height() == other.height()
         && width() == other.width();
}

void MultiField::set_zero() noexcept {
  for (auto &c : components)
    c.set_zero();
}

MultiField &MultiField::operator+=(const MultiField &rhs) {
  if (!same_shape(rhs))
    throw DimensionError("MultiField shapes differ");
  for (std::size_t p = 0; p < count(); ++p)
    components[p] += rhs.components[p];
  return *this;
}

MultiField &MultiField::operator-=(const MultiField &rhs) {
  if (!same_shape(rhs))
    throw DimensionError("MultiField shapes differ");
  for (std::size_t p = 0; p < count(); ++p)
    components[p] -= rhs.components[p];
  return *this;
}

MultiField &MultiField::operator*=(double s) noexcept {
  for (auto &c : components)
    c *= s;
  return *this;
}

double dot(const MultiField &a, const MultiField &b) {
  if (!a.same_shape(b))
    throw DimensionError("MultiField shapes differ");
  double s = 0.0;
  for (std::size_t p = 0; p < a.count(); ++p)
    s += dot(a[p], b[p]);
  return s;
}

double norm(const MultiField &a) {
  return std::sqrt(dot(a, a));
}

void axpy(double alpha, const MultiField &x, MultiField &y) {
  if (!x.same_shape(y))
    throw DimensionError("MultiField shapes differ");
  for (std::size_t p = 0; p < x.count(); ++p)
    axpy(alpha, x[p], y[p]);
}

RealImage pixel_abs(const MultiField &z) {
  if (z.count() == 0)
    throw DimensionError("empty MultiField");
  RealImage out(z.height(), z.width());
  const auto &k = kernels::active();
  for (const auto &c : z.components) {
    if (c.height() != out.height || c.width() != out.width)
      throw DimensionError("MultiField components differ in shape");
    k.add_sq(c.re_data(), out.data.data(), out.size());
    k.add_sq(c.im_data(), out.data.data(), out.size());
  }
  k.sqrt_inplace(out.data.data(), out.size());
  return out;
}

ParamVector::ParamVector(std::size_t h, std::size_t w, double weight,
                         double alpha_value)
    : height(h), width(w), weights(h * w, weight), alpha(alpha_value) {
  if (h == 0 || w == 0)
    throw DimensionError("pattern dimensions must be positive");
}

void ParamVector::validate() const {
  if (weights.size() != height * width)
    throw DimensionError("pattern size does not match its grid");
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double w = weights[i];
    if (!(w >= 0.0 && w <= 1.0))
      throw DomainError("pattern weight " + std::to_string(i)
                        + " outside [0,1]: " + std::to_string(w));
  }
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    throw DomainError("alpha must be a finite nonnegative number");
}

std::size_t ParamVector::active_count() const {
  return static_cast<std::size_t>(std::count_if(
      weights.begin(), weights.end(), [](double w) { return w > 0.0; }));
}

double ParamVector::sampling_fraction() const {
  if (weights.empty())
    return 0.0;
  return static_cast<double>(active_count())
         / static_cast<double>(weights.size());
}

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Rng Rng::derive(std::string_view label) const noexcept {
  // FNV-1a over the label, then mixed with the parent seed.
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return Rng(mix64(seed_ ^ mix64(h)));
}

Rng Rng::derive(std::uint64_t index) const noexcept {
  return Rng(mix64(seed_ ^ mix64(index ^ 0xA5A5A5A55A5A5A5AULL)));
}

std::uint64_t Rng::next_u64() noexcept {
  return mix64(seed_ + 0x9E3779B97F4A7C15ULL * counter_++);
}

double Rng::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t bound) noexcept {
  if (bound <= 1)
    return 0;
  // Rejection keeps the draw exactly uniform.
  const std::uint64_t limit = ~std::uint64_t { 0 } - (~std::uint64_t { 0 } % bound);
  std::uint64_t r = next_u64();
  while (r >= limit)
    r = next_u64();
  return r % bound;
}

double Rng::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // u1 in (0, 1] so the log is finite.
  const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

ComplexImage cgauss_sample(Rng &rng, std::size_t height, std::size_t width,
                           double sigma) {
  if (!(sigma >= 0.0))
    throw DomainError("noise level must be nonnegative");
  ComplexImage out(height, width);
  if (sigma == 0.0)
    return out;
  auto re = out.re();
  auto im = out.im();
  for (std::size_t i = 0; i < out.size(); ++i) {
    re[i] = sigma * rng.normal();
    im[i] = sigma * rng.normal();
  }
  return out;
}

}  // namespace bmri
