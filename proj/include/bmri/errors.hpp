//
// bmri - Copyright 2026 The bmri Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace bmri {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shapes that are zero, mismatched, or not divisible as required.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// A pattern or density with no active entries where at least one is needed.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  DivergenceError(int iteration, const std::string &what)
      : Error(what), iteration_(iteration) { }

  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(double residual, int iterations, const std::string &what)
      : Error(what), residual_(residual), iterations_(iterations) { }

  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

// Conjugate gradient found a direction with nonpositive curvature.
class SpdViolationError : public Error {
 public:
  SpdViolationError(double curvature, const std::string &what)
      : Error(what), curvature_(curvature) { }

  double curvature() const noexcept { return curvature_; }

 private:
  double curvature_;
};

class OptimizerError : public Error {
 public:
  OptimizerError(std::vector<double> last_good, const std::string &what)
      : Error(what), last_good_(std::move(last_good)) { }

  const std::vector<double> &last_good() const noexcept { return last_good_; }

 private:
  std::vector<double> last_good_;
};

// Wraps a failure raised while processing one training example.
class TrainingExampleError : public Error {
 public:
  TrainingExampleError(std::size_t index, const std::string &what)
      : Error("training example " + std::to_string(index) + ": " + what),
        index_(index) { }

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

}  // namespace bmri
