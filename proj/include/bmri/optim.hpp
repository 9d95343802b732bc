//
// bmri - Copyright 2026 The bmri Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "bmri/errors.hpp"

namespace bmri {

/// Per-coordinate box [lo_i, hi_i]; hi_i may be +inf.
struct BoxBounds {
  std::vector<double> lo;
  std::vector<double> hi;

  BoxBounds() = default;
  BoxBounds(std::vector<double> lower, std::vector<double> upper);
  static BoxBounds uniform(std::size_t n, double lower, double upper);

  std::size_t size() const noexcept { return lo.size(); }
  bool contains(const std::vector<double> &x) const noexcept;
};

std::vector<double> project(const std::vector<double> &x,
                            const BoxBounds &bounds);

/// || P(x - g) - x ||_inf
double projected_gradient_norm(const std::vector<double> &x,
                               const std::vector<double> &g,
                               const BoxBounds &bounds);

/// Returns f(x) and writes the gradient into g (already sized).
using ObjectiveFn =
    std::function<double(const std::vector<double> &x, std::vector<double> &g)>;

struct IterationRecord {
  int iter = 0;
  double f = 0.0;
  double pg_norm = 0.0;
  int evals = 0;
  double step = 0.0;
  std::vector<double> x;
};

struct MinimizeOptions {
  int m = 10;
  int maxiter = 500;
  double pgtol = 1e-6;
  double frtol = 1e-10;
  int max_backtracks = 40;
  /// Called after the initial point and after every accepted step.
  std::function<void(const IterationRecord &)> on_iteration;
};

enum class MinimizeStatus { kPgtol, kFrtol, kMaxIter, kLineSearchFailed };

const char *to_string(MinimizeStatus status) noexcept;

struct MinimizeResult {
  std::vector<double> x;
  double f = 0.0;
  std::vector<double> g;
  double pg_norm = 0.0;
  MinimizeStatus status = MinimizeStatus::kMaxIter;
  int iters = 0;
  int evals = 0;
  std::vector<IterationRecord> history;
};

/// Limited-memory BFGS with box constraints: generalized Cauchy point over
/// the projected steepest-descent path, subspace minimization of the
/// compact quasi-Newton model on the free variables, then a backtracking
/// Armijo search along the segment to the truncated subspace minimizer.
MinimizeResult minimize(const ObjectiveFn &fg, std::vector<double> x0,
                        const BoxBounds &bounds,
                        const MinimizeOptions &options = {});

}  // namespace bmri
