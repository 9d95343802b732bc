//
// bmri - Copyright 2026 The bmri Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <vector>

#include "bmri/core.hpp"
#include "bmri/lower_level.hpp"
#include "bmri/optim.hpp"

namespace bmri {

struct TrainingPair {
  ComplexImage u_star;
  /// Full noisy k-space.
  ComplexImage y;
};

/// Maps the optimizer variable lambda to a ParamVector. The last entry of
/// lambda is alpha / alpha_scale, so that it is of order one near the
/// reference value the caller passes in.
class Parametrization {
 public:
  enum class Kind { kFree, kCartesianLines, kAlphaOnly };
  /// kVertical lines are k-space columns, kHorizontal lines are rows.
  enum class Axis { kHorizontal, kVertical };

  static Parametrization free(std::size_t height, std::size_t width,
                              double alpha_max, double alpha_scale = 1.0);
  static Parametrization lines(std::size_t height, std::size_t width,
                               Axis axis, double alpha_max,
                               double alpha_scale = 1.0);
  /// Weights held fixed; only alpha varies.
  static Parametrization alpha_only(std::vector<double> fixed_weights,
                                    std::size_t height, std::size_t width,
                                    double alpha_max, double alpha_scale = 1.0);

  Kind kind() const noexcept { return kind_; }
  Axis axis() const noexcept { return axis_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t lambda_dim() const noexcept;
  /// Number of lines for kCartesianLines, 0 otherwise.
  std::size_t line_count() const noexcept;
  double alpha_max() const noexcept { return alpha_max_; }
  double alpha_scale() const noexcept { return alpha_scale_; }
  BoxBounds bounds() const;

  /// Throws DomainError when lambda leaves the box.
  ParamVector apply(const std::vector<double> &lambda) const;
  /// Adjoint of the Jacobian of apply: sums weight gradients per line.
  std::vector<double> pullback(const std::vector<double> &lambda,
                               const std::vector<double> &g) const;
  /// lambda for the pattern with every weight set to `weight`.
  std::vector<double> constant(double weight, double alpha) const;

 private:
  Parametrization(Kind kind, Axis axis, std::size_t h, std::size_t w,
                  double alpha_max, double alpha_scale);

  Kind kind_;
  Axis axis_;
  std::size_t height_;
  std::size_t width_;
  double alpha_max_;
  double alpha_scale_;
  std::vector<double> fixed_;
};

const char *to_string(Parametrization::Kind kind) noexcept;

/// beta * sum(p_i + p_i (1 - p_i))
double penalty(const ParamVector &p, double beta);
/// Length n + 1; the alpha entry is zero.
std::vector<double> penalty_grad(const ParamVector &p, double beta);

struct LossSpec {
  enum class Kind { kSquaredL2, kSmoothedTV };
  Kind kind = Kind::kSquaredL2;
  double gamma = 0.0;

  static LossSpec squared_l2() { return { Kind::kSquaredL2, 0.0 }; }
  static LossSpec smoothed_tv(double gamma);
};

double loss(const LossSpec &spec, const ComplexImage &u,
            const ComplexImage &u_star);
ComplexImage loss_grad(const LossSpec &spec, const ComplexImage &u,
                       const ComplexImage &u_star);

struct LearnConfig {
  double beta = 0.0;
  Regularizer reg;
  double eps = 1e-4;
  double pdhg_tol = 1e-9;
  int pdhg_maxit = 20000;
  double cg_tol = 1e-8;
  int cg_maxit = 2000;
  int memory = 10;
  int maxiter = 500;
  double pgtol = 1e-6;
  double frtol = 1e-10;
  int phase1_maxiter = 50;
  LossSpec loss;
  Parametrization::Kind param = Parametrization::Kind::kFree;
  Parametrization::Axis axis = Parametrization::Axis::kVertical;
  /// Phase-1 starting alpha; <= 0 selects the data-scaled default.
  double alpha0 = 0.0;
  double alpha_max_factor = 1e3;
  /// Warm starts are dropped when lambda moves farther than this
  /// (max-norm over weights, relative change for alpha).
  double warm_trust = 0.5;
  unsigned threads = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

/// 1e-2 times the mean of ||y||^2 / n over the pairs.
double default_alpha0(const std::vector<TrainingPair> &pairs);
/// cfg.alpha0 when positive, otherwise default_alpha0.
double resolve_alpha0(const std::vector<TrainingPair> &pairs,
                      const LearnConfig &cfg);

/// Lower-level states from the previous evaluation, keyed by pair index.
class WarmCache {
 public:
  explicit WarmCache(double trust = 0.5) : trust_(trust) { }

  /// Drops all states when `lambda` is far from the last evaluated point.
  void prepare(const std::vector<double> &lambda, std::size_t pairs);
  const SolveState *get(std::size_t index) const;
  void put(std::size_t index, SolveState state);
  void clear();
  std::size_t clears() const noexcept { return clears_; }

 private:
  double trust_;
  std::vector<double> last_;
  std::vector<std::optional<SolveState>> states_;
  std::size_t clears_ = 0;
};

struct ObjectiveValue {
  double value = 0.0;
  double mean_loss = 0.0;
  double penalty = 0.0;
  /// Gradient with respect to lambda.
  std::vector<double> grad;
  ParamVector params;
  long lower_solves = 0;
  long pdhg_iters = 0;
};

LowerLevelProblem make_problem(const TrainingPair &pair,
                               const ParamVector &params,
                               const LearnConfig &cfg);

/// Mean training loss plus penalty and its lambda-gradient.
ObjectiveValue objective_and_grad(const std::vector<double> &lambda,
                                  const std::vector<TrainingPair> &pairs,
                                  const LearnConfig &cfg,
                                  const Parametrization &par,
                                  WarmCache *cache = nullptr);

/// Objective value only (no adjoint solves).
double objective_value(const std::vector<double> &lambda,
                       const std::vector<TrainingPair> &pairs,
                       const LearnConfig &cfg, const Parametrization &par,
                       WarmCache *cache = nullptr);

struct HistoryRow {
  int iter = 0;
  double objective = 0.0;
  double sampling_fraction = 0.0;
  double proj_grad_norm = 0.0;
  double alpha = 0.0;
};

void write_history_csv(std::ostream &os, const std::vector<HistoryRow> &rows);

struct LearnResult {
  std::vector<double> lambda;
  ParamVector params;
  std::vector<HistoryRow> history;
  MinimizeStatus status = MinimizeStatus::kMaxIter;
  double phase1_alpha = 0.0;
  double final_pg_norm = 0.0;
  double final_objective = 0.0;
  long lower_solves = 0;
};

/// Thrown when an optimizer failure interrupts learn; carries the history.
class LearnError : public Error {
 public:
  LearnError(std::vector<HistoryRow> history, const std::string &what)
      : Error(what), history_(std::move(history)) { }
  const std::vector<HistoryRow> &history() const noexcept { return history_; }

 private:
  std::vector<HistoryRow> history_;
};

/// Optimal alpha for fixed weights, started from alpha_init.
LearnResult tune_alpha(const std::vector<TrainingPair> &pairs,
                       const LearnConfig &cfg,
                       const std::vector<double> &weights, double alpha_init);

/// Phase 1 tunes alpha on the full pattern, phase 2 optimizes the
/// configured parametrization from (full weights, phase-1 alpha).
LearnResult learn(const std::vector<TrainingPair> &pairs,
                  const LearnConfig &cfg);

struct ThresholdResult {
  ParamVector params;
  LearnResult retune;
};

/// p_i > 0 becomes 1, everything else 0, followed by an alpha re-tune.
ThresholdResult threshold_and_retune(const ParamVector &learned,
                                     const std::vector<TrainingPair> &pairs,
                                     const LearnConfig &cfg);

/// Binary thresholding only.
std::vector<double> threshold_weights(const std::vector<double> &weights);

}  // namespace bmri
