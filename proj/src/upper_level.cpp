//
// bmri - Copyright 2026 The bmri Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "bmri/upper_level.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <string>

#include "bmri/adjoint_grad.hpp"
#include "bmri/linops.hpp"
#include "bmri/parallel.hpp"

namespace bmri {

// Parametrization

Parametrization::Parametrization(Kind kind, Axis axis, std::size_t h,
                                 std::size_t w, double alpha_max,
                                 double alpha_scale)
    : kind_(kind), axis_(axis), height_(h), width_(w), alpha_max_(alpha_max),
      alpha_scale_(alpha_scale) {
  if (h == 0 || w == 0)
    throw DimensionError("parametrization grid must be nonempty");
  if (!(alpha_max > 0.0) || !std::isfinite(alpha_max))
    throw DomainError("alpha upper bound must be positive and finite");
  if (!(alpha_scale > 0.0) || !std::isfinite(alpha_scale))
    throw DomainError("alpha scale must be positive and finite");
}

Parametrization Parametrization::free(std::size_t height, std::size_t width,
                                      double alpha_max, double alpha_scale) {
  return Parametrization(Kind::kFree, Axis::kVertical, height, width,
                         alpha_max, alpha_scale);
}

Parametrization Parametrization::lines(std::size_t height, std::size_t width,
                                       Axis axis, double alpha_max,
                                       double alpha_scale) {
  return Parametrization(Kind::kCartesianLines, axis, height, width,
                         alpha_max, alpha_scale);
}

Parametrization Parametrization::alpha_only(std::vector<double> fixed_weights,
                                            std::size_t height,
                                            std::size_t width,
                                            double alpha_max,
                                            double alpha_scale) {
  if (fixed_weights.size() != height * width)
    throw DimensionError("fixed weights do not match the grid");
  for (double w : fixed_weights)
    if (!(w >= 0.0 && w <= 1.0))
      throw DomainError("fixed weights must lie in [0,1]");
  Parametrization p(Kind::kAlphaOnly, Axis::kVertical, height, width,
                    alpha_max, alpha_scale);
  p.fixed_ = std::move(fixed_weights);
  return p;
}

std::size_t Parametrization::line_count() const noexcept {
  if (kind_ != Kind::kCartesianLines)
    return 0;
  return axis_ == Axis::kVertical ? width_ : height_;
}

std::size_t Parametrization::lambda_dim() const noexcept {
  switch (kind_) {
  case Kind::kFree:
    return height_ * width_ + 1;
  case Kind::kCartesianLines:
    return line_count() + 1;
  case Kind::kAlphaOnly:
    return 1;
  }
  return 0;
}

BoxBounds Parametrization::bounds() const {
  const std::size_t d = lambda_dim();
  std::vector<double> lo(d, 0.0), hi(d, 1.0);
  hi.back() = alpha_max_ / alpha_scale_;
  return BoxBounds(std::move(lo), std::move(hi));
}

ParamVector Parametrization::apply(const std::vector<double> &lambda) const {
  if (lambda.size() != lambda_dim())
    throw DimensionError("lambda has length " + std::to_string(lambda.size())
                         + ", expected " + std::to_string(lambda_dim()));
  if (!bounds().contains(lambda))
    throw DomainError("lambda lies outside the parameter box");
  ParamVector p(height_, width_, 0.0,
                std::min(lambda.back() * alpha_scale_, alpha_max_));
  switch (kind_) {
  case Kind::kFree:
    std::copy(lambda.begin(), lambda.end() - 1, p.weights.begin());
    break;
  case Kind::kCartesianLines:
    for (std::size_t r = 0; r < height_; ++r)
      for (std::size_t c = 0; c < width_; ++c)
        p.weights[r * width_ + c] =
            lambda[axis_ == Axis::kVertical ? c : r];
    break;
  case Kind::kAlphaOnly:
    p.weights = fixed_;
    break;
  }
  return p;
}

std::vector<double> Parametrization::pullback(const std::vector<double> &lambda,
                                              const std::vector<double> &g) const {
  const std::size_t n = height_ * width_;
  if (lambda.size() != lambda_dim() || g.size() != n + 1)
    throw DimensionError("pullback operands have the wrong length");
  std::vector<double> out(lambda_dim(), 0.0);
  out.back() = g[n] * alpha_scale_;
  switch (kind_) {
  case Kind::kFree:
    std::copy(g.begin(), g.end() - 1, out.begin());
    break;
  case Kind::kCartesianLines:
    for (std::size_t r = 0; r < height_; ++r)
      for (std::size_t c = 0; c < width_; ++c)
        out[axis_ == Axis::kVertical ? c : r] += g[r * width_ + c];
    break;
  case Kind::kAlphaOnly:
    break;
  }
  return out;
}

std::vector<double> Parametrization::constant(double weight,
                                              double alpha) const {
  std::vector<double> out(lambda_dim(), weight);
  out.back() = alpha / alpha_scale_;
  return out;
}

const char *to_string(Parametrization::Kind kind) noexcept {
  switch (kind) {
  case Parametrization::Kind::kFree:
    return "free";
  case Parametrization::Kind::kCartesianLines:
    return "lines";
  case Parametrization::Kind::kAlphaOnly:
    return "alpha";
  }
  return "?";
}

// Penalty and loss

double penalty(const ParamVector &p, double beta) {
  double s = 0.0;
  for (double w : p.weights)
    s += 2.0 * w - w * w;
  return beta * s;
}

std::vector<double> penalty_grad(const ParamVector &p, double beta) {
  std::vector<double> g(p.size() + 1, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i)
    g[i] = beta * (2.0 - 2.0 * p.weights[i]);
  return g;
}

LossSpec LossSpec::smoothed_tv(double gamma) {
  if (!(gamma > 0.0))
    throw DomainError("smoothed TV loss needs gamma > 0");
  return { Kind::kSmoothedTV, gamma };
}

double loss(const LossSpec &spec, const ComplexImage &u,
            const ComplexImage &u_star) {
  if (!u.same_shape(u_star))
    throw DimensionError("loss operands differ in shape");
  const ComplexImage diff = u_star - u;
  if (spec.kind == LossSpec::Kind::kSquaredL2)
    return 0.5 * dot(diff, diff);
  return J_eval(RhoSpec::huber(spec.gamma), grad_apply(diff));
}

ComplexImage loss_grad(const LossSpec &spec, const ComplexImage &u,
                       const ComplexImage &u_star) {
  if (!u.same_shape(u_star))
    throw DimensionError("loss operands differ in shape");
  if (spec.kind == LossSpec::Kind::kSquaredL2)
    return u - u_star;
  const ComplexImage diff = u_star - u;
  ComplexImage g =
      grad_adjoint(J_grad(RhoSpec::huber(spec.gamma), grad_apply(diff)));
  g *= -1.0;
  return g;
}

// Configuration

void LearnConfig::validate() const {
  if (!(beta >= 0.0))
    throw ConfigError("beta must be nonnegative");
  if (!(eps > 0.0))
    throw ConfigError("eps must be positive");
  if (!(pdhg_tol > 0.0) || !(cg_tol > 0.0) || !(pgtol > 0.0)
      || !(frtol >= 0.0))
    throw ConfigError("tolerances must be positive");
  if (pdhg_maxit < 1 || cg_maxit < 1 || maxiter < 0 || phase1_maxiter < 0
      || memory < 1)
    throw ConfigError("iteration budgets must be positive");
  if (!(alpha_max_factor > 1.0))
    throw ConfigError("alpha_max_factor must exceed 1");
  if (!(warm_trust >= 0.0))
    throw ConfigError("warm_trust must be nonnegative");
  if (loss.kind == LossSpec::Kind::kSmoothedTV && !(loss.gamma > 0.0))
    throw ConfigError("smoothed TV loss needs gamma > 0");
}

double default_alpha0(const std::vector<TrainingPair> &pairs) {
  if (pairs.empty())
    throw ConfigError("no training pairs");
  double s = 0.0;
  for (const auto &p : pairs)
    s += dot(p.y, p.y) / static_cast<double>(p.y.size());
  return 1e-2 * s / static_cast<double>(pairs.size());
}

double resolve_alpha0(const std::vector<TrainingPair> &pairs,
                      const LearnConfig &cfg) {
  return cfg.alpha0 > 0.0 ? cfg.alpha0 : default_alpha0(pairs);
}

// Warm starts

void WarmCache::prepare(const std::vector<double> &lambda, std::size_t pairs) {
  bool drop = states_.size() != pairs || last_.size() != lambda.size();
  if (!drop && !lambda.empty()) {
    double dist = 0.0;
    for (std::size_t i = 0; i + 1 < lambda.size(); ++i)
      dist = std::max(dist, std::abs(lambda[i] - last_[i]));
    const double a0 = last_.back(), a1 = lambda.back();
    if (a0 != a1)
      dist = std::max(dist, std::abs(a1 - a0)
                                / std::max(std::abs(a0), 1e-300));
    drop = dist > trust_;
  }
  if (drop) {
    if (!states_.empty())
      ++clears_;
    states_.assign(pairs, std::nullopt);
  }
  last_ = lambda;
}

const SolveState *WarmCache::get(std::size_t index) const {
  if (index >= states_.size() || !states_[index])
    return nullptr;
  return &*states_[index];
}

void WarmCache::put(std::size_t index, SolveState state) {
  if (index >= states_.size())
    throw DimensionError("warm cache index out of range");
  states_[index] = std::move(state);
}

void WarmCache::clear() {
  states_.clear();
  last_.clear();
}

// Objective

LowerLevelProblem make_problem(const TrainingPair &pair,
                               const ParamVector &params,
                               const LearnConfig &cfg) {
  LowerLevelProblem pr;
  pr.y = pair.y;
  pr.params = params;
  pr.reg = cfg.reg;
  pr.eps = cfg.eps;
  return pr;
}

namespace {
  struct PerPair {
    double loss = 0.0;
    std::vector<double> grad;
    int iters = 0;
  };

  std::vector<PerPair> evaluate_pairs(const ParamVector &p,
                                      const std::vector<double> &lambda,
                                      const std::vector<TrainingPair> &pairs,
                                      const LearnConfig &cfg, WarmCache *cache,
                                      bool with_grad) {
    if (pairs.empty())
      throw ConfigError("no training pairs");
    if (cache != nullptr)
      cache->prepare(lambda, pairs.size());
    std::vector<PerPair> out(pairs.size());
    parallel_for(pairs.size(), cfg.threads, [&](std::size_t i) {
      try {
        const LowerLevelProblem pr = make_problem(pairs[i], p, cfg);
        SolveOptions so;
        so.tol = cfg.pdhg_tol;
        so.maxit = cfg.pdhg_maxit;
        SolveState st =
            solve(pr, cache != nullptr ? cache->get(i) : nullptr, so);
        out[i].iters = st.iters;
        out[i].loss = loss(cfg.loss, st.u, pairs[i].u_star);
        if (with_grad)
          out[i].grad =
              implicit_grad(st.u, pr, loss_grad(cfg.loss, st.u, pairs[i].u_star),
                            cfg.cg_tol, cfg.cg_maxit);
        if (cache != nullptr)
          cache->put(i, std::move(st));
      } catch (const Error &e) {
        throw TrainingExampleError(i, e.what());
      }
    });
    return out;
  }
}  // namespace

ObjectiveValue objective_and_grad(const std::vector<double> &lambda,
                                  const std::vector<TrainingPair> &pairs,
                                  const LearnConfig &cfg,
                                  const Parametrization &par,
                                  WarmCache *cache) {
  ObjectiveValue ov;
  ov.params = par.apply(lambda);
  const auto per = evaluate_pairs(ov.params, lambda, pairs, cfg, cache, true);
  const double inv_n = 1.0 / static_cast<double>(pairs.size());
  std::vector<double> g = penalty_grad(ov.params, cfg.beta);
  std::vector<double> mean(g.size(), 0.0);
  for (const auto &pp : per) {
    ov.mean_loss += pp.loss;
    for (std::size_t j = 0; j < mean.size(); ++j)
      mean[j] += pp.grad[j];
    ov.pdhg_iters += pp.iters;
  }
  ov.mean_loss *= inv_n;
  for (std::size_t j = 0; j < g.size(); ++j)
    g[j] += mean[j] * inv_n;
  ov.penalty = penalty(ov.params, cfg.beta);
  ov.value = ov.mean_loss + ov.penalty;
  ov.grad = par.pullback(lambda, g);
  ov.lower_solves = static_cast<long>(pairs.size());
  return ov;
}

double objective_value(const std::vector<double> &lambda,
                       const std::vector<TrainingPair> &pairs,
                       const LearnConfig &cfg, const Parametrization &par,
                       WarmCache *cache) {
  const ParamVector p = par.apply(lambda);
  const auto per = evaluate_pairs(p, lambda, pairs, cfg, cache, false);
  double s = 0.0;
  for (const auto &pp : per)
    s += pp.loss;
  return s / static_cast<double>(pairs.size()) + penalty(p, cfg.beta);
}

void write_history_csv(std::ostream &os, const std::vector<HistoryRow> &rows) {
  os << "iter,objective,sampling_fraction,proj_grad_norm,alpha\n";
  const auto old = os.precision(17);
  for (const auto &r : rows)
    os << r.iter << ',' << r.objective << ',' << r.sampling_fraction << ','
       << r.proj_grad_norm << ',' << r.alpha << '\n';
  os.precision(old);
}

// Learning

namespace {
  LearnResult run_phase(const std::vector<TrainingPair> &pairs,
                        const LearnConfig &cfg, const Parametrization &par,
                        std::vector<double> lambda0, int maxiter,
                        std::vector<HistoryRow> &history, int iter_offset) {
    WarmCache cache(cfg.warm_trust);
    LearnResult res;
    long solves = 0;
    ObjectiveFn fg = [&](const std::vector<double> &x, std::vector<double> &g) {
      const ObjectiveValue ov = objective_and_grad(x, pairs, cfg, par, &cache);
      solves += ov.lower_solves;
      g = ov.grad;
      return ov.value;
    };
    MinimizeOptions mo;
    mo.m = cfg.memory;
    mo.maxiter = maxiter;
    mo.pgtol = cfg.pgtol;
    mo.frtol = cfg.frtol;
    mo.on_iteration = [&](const IterationRecord &rec) {
      const ParamVector p = par.apply(rec.x);
      history.push_back({ iter_offset + rec.iter, rec.f, p.sampling_fraction(),
                          rec.pg_norm, p.alpha });
    };
    MinimizeResult mr;
    try {
      mr = minimize(fg, std::move(lambda0), par.bounds(), mo);
    } catch (const Error &e) {
      throw LearnError(history, e.what());
    }
    res.lambda = mr.x;
    res.params = par.apply(mr.x);
    res.status = mr.status;
    res.final_pg_norm = mr.pg_norm;
    res.final_objective = mr.f;
    res.lower_solves = solves;
    return res;
  }
}  // namespace

LearnResult tune_alpha(const std::vector<TrainingPair> &pairs,
                       const LearnConfig &cfg,
                       const std::vector<double> &weights, double alpha_init) {
  cfg.validate();
  if (pairs.empty())
    throw ConfigError("no training pairs");
  const std::size_t h = pairs.front().y.height(), w = pairs.front().y.width();
  const double alpha_max = cfg.alpha_max_factor * resolve_alpha0(pairs, cfg);
  const double start = std::clamp(alpha_init, 0.0, alpha_max);
  const Parametrization par = Parametrization::alpha_only(
      weights, h, w, alpha_max, start > 0.0 ? start : alpha_max / 1e3);
  std::vector<HistoryRow> history;
  LearnResult res = run_phase(pairs, cfg, par, par.constant(0.0, start),
                              cfg.phase1_maxiter, history, 0);
  res.history = std::move(history);
  res.phase1_alpha = res.params.alpha;
  return res;
}

LearnResult learn(const std::vector<TrainingPair> &pairs,
                  const LearnConfig &cfg) {
  cfg.validate();
  if (pairs.empty())
    throw ConfigError("no training pairs");
  const std::size_t h = pairs.front().y.height(), w = pairs.front().y.width();
  for (const auto &p : pairs)
    if (p.y.height() != h || p.y.width() != w || !p.u_star.same_shape(p.y))
      throw DimensionError("training pairs differ in shape");

  const double alpha0 = resolve_alpha0(pairs, cfg);
  const double alpha_max = cfg.alpha_max_factor * alpha0;
  std::vector<HistoryRow> history;

  const Parametrization phase1 = Parametrization::alpha_only(
      std::vector<double>(h * w, 1.0), h, w, alpha_max, alpha0);
  LearnResult r1 = run_phase(pairs, cfg, phase1, phase1.constant(0.0, alpha0),
                             cfg.phase1_maxiter, history, 0);
  if (cfg.param == Parametrization::Kind::kAlphaOnly) {
    r1.history = std::move(history);
    r1.phase1_alpha = r1.params.alpha;
    return r1;
  }

  // alpha is measured in units of the phase-1 optimum
  const double scale = r1.params.alpha > 0.0 ? r1.params.alpha : alpha0;
  const Parametrization par =
      cfg.param == Parametrization::Kind::kFree
          ? Parametrization::free(h, w, alpha_max, scale)
          : Parametrization::lines(h, w, cfg.axis, alpha_max, scale);
  const int offset = history.empty() ? 0 : history.back().iter + 1;
  LearnResult r2 = run_phase(pairs, cfg, par,
                             par.constant(1.0, r1.params.alpha), cfg.maxiter,
                             history, offset);
  r2.history = std::move(history);
  r2.phase1_alpha = r1.params.alpha;
  r2.lower_solves += r1.lower_solves;
  return r2;
}

std::vector<double> threshold_weights(const std::vector<double> &weights) {
  std::vector<double> out(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i)
    out[i] = weights[i] > 0.0 ? 1.0 : 0.0;
  return out;
}

ThresholdResult threshold_and_retune(const ParamVector &learned,
                                     const std::vector<TrainingPair> &pairs,
                                     const LearnConfig &cfg) {
  learned.validate();
  std::vector<double> binary = threshold_weights(learned.weights);
  if (std::none_of(binary.begin(), binary.end(),
                   [](double v) { return v > 0.0; }))
    throw DegenerateError("thresholded pattern has no active samples");
  const double start =
      learned.alpha > 0.0 ? learned.alpha : resolve_alpha0(pairs, cfg);
  ThresholdResult out;
  out.retune = tune_alpha(pairs, cfg, binary, start);
  out.params = ParamVector(learned.height, learned.width, 0.0,
                           out.retune.params.alpha);
  out.params.weights = std::move(binary);
  return out;
}

}  // namespace bmri
