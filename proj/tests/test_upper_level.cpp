//
// bmri - Copyright 2026 The bmri Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "bmri/data_io.hpp"
#include "bmri/upper_level.hpp"
#include "helpers.hpp"

using namespace bmri;

namespace {
std::vector<TrainingPair> small_pairs(std::size_t n, std::size_t count,
                                      std::uint64_t seed = 3) {
  DatasetSpec spec;
  spec.height = n;
  spec.width = n;
  spec.n_train = count;
  spec.n_test = 0;
  spec.ellipses = 3;
  spec.noise_rel = 0.01;
  spec.seed = seed;
  return generate_dataset(spec).subset(Split::kTrain);
}

LearnConfig tight_config() {
  LearnConfig cfg;
  cfg.beta = 1e-3;
  cfg.reg = { RhoSpec::huber(0.05), AnalysisOp::gradient() };
  cfg.pdhg_tol = 1e-11;
  cfg.pdhg_maxit = 200000;
  cfg.cg_tol = 1e-12;
  return cfg;
}

std::vector<double> flatten(const ParamVector &p) {
  std::vector<double> v = p.weights;
  v.push_back(p.alpha);
  return v;
}
}  // namespace

TEST_CASE("parametrization: free, lines, alpha-only") {
  const auto fr = Parametrization::free(2, 3, 10.0);
  CHECK(fr.lambda_dim() == 7);
  const std::vector<double> lam { 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 2.0 };
  const ParamVector p = fr.apply(lam);
  CHECK(flatten(p) == lam);
  CHECK(fr.pullback(lam, lam) == lam);
  CHECK(fr.bounds().hi.back() == 10.0);

  const auto vl = Parametrization::lines(4, 4, Parametrization::Axis::kVertical, 10.0);
  CHECK(vl.line_count() == 4);
  const ParamVector pv = vl.apply({ 1, 0, 0, 1, 0.5 });
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c)
      CHECK(pv.weights[r * 4 + c] == ((c == 0 || c == 3) ? 1.0 : 0.0));
  CHECK(pv.alpha == 0.5);
  const auto hl = Parametrization::lines(4, 5, Parametrization::Axis::kHorizontal, 10.0);
  CHECK(hl.lambda_dim() == 5);
  const ParamVector ph = hl.apply({ 0, 1, 0, 0, 0.5 });
  for (std::size_t c = 0; c < 5; ++c)
    CHECK(ph.weights[5 + c] == 1.0);
  CHECK(ph.sampling_fraction() == doctest::Approx(0.25));

  const auto ao = Parametrization::alpha_only({ 1, 0, 0.5, 1 }, 2, 2, 10.0);
  CHECK(ao.lambda_dim() == 1);
  CHECK(ao.apply({ 3.0 }).weights == std::vector<double> { 1, 0, 0.5, 1 });
  CHECK_THROWS_AS(Parametrization::alpha_only({ 1, 2, 0, 0 }, 2, 2, 1.0), DomainError);

  CHECK_THROWS_AS(fr.apply({ 0.1, 0.2 }), DimensionError);
  CHECK_THROWS_AS(fr.apply({ 0.1, 0.2, 0.3, 0.4, 0.5, 1.6, 2.0 }), DomainError);
  CHECK_THROWS_AS(fr.apply({ 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, -1.0 }), DomainError);
  CHECK_THROWS_AS(Parametrization::free(0, 3, 1.0), DimensionError);
}

TEST_CASE("parametrization: alpha scale") {
  const auto fr = Parametrization::free(1, 2, 8.0, 0.5);
  CHECK(fr.bounds().hi.back() == 16.0);
  CHECK(fr.apply({ 0.0, 1.0, 3.0 }).alpha == 1.5);
  const auto c = fr.constant(1.0, 0.25);
  CHECK(c == std::vector<double> { 1.0, 1.0, 0.5 });
  CHECK(fr.pullback(c, { 1.0, 2.0, 4.0 }) == std::vector<double> { 1.0, 2.0, 2.0 });
}

TEST_CASE("pullback is the adjoint of the parametrization Jacobian") {
  Rng rng(1);
  const Parametrization pars[] = {
    Parametrization::free(6, 6, 10.0, 0.3),
    Parametrization::lines(6, 6, Parametrization::Axis::kVertical, 10.0, 2.0),
    Parametrization::lines(6, 6, Parametrization::Axis::kHorizontal, 10.0),
    Parametrization::alpha_only(std::vector<double>(36, 0.5), 6, 6, 10.0, 0.7),
  };
  for (const auto &par : pars) {
    CAPTURE(to_string(par.kind()));
    const std::size_t d = par.lambda_dim();
    std::vector<double> lam(d);
    for (auto &v : lam)
      v = 0.25 + 0.5 * rng.uniform();
    const auto base = flatten(par.apply(lam));
    // explicit Jacobian column by column (the map is affine)
    std::vector<std::vector<double>> jac(d);
    for (std::size_t j = 0; j < d; ++j) {
      auto lp = lam;
      lp[j] += 0.125;
      const auto moved = flatten(par.apply(lp));
      jac[j].resize(moved.size());
      for (std::size_t i = 0; i < moved.size(); ++i)
        jac[j][i] = (moved[i] - base[i]) / 0.125;
    }
    std::vector<double> g(37);
    for (auto &v : g)
      v = 2 * rng.uniform() - 1;
    const auto pb = par.pullback(lam, g);
    REQUIRE(pb.size() == d);
    for (std::size_t j = 0; j < d; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < 37; ++i)
        s += jac[j][i] * g[i];
      CHECK(std::abs(s - pb[j]) < 1e-10);
    }
  }
}

TEST_CASE("penalty") {
  ParamVector p(3, 3, 0.0, 1.0);
  CHECK(penalty(p, 0.1) == 0.0);
  p.weights.assign(9, 1.0);
  CHECK(penalty(p, 0.1) == doctest::Approx(0.9));
  auto g = penalty_grad(p, 0.1);
  CHECK(g.size() == 10);
  CHECK(g[0] == 0.0);
  CHECK(g[9] == 0.0);
  p.weights.assign(9, 0.0);
  g = penalty_grad(p, 0.1);
  CHECK(g[4] == doctest::Approx(0.2));
  p.weights = { 0, 1, 0, 1, 1, 0, 0, 0, 1 };
  CHECK(penalty(p, 0.3) == doctest::Approx(0.3 * 4));
  p.weights = { 0.1, 0.7, 0, 0.3, 1, 0, 0.5, 0, 0.9 };
  const double h = 1e-6;
  g = penalty_grad(p, 0.3);
  for (std::size_t i = 0; i < 9; ++i) {
    ParamVector a = p, b = p;
    a.weights[i] += h;
    b.weights[i] -= h;
    CHECK(std::abs((penalty(a, 0.3) - penalty(b, 0.3)) / (2 * h) - g[i]) < 1e-8);
  }
}

TEST_CASE("losses") {
  Rng rng(2);
  const ComplexImage us = cgauss_sample(rng, 8, 8, 1.0);
  for (const LossSpec &spec : { LossSpec::squared_l2(), LossSpec::smoothed_tv(0.05) }) {
    CHECK(loss(spec, us, us) == 0.0);
    CHECK(norm(loss_grad(spec, us, us)) == 0.0);
  }
  ComplexImage u = us;
  u.re()[10] += 1.0;
  CHECK(loss(LossSpec::squared_l2(), u, us) == doctest::Approx(0.5));
  CHECK_THROWS_AS(LossSpec::smoothed_tv(0.0), DomainError);
  CHECK_THROWS_AS(loss(LossSpec::squared_l2(), ComplexImage(4, 4), us), DimensionError);

  for (const LossSpec &spec : { LossSpec::squared_l2(), LossSpec::smoothed_tv(0.05) }) {
    for (int probe = 0; probe < 10; ++probe) {
      const ComplexImage x = cgauss_sample(rng, 8, 8, 1.0);
      const ComplexImage d = cgauss_sample(rng, 8, 8, 1.0);
      const double h = 1e-6;
      const double fd = (loss(spec, x + h * d, us) - loss(spec, x - h * d, us)) / (2 * h);
      const double an = dot(loss_grad(spec, x, us), d);
      CHECK(std::abs(fd - an) <= 1e-6 * std::max(1.0, std::abs(an)));
    }
  }
}

TEST_CASE("objective gradient matches end-to-end finite differences") {
  const auto pairs = small_pairs(12, 2);
  LearnConfig cfg = tight_config();
  Rng rng(4);
  const double a0 = resolve_alpha0(pairs, cfg);
  const Parametrization pars[] = {
    Parametrization::free(12, 12, 1e3 * a0, a0),
    Parametrization::lines(12, 12, Parametrization::Axis::kVertical, 1e3 * a0, a0),
    Parametrization::alpha_only(std::vector<double>(144, 0.8), 12, 12, 1e3 * a0, a0),
  };
  for (const auto &par : pars) {
    CAPTURE(to_string(par.kind()));
    std::vector<double> lam(par.lambda_dim());
    for (auto &v : lam)
      v = 0.3 + 0.5 * rng.uniform();
    const ObjectiveValue ov = objective_and_grad(lam, pairs, cfg, par);
    CHECK(ov.value == doctest::Approx(ov.mean_loss + ov.penalty));
    CHECK(ov.value == doctest::Approx(objective_value(lam, pairs, cfg, par)).epsilon(1e-12));
    std::vector<std::size_t> coords { lam.size() - 1 };
    for (int k = 0; k < 4 && coords.size() < lam.size(); ++k)
      coords.push_back(rng.below(lam.size() - 1));
    for (std::size_t j : coords) {
      const double h = 1e-5;
      auto lp = lam, lm = lam;
      lp[j] += h;
      lm[j] -= h;
      const double fd = (objective_value(lp, pairs, cfg, par)
                         - objective_value(lm, pairs, cfg, par)) / (2 * h);
      CAPTURE(j);
      CHECK(std::abs(fd - ov.grad[j]) <= 1e-3 * std::max(std::abs(fd), 1e-6));
    }
  }
}

TEST_CASE("duplicated pairs give the single-pair objective") {
  const auto one = small_pairs(10, 1);
  const std::vector<TrainingPair> two { one[0], one[0] };
  LearnConfig cfg = tight_config();
  const auto par = Parametrization::free(10, 10, 10.0);
  std::vector<double> lam(101, 0.6);
  lam.back() = 0.02;
  const auto a = objective_and_grad(lam, one, cfg, par);
  const auto b = objective_and_grad(lam, two, cfg, par);
  CHECK(a.value == doctest::Approx(b.value).epsilon(1e-14));
  for (std::size_t i = 0; i < a.grad.size(); ++i)
    CHECK(std::abs(a.grad[i] - b.grad[i]) <= 1e-14 * std::max(1.0, std::abs(a.grad[i])));
  CHECK(b.lower_solves == 2);
}

TEST_CASE("tuned alpha is stationary and brackets a scan") {
  const auto pairs = small_pairs(12, 1);
  LearnConfig cfg = tight_config();
  cfg.beta = 0.0;
  cfg.pgtol = 1e-9;
  const std::vector<double> full(144, 1.0);
  const LearnResult r = tune_alpha(pairs, cfg, full, resolve_alpha0(pairs, cfg));
  const double a = r.params.alpha;
  REQUIRE(a > 0.0);
  const auto par = Parametrization::free(12, 12, 1e3 * resolve_alpha0(pairs, cfg));
  auto lam = par.constant(1.0, a);
  const auto at = objective_and_grad(lam, pairs, cfg, par);
  auto lam0 = par.constant(1.0, 0.3 * a);
  const auto off = objective_and_grad(lam0, pairs, cfg, par);
  CHECK(std::abs(at.grad.back()) < 1e-3 * std::abs(off.grad.back()));

  // scan over alpha: the minimum of the scan lies next to the tuned value
  double best = 1e300, best_a = 0.0;
  for (double f : { 0.25, 0.5, 0.8, 1.0, 1.25, 2.0, 4.0 }) {
    const double v = objective_value(par.constant(1.0, f * a), pairs, cfg, par);
    if (v < best) {
      best = v;
      best_a = f * a;
    }
  }
  CHECK(best_a > 0.5 * a);
  CHECK(best_a < 2.0 * a);
  CHECK(objective_value(lam, pairs, cfg, par) <= best + 1e-12);
}

TEST_CASE("learn without sparsity pressure keeps the pattern full") {
  const auto pairs = small_pairs(12, 2);
  LearnConfig cfg;
  cfg.reg = { RhoSpec::huber(0.05), AnalysisOp::gradient() };
  cfg.beta = 0.0;
  cfg.maxiter = 30;
  const LearnResult r = learn(pairs, cfg);
  CHECK(r.params.sampling_fraction() >= 0.95);
  REQUIRE(!r.history.empty());
  double best = r.history.front().objective;
  for (std::size_t k = 1; k < r.history.size(); ++k) {
    CHECK(r.history[k].iter == r.history[k - 1].iter + 1);
    CHECK(std::min(best, r.history[k].objective) <= best);
    best = std::min(best, r.history[k].objective);
  }
  std::ostringstream os;
  write_history_csv(os, r.history);
  CHECK(os.str().rfind("iter,objective,sampling_fraction,proj_grad_norm,alpha\n", 0) == 0);
}

TEST_CASE("learn is deterministic across thread counts") {
  const auto pairs = small_pairs(12, 3);
  LearnConfig cfg;
  cfg.reg = { RhoSpec::huber(0.05), AnalysisOp::gradient() };
  cfg.beta = 2e-3;
  cfg.maxiter = 15;
  const LearnResult a = learn(pairs, cfg);
  cfg.threads = 3;
  const LearnResult b = learn(pairs, cfg);
  std::ostringstream ha, hb;
  write_history_csv(ha, a.history);
  write_history_csv(hb, b.history);
  CHECK(ha.str() == hb.str());
  CHECK(a.params.weights == b.params.weights);
  CHECK(a.params.alpha == b.params.alpha);
}

TEST_CASE("threshold and retune") {
  CHECK(threshold_weights({ 0.0, 0.3, 1.0 }) == std::vector<double> { 0.0, 1.0, 1.0 });
  CHECK(threshold_weights({ 0.0, 1.0, 1.0 }) == std::vector<double> { 0.0, 1.0, 1.0 });

  const auto pairs = small_pairs(8, 1);
  LearnConfig cfg;
  cfg.reg = { RhoSpec::huber(0.05), AnalysisOp::gradient() };
  ParamVector learned(8, 8, 0.0, 0.01);
  for (std::size_t r = 0; r < 8; ++r)
    learned.weights[r * 8 + 0] = learned.weights[r * 8 + 3] = 0.4;
  const ThresholdResult t = threshold_and_retune(learned, pairs, cfg);
  CHECK(t.params.active_count() == 16);
  for (double w : t.params.weights)
    CHECK((w == 0.0 || w == 1.0));
  const LearnResult direct = tune_alpha(pairs, cfg, t.params.weights, 0.01);
  CHECK(direct.params.alpha == t.params.alpha);

  ParamVector none(8, 8, 0.0, 0.01);
  CHECK_THROWS_AS(threshold_and_retune(none, pairs, cfg), DegenerateError);
}

TEST_CASE("warm cache") {
  WarmCache cache(0.5);
  cache.prepare({ 0.5, 0.5, 1.0 }, 2);
  CHECK(cache.get(0) == nullptr);
  cache.put(0, SolveState {});
  CHECK(cache.get(0) != nullptr);
  cache.prepare({ 0.6, 0.5, 1.2 }, 2);
  CHECK(cache.get(0) != nullptr);
  CHECK(cache.clears() == 0);
  cache.prepare({ 0.6, 0.5, 2.0 }, 2);
  CHECK(cache.get(0) == nullptr);
  CHECK(cache.clears() == 1);
  CHECK_THROWS_AS(cache.put(5, SolveState {}), DimensionError);
}

TEST_CASE("config validation") {
  LearnConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.beta = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = LearnConfig {};
  cfg.pdhg_tol = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = LearnConfig {};
  cfg.loss = { LossSpec::Kind::kSmoothedTV, 0.0 };
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  CHECK_THROWS_AS(learn({}, LearnConfig {}), ConfigError);
}
