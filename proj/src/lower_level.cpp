//
// bmri - Copyright 2026 The bmri Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "bmri/lower_level.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <string>

#include "bmri/kernels.hpp"
#include "bmri/linops.hpp"

namespace bmri {

void LowerLevelProblem::validate() const {
  if (!(eps > 0.0))
    throw ConfigError("strong convexity weight eps must be positive");
  if (params.height != y.height() || params.width != y.width())
    throw DimensionError("pattern grid does not match the k-space data");
  params.validate();
}

namespace {
  ComplexImage weighted_residual(const ComplexImage &u,
                                 const LowerLevelProblem &problem) {
    ComplexImage r = dft2(u);
    r -= problem.y;
    const auto &k = kernels::active();
    const double *w = problem.params.weights.data();
    k.mul(w, r.re_data(), r.re_data(), r.size());
    k.mul(w, r.im_data(), r.im_data(), r.size());
    return r;
  }

  double relative(double diff, double ref) {
    if (diff == 0.0)
      return 0.0;
    return diff / std::max(ref, DBL_MIN);
  }
}  // namespace

double energy(const ComplexImage &u, const LowerLevelProblem &problem) {
  const ComplexImage r = weighted_residual(u, problem);
  double e = 0.5 * dot(r, r) + 0.5 * problem.eps * dot(u, u);
  if (!problem.regularizer_inactive())
    e += problem.params.alpha
         * J_eval(problem.reg.rho, problem.reg.op.apply(u));
  return e;
}

PdhgParams pdhg_params(const LowerLevelProblem &problem) {
  if (!(problem.eps > 0.0))
    throw ConfigError("strong convexity weight eps must be positive");
  const auto &w = problem.params.weights;
  double max_p2 = 0.0;
  for (double v : w)
    max_p2 = std::max(max_p2, v * v);
  const double c =
      problem.params.alpha
      * smoothness_bound(problem.reg.rho, problem.reg.op.components());
  PdhgParams out;
  out.eta = std::max(max_p2, c);
  if (out.eta <= 0.0)
    out.eta = kEtaFloor;
  const double L = problem.reg.op.norm_bound();
  out.mu = 2.0 * std::sqrt(problem.eps / ((1.0 + L * L) * out.eta));
  out.tau = out.mu / (2.0 * problem.eps);
  out.sigma = out.mu * out.eta / 2.0;
  out.theta = 1.0 / (1.0 + out.mu);
  return out;
}

ComplexImage prox_F1(const ComplexImage &v, double tau, const ComplexImage &y,
                     const ParamVector &params) {
  if (!v.same_shape(y) || params.size() != v.size())
    throw DimensionError("prox_F1 operands differ in shape");
  ComplexImage fv = dft2(v);
  const auto &k = kernels::active();
  const double *w = params.weights.data();
  k.data_prox(fv.re_data(), y.re_data(), w, tau, fv.re_data(), fv.size());
  k.data_prox(fv.im_data(), y.im_data(), w, tau, fv.im_data(), fv.size());
  return idft2(fv);
}

ComplexImage prox_G(const ComplexImage &u, double tau, double eps) {
  if (!(eps >= 0.0) || !(tau >= 0.0))
    throw DomainError("prox_G needs nonnegative eps and tau");
  ComplexImage out = u;
  out *= 1.0 / (eps * tau + 1.0);
  return out;
}

ComplexImage zero_filling(const LowerLevelProblem &problem) {
  ComplexImage s2y = problem.y;
  const auto &k = kernels::active();
  const double *w = problem.params.weights.data();
  k.mul(w, s2y.re_data(), s2y.re_data(), s2y.size());
  k.mul(w, s2y.im_data(), s2y.im_data(), s2y.size());
  k.mul(w, s2y.re_data(), s2y.re_data(), s2y.size());
  k.mul(w, s2y.im_data(), s2y.im_data(), s2y.size());
  return idft2(s2y);
}

SolveState solve(const LowerLevelProblem &problem, const SolveState *warm,
                 const SolveOptions &options) {
  problem.validate();
  if (!(options.tol > 0.0))
    throw ConfigError("solver tolerance must be positive");
  if (options.maxit < 1)
    throw ConfigError("solver needs at least one iteration");

  const PdhgParams pp = pdhg_params(problem);
  const AnalysisOp &op = problem.reg.op;
  const RhoSpec &rho = problem.reg.rho;
  const bool reg_active = !problem.regularizer_inactive();
  const std::size_t m = op.components();
  const std::size_t h = problem.y.height(), w = problem.y.width();

  SolveState st;
  if (warm != nullptr && warm->u.same_shape(problem.y)
      && warm->v1.same_shape(problem.y) && warm->v2.count() == m
      && warm->v2.height() == h && warm->v2.width() == w) {
    st = *warm;
    if (!reg_active)
      st.v2.set_zero();
  } else {
    st.u = zero_filling(problem);
    st.v1 = st.u;
    st.v2 = reg_active ? op.apply(st.u) : MultiField(m, h, w);
    st.u_bar = st.u;
  }
  st.iters = 0;
  st.rel_change = 0.0;

  const double sigma = pp.sigma;
  const double t2 = problem.params.alpha / sigma;

  for (int it = 0; it < options.maxit; ++it) {
    // dual step: prox of sigma F* through Moreau's identity
    ComplexImage x1 = st.v1;
    axpy(sigma, st.u_bar, x1);
    ComplexImage scaled1 = x1;
    scaled1 *= 1.0 / sigma;
    ComplexImage v1n = x1;
    axpy(-sigma, prox_F1(scaled1, 1.0 / sigma, problem.y, problem.params),
         v1n);

    MultiField v2n(m, h, w);
    if (reg_active) {
      MultiField x2 = st.v2;
      axpy(sigma, op.apply(st.u_bar), x2);
      MultiField scaled2 = x2;
      scaled2 *= 1.0 / sigma;
      v2n = x2;
      axpy(-sigma, prox_F2(rho, scaled2, t2), v2n);
    }

    // primal step
    ComplexImage kt = v1n;
    if (reg_active)
      kt += op.adjoint(v2n);
    ComplexImage un = st.u;
    axpy(-pp.tau, kt, un);
    un = prox_G(un, pp.tau, problem.eps);

    ComplexImage du = un - st.u;
    ComplexImage dv1 = v1n - st.v1;
    MultiField dv2 = v2n;
    dv2 -= st.v2;
    const double v_norm =
        std::sqrt(dot(st.v1, st.v1) + dot(st.v2, st.v2));
    const double dv_norm = std::sqrt(dot(dv1, dv1) + dot(dv2, dv2));
    const double rel = relative(norm(du), norm(st.u)) + relative(dv_norm, v_norm);

    ComplexImage ubar = un;
    axpy(pp.theta, du, ubar);

    if (!std::isfinite(rel) || !un.all_finite())
      throw DivergenceError(it + 1, "primal-dual iterate became non-finite at "
                                        "iteration "
                                        + std::to_string(it + 1));

    st.u = std::move(un);
    st.v1 = std::move(v1n);
    st.v2 = std::move(v2n);
    st.u_bar = std::move(ubar);
    st.iters = it + 1;
    st.rel_change = rel;

    if (options.trace != nullptr)
      *options.trace << st.iters << ',' << rel << ','
                     << energy(st.u, problem) << '\n';
    if (options.observer)
      options.observer(st.iters, st.u);
    if (rel <= options.tol)
      break;
  }
  return st;
}

}  // namespace bmri
