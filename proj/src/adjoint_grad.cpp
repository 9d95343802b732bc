//
// bmri - Copyright 2026 The bmri Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "bmri/adjoint_grad.hpp"

#include <cmath>
#include <string>

#include "bmri/kernels.hpp"
#include "bmri/linops.hpp"

namespace bmri {
namespace {
  // F^{-1} diag(w2) F x
  ComplexImage data_normal(const ComplexImage &x, const double *w2) {
    ComplexImage fx = dft2(x);
    const auto &k = kernels::active();
    k.mul(w2, fx.re_data(), fx.re_data(), fx.size());
    k.mul(w2, fx.im_data(), fx.im_data(), fx.size());
    return idft2(fx);
  }

  std::vector<double> squared_weights(const ParamVector &p) {
    std::vector<double> w2(p.weights.size());
    kernels::active().mul(p.weights.data(), p.weights.data(), w2.data(),
                          w2.size());
    return w2;
  }
}  // namespace

ComplexImage E_grad(const ComplexImage &u, const LowerLevelProblem &problem) {
  if (!u.same_shape(problem.y))
    throw DimensionError("E_grad: image and data differ in shape");
  const std::vector<double> w2 = squared_weights(problem.params);
  ComplexImage r = dft2(u);
  r -= problem.y;
  const auto &k = kernels::active();
  k.mul(w2.data(), r.re_data(), r.re_data(), r.size());
  k.mul(w2.data(), r.im_data(), r.im_data(), r.size());
  ComplexImage g = idft2(r);
  if (!problem.regularizer_inactive()) {
    const AnalysisOp &op = problem.reg.op;
    axpy(problem.params.alpha,
         op.adjoint(J_grad(problem.reg.rho, op.apply(u))), g);
  }
  axpy(problem.eps, u, g);
  return g;
}

HessianOperator::HessianOperator(const ComplexImage &u_hat,
                                 const LowerLevelProblem &problem)
    : u_hat_(u_hat), problem_(&problem),
      reg_active_(!problem.regularizer_inactive()),
      w2_(squared_weights(problem.params)) {
  if (!u_hat.same_shape(problem.y))
    throw DimensionError("Hessian point and data differ in shape");
  if (!reg_active_)
    return;
  au_ = problem.reg.op.apply(u_hat_);
  const RhoSpec &rho = problem.reg.rho;
  const std::size_t n = u_hat_.size();
  if (rho.kind == RhoSpec::Kind::kHuberCubic) {
    const RealImage mag = pixel_abs(au_);
    phi_.resize(n);
    psi_.resize(n);
    const auto &k = kernels::active();
    k.huber_phi(mag.data.data(), rho.gamma, phi_.data(), n);
    k.huber_psi(mag.data.data(), rho.gamma, psi_.data(), n);
  }
}

ComplexImage HessianOperator::apply(const ComplexImage &w) const {
  if (!w.same_shape(u_hat_))
    throw DimensionError("Hessian direction has the wrong shape");
  ComplexImage out = data_normal(w, w2_.data());
  if (reg_active_) {
    const AnalysisOp &op = problem_->reg.op;
    MultiField aw = op.apply(w);
    if (!phi_.empty()) {
      const auto &k = kernels::active();
      const std::size_t n = w.size();
      std::vector<double> zw(n, 0.0);
      for (std::size_t p = 0; p < au_.count(); ++p) {
        k.mul_add(au_[p].re_data(), aw[p].re_data(), zw.data(), n);
        k.mul_add(au_[p].im_data(), aw[p].im_data(), zw.data(), n);
      }
      k.mul(psi_.data(), zw.data(), zw.data(), n);
      for (std::size_t p = 0; p < aw.count(); ++p) {
        k.mul(phi_.data(), aw[p].re_data(), aw[p].re_data(), n);
        k.mul_add(zw.data(), au_[p].re_data(), aw[p].re_data(), n);
        k.mul(phi_.data(), aw[p].im_data(), aw[p].im_data(), n);
        k.mul_add(zw.data(), au_[p].im_data(), aw[p].im_data(), n);
      }
    }
    axpy(problem_->params.alpha, op.adjoint(aw), out);
  }
  axpy(problem_->eps, w, out);
  return out;
}

std::vector<double> E_mixed_apply(const ComplexImage &u_hat,
                                  const LowerLevelProblem &problem,
                                  const ComplexImage &w) {
  if (!u_hat.same_shape(problem.y) || !w.same_shape(problem.y))
    throw DimensionError("E_mixed_apply operands differ in shape");
  const std::size_t n = u_hat.size();
  std::vector<double> out(n + 1, 0.0);

  ComplexImage r = dft2(u_hat);
  r -= problem.y;
  const ComplexImage fw = dft2(w);
  const double *p = problem.params.weights.data();
  for (std::size_t i = 0; i < n; ++i)
    out[i] = 2.0 * p[i]
             * (fw.re_data()[i] * r.re_data()[i]
                + fw.im_data()[i] * r.im_data()[i]);

  // d/dalpha of D_u E is A*(DJ(Au)); contract with w through Aw.
  if (!problem.reg.rho.is_zero()) {
    const AnalysisOp &op = problem.reg.op;
    out[n] = dot(J_grad(problem.reg.rho, op.apply(u_hat)), op.apply(w));
  }
  return out;
}

CgResult cg_solve(const HessianOperator &H, const ComplexImage &b, double tol,
                  int maxit) {
  if (!(tol > 0.0))
    throw ConfigError("CG tolerance must be positive");
  if (maxit < 1)
    throw ConfigError("CG needs at least one iteration");
  CgResult res;
  res.x = ComplexImage(b.height(), b.width());
  const double bnorm = norm(b);
  if (bnorm == 0.0)
    return res;

  ComplexImage r = b;
  ComplexImage d = r;
  double rr = dot(r, r);
  for (int it = 1; it <= maxit; ++it) {
    const ComplexImage hd = H.apply(d);
    const double dhd = dot(d, hd);
    if (!(dhd > 0.0))
      throw SpdViolationError(dhd, "CG direction with nonpositive curvature "
                                   "at iteration "
                                       + std::to_string(it));
    const double a = rr / dhd;
    axpy(a, d, res.x);
    axpy(-a, hd, r);
    const double rr_next = dot(r, r);
    const double rel = std::sqrt(rr_next) / bnorm;
    res.residuals.push_back(rel);
    res.iters = it;
    if (rel <= tol)
      return res;
    const double beta = rr_next / rr;
    rr = rr_next;
    ComplexImage dn = r;
    axpy(beta, d, dn);
    d = std::move(dn);
  }
  const double last = res.residuals.back();
  throw ConvergenceError(last, maxit,
                         "CG stopped at maxit with relative residual "
                             + std::to_string(last));
}

std::vector<double> implicit_grad(const ComplexImage &u_hat,
                                  const LowerLevelProblem &problem,
                                  const ComplexImage &loss_grad, double tol,
                                  int maxit) {
  const HessianOperator H(u_hat, problem);
  const CgResult q = cg_solve(H, loss_grad, tol, maxit);
  std::vector<double> g = E_mixed_apply(u_hat, problem, q.x);
  for (double &v : g)
    v = -v;
  return g;
}

}  // namespace bmri
