//
// bmri - Copyright 2026 The bmri Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "bmri/optim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <string>

#include <Eigen/Dense>

namespace bmri {

BoxBounds::BoxBounds(std::vector<double> lower, std::vector<double> upper)
    : lo(std::move(lower)), hi(std::move(upper)) {
  if (lo.size() != hi.size())
    throw DimensionError("box bounds differ in length");
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (!(lo[i] <= hi[i]) || std::isnan(lo[i]) || std::isnan(hi[i]))
      throw DomainError("box bound lo > hi at coordinate " + std::to_string(i));
}

BoxBounds BoxBounds::uniform(std::size_t n, double lower, double upper) {
  return BoxBounds(std::vector<double>(n, lower), std::vector<double>(n, upper));
}

bool BoxBounds::contains(const std::vector<double> &x) const noexcept {
  if (x.size() != lo.size())
    return false;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!(x[i] >= lo[i] && x[i] <= hi[i]))
      return false;
  return true;
}

std::vector<double> project(const std::vector<double> &x,
                            const BoxBounds &bounds) {
  if (x.size() != bounds.size())
    throw DimensionError("point and bounds differ in length");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    out[i] = std::clamp(x[i], bounds.lo[i], bounds.hi[i]);
  return out;
}

double projected_gradient_norm(const std::vector<double> &x,
                               const std::vector<double> &g,
                               const BoxBounds &bounds) {
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double p = std::clamp(x[i] - g[i], bounds.lo[i], bounds.hi[i]);
    m = std::max(m, std::abs(p - x[i]));
  }
  return m;
}

const char *to_string(MinimizeStatus status) noexcept {
  switch (status) {
  case MinimizeStatus::kPgtol:
    return "projected gradient below pgtol";
  case MinimizeStatus::kFrtol:
    return "relative decrease below frtol";
  case MinimizeStatus::kMaxIter:
    return "iteration limit";
  case MinimizeStatus::kLineSearchFailed:
    return "line search failed";
  }
  return "?";
}

namespace {
  using Vec = Eigen::VectorXd;
  using Mat = Eigen::MatrixXd;

  Eigen::Map<const Vec> view(const std::vector<double> &v) {
    return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
  }

  // Compact form B = theta I - W M W^T with W = [Y, theta S].
  struct Memory {
    std::deque<Vec> s;
    std::deque<Vec> y;
    double theta = 1.0;
    Mat W;
    Mat M;

    std::size_t k() const noexcept { return s.size(); }

    void clear() {
      s.clear();
      y.clear();
      theta = 1.0;
      W.resize(0, 0);
      M.resize(0, 0);
    }

    void rebuild(Eigen::Index n) {
      const auto kk = static_cast<Eigen::Index>(k());
      if (kk == 0) {
        W.resize(n, 0);
        M.resize(0, 0);
        return;
      }
      Mat S(n, kk), Y(n, kk);
      for (Eigen::Index j = 0; j < kk; ++j) {
        S.col(j) = s[static_cast<std::size_t>(j)];
        Y.col(j) = y[static_cast<std::size_t>(j)];
      }
      W.resize(n, 2 * kk);
      W.leftCols(kk) = Y;
      W.rightCols(kk) = theta * S;
      const Mat sy = S.transpose() * Y;
      Mat K = Mat::Zero(2 * kk, 2 * kk);
      for (Eigen::Index i = 0; i < kk; ++i) {
        K(i, i) = -sy(i, i);
        for (Eigen::Index j = 0; j < i; ++j) {
          K(kk + i, j) = sy(i, j);  // L
          K(j, kk + i) = sy(i, j);  // L^T
        }
      }
      K.bottomRightCorner(kk, kk) = theta * (S.transpose() * S);
      M = K.fullPivLu().inverse();
    }
  };

  constexpr double kInf = std::numeric_limits<double>::infinity();

  // Generalized Cauchy point along the projected path x(t) = P(x - t g).
  // Returns xcp and c = W^T (xcp - x).
  void cauchy_point(const Vec &x, const Vec &g, const BoxBounds &b,
                    const Memory &mem, Vec &xcp, Vec &c) {
    const Eigen::Index n = x.size();
    const Eigen::Index k2 = mem.W.cols();
    Vec t(n);
    Vec d(n);
    xcp = x;
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto u = static_cast<std::size_t>(i);
      if (g[i] < 0.0)
        t[i] = (x[i] - b.hi[u]) / g[i];
      else if (g[i] > 0.0)
        t[i] = (x[i] - b.lo[u]) / g[i];
      else
        t[i] = kInf;
      d[i] = t[i] == 0.0 ? 0.0 : -g[i];
    }
    std::vector<Eigen::Index> order;
    for (Eigen::Index i = 0; i < n; ++i)
      if (t[i] > 0.0 && t[i] < kInf)
        order.push_back(i);
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index c2) {
      return t[a] < t[c2] || (t[a] == t[c2] && a < c2);
    });

    Vec p = k2 > 0 ? Vec(mem.W.transpose() * d) : Vec(0);
    c = Vec::Zero(k2);
    double f1 = -d.squaredNorm();
    double f2 = -mem.theta * f1;
    if (k2 > 0)
      f2 -= p.dot(mem.M * p);
    const double f2_org = f2;
    if (f1 >= 0.0)
      return;
    double dt_min = -f1 / f2;
    double t_old = 0.0;
    std::size_t next = 0;
    while (next < order.size()) {
      const Eigen::Index bi = order[next];
      const double dt = t[bi] - t_old;
      if (dt_min < dt)
        break;
      const auto bu = static_cast<std::size_t>(bi);
      xcp[bi] = d[bi] > 0.0 ? b.hi[bu] : b.lo[bu];
      const double zb = xcp[bi] - x[bi];
      const double gb = g[bi];
      c += dt * p;
      f1 += dt * f2 + gb * gb + mem.theta * gb * zb;
      f2 -= mem.theta * gb * gb;
      if (k2 > 0) {
        const Vec wb = mem.W.row(bi).transpose();
        const Vec mwb = mem.M * wb;
        f1 -= gb * mwb.dot(c);
        f2 -= 2.0 * gb * mwb.dot(p) + gb * gb * wb.dot(mwb);
        p += gb * wb;
      }
      d[bi] = 0.0;
      f2 = std::max(f2, std::numeric_limits<double>::epsilon() * f2_org);
      dt_min = -f1 / f2;
      t_old = t[bi];
      ++next;
      if (f1 >= 0.0) {
        dt_min = 0.0;
        break;
      }
    }
    dt_min = std::max(dt_min, 0.0);
    t_old += dt_min;
    for (Eigen::Index i = 0; i < n; ++i)
      if (d[i] != 0.0)
        xcp[i] = std::clamp(x[i] + t_old * d[i], b.lo[static_cast<std::size_t>(i)],
                            b.hi[static_cast<std::size_t>(i)]);
    if (k2 > 0)
      c += dt_min * p;
  }

  // Minimize the model over the free variables at xcp (Sherman-Morrison-
  // Woodbury on the reduced compact matrix), then truncate to the box.
  Vec subspace_min(const Vec &x, const Vec &g, const BoxBounds &b,
                   const Memory &mem, const Vec &xcp, const Vec &c) {
    const Eigen::Index n = x.size();
    std::vector<Eigen::Index> free;
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto u = static_cast<std::size_t>(i);
      if (xcp[i] > b.lo[u] && xcp[i] < b.hi[u])
        free.push_back(i);
    }
    if (free.empty())
      return xcp;
    const auto nf = static_cast<Eigen::Index>(free.size());
    const Eigen::Index k2 = mem.W.cols();

    Vec full = g + mem.theta * (xcp - x);
    if (k2 > 0)
      full -= mem.W * (mem.M * c);
    Vec r(nf);
    for (Eigen::Index j = 0; j < nf; ++j)
      r[j] = full[free[static_cast<std::size_t>(j)]];

    Vec du = -r / mem.theta;
    if (k2 > 0) {
      Mat wz(nf, k2);
      for (Eigen::Index j = 0; j < nf; ++j)
        wz.row(j) = mem.W.row(free[static_cast<std::size_t>(j)]);
      Vec v = mem.M * (wz.transpose() * r);
      const Mat N =
          Mat::Identity(k2, k2) - (mem.M * (wz.transpose() * wz)) / mem.theta;
      v = N.fullPivLu().solve(v);
      du -= (wz * v) / (mem.theta * mem.theta);
    }

    // Project the subspace minimizer onto the box; keep it when it is still
    // a descent direction, otherwise truncate at the first bound.
    Vec out = xcp;
    for (Eigen::Index j = 0; j < nf; ++j) {
      const Eigen::Index i = free[static_cast<std::size_t>(j)];
      const auto u = static_cast<std::size_t>(i);
      out[i] = std::clamp(xcp[i] + du[j], b.lo[u], b.hi[u]);
    }
    if (g.dot(out - x) < 0.0)
      return out;

    double step = 1.0;
    for (Eigen::Index j = 0; j < nf; ++j) {
      const Eigen::Index i = free[static_cast<std::size_t>(j)];
      const auto u = static_cast<std::size_t>(i);
      if (du[j] > 0.0 && b.hi[u] < kInf)
        step = std::min(step, (b.hi[u] - xcp[i]) / du[j]);
      else if (du[j] < 0.0 && b.lo[u] > -kInf)
        step = std::min(step, (b.lo[u] - xcp[i]) / du[j]);
    }
    step = std::max(step, 0.0);
    out = xcp;
    for (Eigen::Index j = 0; j < nf; ++j)
      out[free[static_cast<std::size_t>(j)]] += step * du[j];
    return out;
  }

  void check_finite(double f, const std::vector<double> &g,
                    const std::vector<double> &last_good) {
    bool ok = std::isfinite(f);
    for (double v : g)
      ok = ok && std::isfinite(v);
    if (!ok)
      throw OptimizerError(last_good,
                           "objective or gradient returned a non-finite value");
  }
}  // namespace

MinimizeResult minimize(const ObjectiveFn &fg, std::vector<double> x0,
                        const BoxBounds &bounds,
                        const MinimizeOptions &options) {
  if (x0.empty())
    throw DimensionError("cannot minimize over an empty vector");
  if (x0.size() != bounds.size())
    throw DimensionError("start point and bounds differ in length");
  if (!bounds.contains(x0))
    throw DomainError("start point lies outside the box");
  if (options.m < 1)
    throw ConfigError("quasi-Newton memory must be at least 1");
  if (!(options.pgtol >= 0.0) || !(options.frtol >= 0.0))
    throw ConfigError("tolerances must be nonnegative");

  const auto n = static_cast<Eigen::Index>(x0.size());
  MinimizeResult res;
  res.x = std::move(x0);
  res.g.assign(res.x.size(), 0.0);
  res.f = fg(res.x, res.g);
  res.evals = 1;
  check_finite(res.f, res.g, res.x);
  res.pg_norm = projected_gradient_norm(res.x, res.g, bounds);

  auto record = [&](double step) {
    IterationRecord rec { res.iters, res.f, res.pg_norm, res.evals, step, res.x };
    if (options.on_iteration)
      options.on_iteration(rec);
    res.history.push_back(std::move(rec));
  };
  record(0.0);

  Memory mem;
  std::vector<double> xt(res.x.size()), gt(res.x.size());
  if (res.pg_norm <= options.pgtol) {
    res.status = MinimizeStatus::kPgtol;
    return res;
  }

  while (true) {
    if (res.iters >= options.maxiter) {
      res.status = MinimizeStatus::kMaxIter;
      return res;
    }
    const Vec x = view(res.x);
    const Vec g = view(res.g);
    mem.rebuild(n);
    Vec xcp, c;
    cauchy_point(x, g, bounds, mem, xcp, c);
    Vec d = subspace_min(x, g, bounds, mem, xcp, c) - x;
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      // The model step is not a descent direction; fall back to the
      // projected gradient path and restart the memory.
      mem.clear();
      d.resize(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        d[i] = std::clamp(x[i] - g[i], bounds.lo[u], bounds.hi[u]) - x[i];
      }
      slope = g.dot(d);
      if (!(slope < 0.0)) {
        res.status = MinimizeStatus::kLineSearchFailed;
        return res;
      }
    }

    double step = 1.0;
    if (mem.k() == 0)
      step = std::min(1.0, 1.0 / d.norm());
    bool accepted = false;
    double ft = 0.0;
    for (int bt = 0; bt <= options.max_backtracks; ++bt) {
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        xt[u] = std::clamp(x[i] + step * d[i], bounds.lo[u], bounds.hi[u]);
      }
      ft = fg(xt, gt);
      ++res.evals;
      check_finite(ft, gt, res.x);
      if (ft <= res.f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (mem.k() > 0) {
        mem.clear();
        continue;
      }
      res.status = MinimizeStatus::kLineSearchFailed;
      return res;
    }

    const Vec s = view(xt) - x;
    const Vec yv = view(gt) - g;
    const double sy = s.dot(yv);
    if (sy > 1e-12 * s.norm() * yv.norm() && sy > 0.0) {
      mem.s.push_back(s);
      mem.y.push_back(yv);
      if (mem.k() > static_cast<std::size_t>(options.m)) {
        mem.s.pop_front();
        mem.y.pop_front();
      }
      mem.theta = yv.squaredNorm() / sy;
    }

    const double f_old = res.f;
    res.x = xt;
    res.g = gt;
    res.f = ft;
    ++res.iters;
    res.pg_norm = projected_gradient_norm(res.x, res.g, bounds);
    record(step);

    if (res.pg_norm <= options.pgtol) {
      res.status = MinimizeStatus::kPgtol;
      return res;
    }
    const double scale = std::max({ std::abs(f_old), std::abs(ft), 1.0 });
    if (f_old - ft <= options.frtol * scale) {
      res.status = MinimizeStatus::kFrtol;
      return res;
    }
  }
}

}  // namespace bmri
