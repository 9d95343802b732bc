//
// bmri - Copyright 2026 The bmri Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "bmri/linops.hpp"

namespace bmri {
namespace {
  // Per-thread interleaved scratch from fftw_malloc, so every execution
  // sees the alignment the plan was made for.
  struct Scratch {
    fftw_complex *buf = nullptr;
    std::size_t n = 0;

    ~Scratch() {
      if (buf != nullptr)
        fftw_free(buf);
    }

    fftw_complex *get(std::size_t need) {
      if (need > n) {
        if (buf != nullptr)
          fftw_free(buf);
        buf = fftw_alloc_complex(need);
        if (buf == nullptr)
          throw Error("FFTW allocation failed");
        n = need;
      }
      return buf;
    }
  };

  // FFTW planning is not thread-safe, execution is. FFTW_ESTIMATE keeps the
  // chosen algorithm, and with it the rounding, identical from run to run.
  class PlanCache {
   public:
    ~PlanCache() {
      for (auto &[key, plan] : plans_)
        fftw_destroy_plan(plan);
    }

    fftw_plan get(std::size_t h, std::size_t w, int sign) {
      std::lock_guard lock(mu_);
      const auto key = std::make_tuple(h, w, sign);
      if (auto it = plans_.find(key); it != plans_.end())
        return it->second;
      fftw_complex *tmp = fftw_alloc_complex(h * w);
      fftw_plan plan = fftw_plan_dft_2d(static_cast<int>(h), static_cast<int>(w),
                                        tmp, tmp, sign, FFTW_ESTIMATE);
      fftw_free(tmp);
      if (plan == nullptr)
        throw Error("FFTW could not create a plan");
      plans_.emplace(key, plan);
      return plan;
    }

   private:
    std::mutex mu_;
    std::map<std::tuple<std::size_t, std::size_t, int>, fftw_plan> plans_;
  };

  PlanCache &cache() {
    static PlanCache c;
    return c;
  }

  ComplexImage transform(const ComplexImage &in, int sign) {
    const std::size_t n = in.size();
    fftw_plan plan = cache().get(in.height(), in.width(), sign);
    thread_local Scratch scratch;
    fftw_complex *buf = scratch.get(n);
    const double *re = in.re_data();
    const double *im = in.im_data();
    for (std::size_t i = 0; i < n; ++i) {
      buf[i][0] = re[i];
      buf[i][1] = im[i];
    }
    fftw_execute_dft(plan, buf, buf);
    ComplexImage out(in.height(), in.width());
    const double s = 1.0 / std::sqrt(static_cast<double>(n));
    double *ore = out.re_data();
    double *oim = out.im_data();
    for (std::size_t i = 0; i < n; ++i) {
      ore[i] = s * buf[i][0];
      oim[i] = s * buf[i][1];
    }
    return out;
  }
}  // namespace

ComplexImage dft2(const ComplexImage &u) {
  return transform(u, FFTW_FORWARD);
}

ComplexImage idft2(const ComplexImage &y) {
  return transform(y, FFTW_BACKWARD);
}

}  // namespace bmri
