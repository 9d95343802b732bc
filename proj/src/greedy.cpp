//
// bmri - Copyright 2026 The bmri Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <cmath>
#include <vector>

#include "bmri/eval.hpp"
#include "bmri/parallel.hpp"

namespace bmri {

GreedyResult greedy_lines(const std::vector<TrainingPair> &pairs,
                          const LearnConfig &cfg, double rate,
                          Parametrization::Axis axis) {
  cfg.validate();
  if (pairs.empty())
    throw ConfigError("no training pairs");
  if (!(rate > 0.0 && rate <= 1.0))
    throw DomainError("line rate must lie in (0, 1]");
  const std::size_t h = pairs.front().y.height(), w = pairs.front().y.width();
  const bool vertical = axis == Parametrization::Axis::kVertical;
  const std::size_t lines = vertical ? w : h;
  const auto budget =
      static_cast<std::size_t>(std::lround(rate * static_cast<double>(lines)));
  if (budget == 0)
    throw DegenerateError("line budget is zero");

  GreedyResult res;
  const LearnResult pre = tune_alpha(pairs, cfg, std::vector<double>(h * w, 1.0),
                                     resolve_alpha0(pairs, cfg));
  res.alpha_fixed = pre.params.alpha;
  res.lower_solves += pre.lower_solves;

  std::vector<bool> taken(lines, false);
  ParamVector current(h, w, 0.0, res.alpha_fixed);
  auto with_line = [&](ParamVector p, std::size_t line) {
    for (std::size_t j = 0; j < (vertical ? h : w); ++j)
      p.weights[vertical ? j * w + line : line * w + j] = 1.0;
    return p;
  };

  LearnConfig serial = cfg;
  serial.threads = 1;
  for (std::size_t step = 0; step < budget; ++step) {
    std::vector<std::size_t> cand;
    for (std::size_t l = 0; l < lines; ++l)
      if (!taken[l])
        cand.push_back(l);
    std::vector<double> value(cand.size(), 0.0);
    parallel_for(cand.size(), cfg.threads, [&](std::size_t j) {
      const ParamVector trial = with_line(current, cand[j]);
      double s = 0.0;
      for (const auto &pair : pairs)
        s += ssim(reconstruct(pair, trial, serial), pair.u_star);
      value[j] = s / static_cast<double>(pairs.size());
    });
    res.lower_solves += static_cast<long>(cand.size() * pairs.size());
    std::size_t best = 0;
    for (std::size_t j = 1; j < cand.size(); ++j)
      if (value[j] > value[best])
        best = j;
    taken[cand[best]] = true;
    current = with_line(current, cand[best]);
    res.order.push_back(cand[best]);
    res.values.push_back(value[best]);
  }

  const LearnResult post =
      tune_alpha(pairs, cfg, current.weights, res.alpha_fixed);
  res.lower_solves += post.lower_solves;
  res.params = current;
  res.params.alpha = post.params.alpha;
  return res;
}

}  // namespace bmri
