//
// bmri - Copyright 2026 The bmri Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "bmri/config.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <map>
#include <sstream>

#include "bmri/linops.hpp"

namespace bmri {

Regularizer resolve_regularizer(const RegularizerChoice &choice,
                                const std::vector<TrainingPair> &pairs) {
  Regularizer reg;
  if (choice.op == "gradient")
    reg.op = AnalysisOp::gradient();
  else if (choice.op == "wavelet")
    reg.op = AnalysisOp::wavelet(choice.levels);
  else if (choice.op == "identity")
    reg.op = AnalysisOp::identity();
  else
    throw ConfigError("unknown analysis operator '" + choice.op + "'");

  if (choice.rho == "zero") {
    reg.rho = RhoSpec::zero();
  } else if (choice.rho == "quadratic") {
    reg.rho = RhoSpec::quadratic();
  } else if (choice.rho == "huber") {
    double g = choice.gamma;
    if (!(g > 0.0)) {
      double mx = 0.0;
      for (const auto &p : pairs) {
        const RealImage m = pixel_abs(grad_apply(p.u_star));
        for (double v : m.data)
          mx = std::max(mx, v);
      }
      if (!(mx > 0.0))
        throw ConfigError("cannot derive gamma from constant training images");
      g = 1e-2 * mx;
    }
    reg.rho = RhoSpec::huber(g);
  } else {
    throw ConfigError("unknown rho '" + choice.rho + "'");
  }
  return reg;
}

void ExperimentConfig::validate() const {
  LearnConfig lc = learn;
  // loss gamma may still be derived later
  if (lc.loss.kind == LossSpec::Kind::kSmoothedTV && !(lc.loss.gamma > 0.0))
    lc.loss.gamma = 1.0;
  lc.validate();
  if (dataset.height < 8 || dataset.width < 8)
    throw ConfigError("dataset images must be at least 8x8");
  if (dataset.n_train == 0)
    throw ConfigError("n_train must be positive");
  if (dataset.ellipses < 1)
    throw ConfigError("ellipses must be positive");
  if (!(dataset.noise_rel >= 0.0))
    throw ConfigError("noise_rel must be nonnegative");
  if (reg.levels < 1)
    throw ConfigError("wavelet levels must be positive");
  for (double b : betas)
    if (!(b >= 0.0))
      throw ConfigError("betas must be nonnegative");
  for (const auto &b : baselines)
    parse_baseline_kind(b);
  if (!(baseline_rate > 0.0 && baseline_rate <= 1.0))
    throw ConfigError("baseline rate must lie in (0, 1]");
  if (!(kde_bandwidth > 0.0))
    throw ConfigError("kde bandwidth must be positive");
  if (threads < 1)
    throw ConfigError("threads must be at least 1");
}

namespace {
  template <class T> T parse_as(const std::string &key, const std::string &text) {
    std::istringstream is(text);
    T v {};
    is >> v;
    if (!is || !(is >> std::ws).eof())
      throw ConfigError("bad value '" + text + "' for " + key);
    return v;
  }

  std::string single(const CLI::ConfigItem &it, const std::string &key) {
    if (it.inputs.size() != 1)
      throw ConfigError(key + " expects exactly one value");
    return it.inputs.front();
  }

  using Setter = std::function<void(ExperimentConfig &, const CLI::ConfigItem &,
                                    const std::string &)>;

  template <class T, class F> Setter scalar(F field) {
    return [field](ExperimentConfig &c, const CLI::ConfigItem &it,
                   const std::string &key) {
      field(c) = parse_as<T>(key, single(it, key));
    };
  }

  const std::map<std::string, Setter> &setters() {
    static const std::map<std::string, Setter> table = {
      { "dataset.manifest",
        [](ExperimentConfig &c, const CLI::ConfigItem &it, const std::string &k) {
          c.manifest = single(it, k);
        } },
      { "dataset.height", scalar<std::size_t>([](ExperimentConfig &c) -> auto & {
          return c.dataset.height;
        }) },
      { "dataset.width", scalar<std::size_t>([](ExperimentConfig &c) -> auto & {
          return c.dataset.width;
        }) },
      { "dataset.n_train", scalar<std::size_t>([](ExperimentConfig &c) -> auto & {
          return c.dataset.n_train;
        }) },
      { "dataset.n_test", scalar<std::size_t>([](ExperimentConfig &c) -> auto & {
          return c.dataset.n_test;
        }) },
      { "dataset.ellipses", scalar<int>([](ExperimentConfig &c) -> auto & {
          return c.dataset.ellipses;
        }) },
      { "dataset.noise_rel", scalar<double>([](ExperimentConfig &c) -> auto & {
          return c.dataset.noise_rel;
        }) },
      { "dataset.seed", scalar<std::uint64_t>([](ExperimentConfig &c) -> auto & {
          return c.dataset.seed;
        }) },
      { "regularizer.rho",
        [](ExperimentConfig &c, const CLI::ConfigItem &it, const std::string &k) {
          c.reg.rho = single(it, k);
        } },
      { "regularizer.gamma", scalar<double>([](ExperimentConfig &c) -> auto & {
          return c.reg.gamma;
        }) },
      { "regularizer.operator",
        [](ExperimentConfig &c, const CLI::ConfigItem &it, const std::string &k) {
          c.reg.op = single(it, k);
        } },
      { "regularizer.levels", scalar<int>([](ExperimentConfig &c) -> auto & {
          return c.reg.levels;
        }) },
      { "lower.eps", scalar<double>([](ExperimentConfig &c) -> auto & {
          return c.learn.eps;
        }) },
      { "lower.tol", scalar<double>([](ExperimentConfig &c) -> auto & {
          return c.learn.pdhg_tol;
        }) },
      { "lower.maxit", scalar<int>([](ExperimentConfig &c) -> auto & {
          return c.learn.pdhg_maxit;
        }) },
      { "adjoint.cg_tol", scalar<double>([](ExperimentConfig &c) -> auto & {
          return c.learn.cg_tol;
        }) },
      { "adjoint.cg_maxit", scalar<int>([](ExperimentConfig &c) -> auto & {
          return c.learn.cg_maxit;
        }) },
      { "learn.beta", scalar<double>([](ExperimentConfig &c) -> auto & {
          return c.learn.beta;
        }) },
      { "learn.parametrization",
        [](ExperimentConfig &c, const CLI::ConfigItem &it, const std::string &k) {
          const std::string v = single(it, k);
          if (v == "free")
            c.learn.param = Parametrization::Kind::kFree;
          else if (v == "lines")
            c.learn.param = Parametrization::Kind::kCartesianLines;
          else if (v == "alpha")
            c.learn.param = Parametrization::Kind::kAlphaOnly;
          else
            throw ConfigError("unknown parametrization '" + v + "'");
        } },
      { "learn.axis",
        [](ExperimentConfig &c, const CLI::ConfigItem &it, const std::string &k) {
          const std::string v = single(it, k);
          if (v == "vertical")
            c.learn.axis = Parametrization::Axis::kVertical;
          else if (v == "horizontal")
            c.learn.axis = Parametrization::Axis::kHorizontal;
          else
            throw ConfigError("unknown axis '" + v + "'");
        } },
      { "learn.memory", scalar<int>([](ExperimentConfig &c) -> auto & {
          return c.learn.memory;
        }) },
      { "learn.maxiter", scalar<int>([](ExperimentConfig &c) -> auto & {
          return c.learn.maxiter;
        }) },
      { "learn.pgtol", scalar<double>([](ExperimentConfig &c) -> auto & {
          return c.learn.pgtol;
        }) },
      { "learn.frtol", scalar<double>([](ExperimentConfig &c) -> auto & {
          return c.learn.frtol;
        }) },
      { "learn.phase1_maxiter", scalar<int>([](ExperimentConfig &c) -> auto & {
          return c.learn.phase1_maxiter;
        }) },
      { "learn.alpha0", scalar<double>([](ExperimentConfig &c) -> auto & {
          return c.learn.alpha0;
        }) },
      { "learn.alpha_max_factor", scalar<double>([](ExperimentConfig &c) -> auto & {
          return c.learn.alpha_max_factor;
        }) },
      { "learn.warm_trust", scalar<double>([](ExperimentConfig &c) -> auto & {
          return c.learn.warm_trust;
        }) },
      { "learn.loss",
        [](ExperimentConfig &c, const CLI::ConfigItem &it, const std::string &k) {
          const std::string v = single(it, k);
          if (v == "l2")
            c.learn.loss.kind = LossSpec::Kind::kSquaredL2;
          else if (v == "smoothed-tv")
            c.learn.loss.kind = LossSpec::Kind::kSmoothedTV;
          else
            throw ConfigError("unknown loss '" + v + "'");
        } },
      { "learn.loss_gamma", scalar<double>([](ExperimentConfig &c) -> auto & {
          return c.learn.loss.gamma;
        }) },
      { "sweep.betas",
        [](ExperimentConfig &c, const CLI::ConfigItem &it, const std::string &k) {
          c.betas.clear();
          for (const auto &s : it.inputs)
            c.betas.push_back(parse_as<double>(k, s));
          if (c.betas.empty())
            throw ConfigError(k + " needs at least one value");
        } },
      { "baseline.kinds",
        [](ExperimentConfig &c, const CLI::ConfigItem &it, const std::string &) {
          c.baselines = it.inputs;
        } },
      { "baseline.rate", scalar<double>([](ExperimentConfig &c) -> auto & {
          return c.baseline_rate;
        }) },
      { "baseline.decay", scalar<double>([](ExperimentConfig &c) -> auto & {
          return c.baseline_decay;
        }) },
      { "eval.kde_bandwidth", scalar<double>([](ExperimentConfig &c) -> auto & {
          return c.kde_bandwidth;
        }) },
      { "run.out",
        [](ExperimentConfig &c, const CLI::ConfigItem &it, const std::string &k) {
          c.out = single(it, k);
        } },
      { "run.seed", scalar<std::uint64_t>([](ExperimentConfig &c) -> auto & {
          return c.seed;
        }) },
      { "run.threads", scalar<unsigned>([](ExperimentConfig &c) -> auto & {
          return c.threads;
        }) },
    };
    return table;
  }
}  // namespace

ExperimentConfig parse_config(std::istream &in) {
  ExperimentConfig cfg;
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_config(in);
  } catch (const CLI::Error &e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  for (const auto &it : items) {
    if (it.name == "++" || it.name == "--")
      continue;
    const std::string key = it.fullname();
    const auto found = setters().find(key);
    if (found == setters().end())
      throw ConfigError("unknown config key '" + key + "'");
    found->second(cfg, it, key);
  }
  cfg.learn.seed = cfg.seed;
  cfg.learn.threads = cfg.threads;
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open config " + path.string());
  return parse_config(in);
}

Dataset obtain_dataset(const ExperimentConfig &cfg) {
  if (!cfg.manifest.empty()) {
    if (!std::filesystem::exists(cfg.manifest))
      throw IoError("manifest not found: " + cfg.manifest);
    return load_dataset(cfg.manifest);
  }
  return generate_dataset(cfg.dataset);
}

LearnConfig resolve_learn_config(const ExperimentConfig &cfg,
                                 const std::vector<TrainingPair> &train) {
  LearnConfig lc = cfg.learn;
  lc.reg = resolve_regularizer(cfg.reg, train);
  lc.threads = cfg.threads;
  lc.seed = cfg.seed;
  if (lc.loss.kind == LossSpec::Kind::kSmoothedTV && !(lc.loss.gamma > 0.0))
    lc.loss.gamma = lc.reg.rho.kind == RhoSpec::Kind::kHuberCubic
                        ? lc.reg.rho.gamma
                        : 1e-2;
  lc.validate();
  return lc;
}

}  // namespace bmri
