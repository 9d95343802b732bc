//
// bmri - Copyright 2026 The bmri Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "bmri/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <optional>

#include "bmri/config.hpp"
#include "bmri/data_io.hpp"
#include "bmri/eval.hpp"
#include "bmri/kernels.hpp"

namespace bmri {
namespace fs = std::filesystem;

namespace {
  struct Globals {
    std::string config;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<double> tol;
  };

  ExperimentConfig load(const Globals &g) {
    ExperimentConfig cfg;
    if (!g.config.empty()) {
      if (!fs::exists(g.config))
        throw IoError("config file not found: " + g.config);
      cfg = load_config(g.config);
    }
    if (g.out)
      cfg.out = *g.out;
    if (g.seed) {
      cfg.seed = *g.seed;
      cfg.dataset.seed = *g.seed;
    }
    if (g.threads)
      cfg.threads = *g.threads;
    if (g.tol)
      cfg.learn.pdhg_tol = *g.tol;
    cfg.learn.threads = cfg.threads;
    cfg.learn.seed = cfg.seed;
    cfg.validate();
    fs::create_directories(cfg.out);
    return cfg;
  }

  std::ofstream open_out(const fs::path &p) {
    std::ofstream os(p);
    if (!os)
      throw IoError("cannot create " + p.string());
    os.precision(17);
    return os;
  }

  ParamVector read_pattern(const std::string &path,
                           std::optional<double> alpha) {
    if (!fs::exists(path))
      throw IoError("pattern file not found: " + path);
    ParamVector p = read_field(path).to_params();
    if (alpha)
      p.alpha = *alpha;
    p.validate();
    return p;
  }

  void write_pattern_outputs(const fs::path &stem, const ParamVector &p) {
    write_field(stem.string() + ".bkf", FieldFile::from_params(p));
    export_pgm(stem.string() + ".pgm", fftshift(pattern_plane(p)), false);
  }

  void write_metrics(std::ostream &os, const std::string &id, double fraction,
                     const std::vector<double> &ssim_v,
                     const std::vector<double> &psnr_v) {
    for (std::size_t i = 0; i < ssim_v.size(); ++i)
      os << id << ',' << i << ',' << fraction << ',' << ssim_v[i] << ','
         << psnr_v[i] << '\n';
    const MeanSe s = mean_se(ssim_v), q = mean_se(psnr_v);
    os << id << ",mean," << fraction << ',' << s.mean << ',' << q.mean << '\n';
    os << id << ",se," << fraction << ',' << s.se << ',' << q.se << '\n';
  }

  constexpr const char *kMetricsHeader = "pattern,image,sampling_fraction,ssim,psnr\n";

  int cmd_gen_data(const Globals &g, std::ostream &out) {
    const ExperimentConfig cfg = load(g);
    const Dataset ds = generate_dataset(cfg.dataset);
    const fs::path manifest = save_dataset(fs::path(cfg.out) / "data", ds);
    for (std::size_t i = 0; i < ds.pairs.size(); ++i)
      export_pgm(fs::path(cfg.out) / "data" / ("pair" + std::to_string(i) + "_truth.pgm"),
                 ds.pairs[i].u_star.real_part(), false);
    out << "wrote " << ds.pairs.size() << " pairs, manifest " << manifest.string()
        << '\n';
    return kExitOk;
  }

  int cmd_learn(const Globals &g, bool threshold, std::ostream &out) {
    const ExperimentConfig cfg = load(g);
    const Dataset ds = obtain_dataset(cfg);
    const auto train = ds.subset(Split::kTrain);
    const LearnConfig lc = resolve_learn_config(cfg, train);
    const fs::path dir = cfg.out;
    LearnResult r;
    try {
      r = learn(train, lc);
    } catch (const LearnError &e) {
      auto os = open_out(dir / "history.csv");
      write_history_csv(os, e.history());
      throw;
    }
    {
      auto os = open_out(dir / "history.csv");
      write_history_csv(os, r.history);
    }
    write_field(dir / "lambda.bkf", FieldFile::from_params(r.params));
    export_pgm(dir / "pattern.pgm", fftshift(pattern_plane(r.params)), false);
    out << "status: " << to_string(r.status) << "\nsampling_fraction: "
        << r.params.sampling_fraction() << "\nalpha: " << r.params.alpha
        << "\nproj_grad_norm: " << r.final_pg_norm
        << "\nlower_solves: " << r.lower_solves << '\n';
    if (threshold) {
      const ThresholdResult t = threshold_and_retune(r.params, train, lc);
      write_pattern_outputs(dir / "thresholded", t.params);
      out << "thresholded_fraction: " << t.params.sampling_fraction()
          << "\nthresholded_alpha: " << t.params.alpha << '\n';
    }
    return kExitOk;
  }

  int cmd_reconstruct(const Globals &g, const std::string &pattern,
                      std::optional<double> alpha, std::ostream &out) {
    const ExperimentConfig cfg = load(g);
    const ParamVector p = read_pattern(pattern, alpha);
    const Dataset ds = obtain_dataset(cfg);
    const auto train = ds.subset(Split::kTrain);
    const auto test = ds.subset(Split::kTest);
    const LearnConfig lc = resolve_learn_config(cfg, train);
    const fs::path dir = cfg.out;
    std::vector<double> s(test.size()), q(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) {
      const ComplexImage u = reconstruct(test[i], p, lc);
      const std::string stem = "recon_" + std::to_string(i);
      write_field(dir / (stem + ".bkf"), FieldFile::from_complex(u));
      export_pgm(dir / (stem + ".pgm"), u.magnitude(), false);
      s[i] = ssim(u, test[i].u_star);
      q[i] = psnr(u, test[i].u_star);
    }
    auto os = open_out(dir / "metrics.csv");
    os << kMetricsHeader;
    write_metrics(os, fs::path(pattern).stem().string(), p.sampling_fraction(), s, q);
    const MeanSe ms = mean_se(s);
    out << "test ssim " << ms.mean << " +- " << ms.se << '\n';
    return kExitOk;
  }

  int cmd_evaluate(const Globals &g, const std::string &pattern,
                   const std::vector<std::string> &recons,
                   const std::vector<std::string> &truths, std::ostream &out) {
    const ExperimentConfig cfg = load(g);
    const fs::path dir = cfg.out;
    auto os = open_out(dir / "metrics.csv");
    os << kMetricsHeader;
    if (!pattern.empty()) {
      const ParamVector p = read_pattern(pattern, std::nullopt);
      const Dataset ds = obtain_dataset(cfg);
      const auto train = ds.subset(Split::kTrain);
      const LearnConfig lc = resolve_learn_config(cfg, train);
      const PatternScore sc = score_pattern(ds.subset(Split::kTest), p, lc);
      write_metrics(os, fs::path(pattern).stem().string(), p.sampling_fraction(),
                    sc.ssim, sc.psnr);
      out << "test ssim " << sc.ssim_stats.mean << " +- " << sc.ssim_stats.se
          << ", psnr " << sc.psnr_stats.mean << " +- " << sc.psnr_stats.se << '\n';
      return kExitOk;
    }
    if (recons.empty())
      throw ConfigError("evaluate needs --pattern or at least one --recon");
    std::vector<ComplexImage> refs;
    if (!truths.empty()) {
      if (truths.size() != recons.size())
        throw ConfigError("--truth and --recon counts differ");
      for (const auto &t : truths) {
        if (!fs::exists(t))
          throw IoError("truth file not found: " + t);
        refs.push_back(read_field(t).to_complex());
      }
    } else {
      const auto test = obtain_dataset(cfg).subset(Split::kTest);
      if (test.size() < recons.size())
        throw ConfigError("more reconstructions than test images");
      for (std::size_t i = 0; i < recons.size(); ++i)
        refs.push_back(test[i].u_star);
    }
    std::vector<double> s, q;
    for (std::size_t i = 0; i < recons.size(); ++i) {
      if (!fs::exists(recons[i]))
        throw IoError("reconstruction file not found: " + recons[i]);
      const ComplexImage u = read_field(recons[i]).to_complex();
      s.push_back(ssim(u, refs[i]));
      q.push_back(psnr(u, refs[i]));
    }
    write_metrics(os, "recon", 1.0, s, q);
    out << "mean ssim " << mean_se(s).mean << '\n';
    return kExitOk;
  }

  int cmd_baseline(const Globals &g, std::vector<std::string> kinds,
                   std::optional<double> rate, bool retune, std::ostream &out) {
    const ExperimentConfig cfg = load(g);
    if (kinds.empty())
      kinds = cfg.baselines;
    std::optional<std::vector<TrainingPair>> train;
    std::optional<LearnConfig> lc;
    if (retune) {
      train = obtain_dataset(cfg).subset(Split::kTrain);
      lc = resolve_learn_config(cfg, *train);
    }
    const std::size_t h = cfg.dataset.height, w = cfg.dataset.width;
    const Rng root = Rng(cfg.seed).derive("baseline");
    for (const auto &k : kinds) {
      BaselineSpec spec;
      spec.kind = parse_baseline_kind(k);
      spec.rate = rate.value_or(cfg.baseline_rate);
      spec.decay = cfg.baseline_decay;
      spec.axis = cfg.learn.axis;
      Rng rng = root.derive(k);
      ParamVector p = baseline_pattern(spec, h, w, rng);
      if (retune)
        p.alpha = tune_alpha(*train, *lc, p.weights, resolve_alpha0(*train, *lc))
                      .params.alpha;
      write_pattern_outputs(fs::path(cfg.out) / ("baseline_" + k), p);
      out << k << ": " << p.active_count() << " samples, alpha " << p.alpha << '\n';
    }
    return kExitOk;
  }

  int cmd_greedy(const Globals &g, double rate, std::ostream &out) {
    const ExperimentConfig cfg = load(g);
    const auto train = obtain_dataset(cfg).subset(Split::kTrain);
    const LearnConfig lc = resolve_learn_config(cfg, train);
    const GreedyResult r = greedy_lines(train, lc, rate, lc.axis);
    write_pattern_outputs(fs::path(cfg.out) / "greedy", r.params);
    auto os = open_out(fs::path(cfg.out) / "greedy.csv");
    os << "step,line,train_ssim\n";
    for (std::size_t i = 0; i < r.order.size(); ++i)
      os << i << ',' << r.order[i] << ',' << r.values[i] << '\n';
    out << "lines: " << r.order.size() << "\nalpha: " << r.params.alpha
        << "\nlower_solves: " << r.lower_solves << '\n';
    return kExitOk;
  }

  int cmd_kde(const Globals &g, const std::string &pattern,
              std::optional<double> bandwidth, std::ostream &out) {
    const ExperimentConfig cfg = load(g);
    const ParamVector p = read_pattern(pattern, std::nullopt);
    const RealImage d = kde_pattern(p, bandwidth.value_or(cfg.kde_bandwidth));
    write_field(fs::path(cfg.out) / "kde.bkf", FieldFile::from_real(d));
    export_pgm(fs::path(cfg.out) / "kde.pgm", fftshift(d), true);
    out << "wrote kde.bkf\n";
    return kExitOk;
  }

  int cmd_sweep(const Globals &g, std::ostream &out) {
    const ExperimentConfig cfg = load(g);
    const Dataset ds = obtain_dataset(cfg);
    const auto train = ds.subset(Split::kTrain);
    const auto test = ds.subset(Split::kTest);
    const LearnConfig base = resolve_learn_config(cfg, train);
    const fs::path dir = cfg.out;
    auto os = open_out(dir / "sweep.csv");
    os << "beta,sampling_fraction,alpha,test_ssim_mean,test_ssim_se,"
          "test_psnr_mean,test_psnr_se,uniform_ssim_mean,uniform_ssim_se,"
          "proj_grad_norm,status,lower_solves\n";
    const Rng root = Rng(cfg.seed).derive("sweep-uniform");
    for (std::size_t b = 0; b < cfg.betas.size(); ++b) {
      LearnConfig lc = base;
      lc.beta = cfg.betas[b];
      const LearnResult r = learn(train, lc);
      const std::string tag = "beta" + std::to_string(b);
      {
        auto hs = open_out(dir / ("history_" + tag + ".csv"));
        write_history_csv(hs, r.history);
      }
      write_pattern_outputs(dir / ("lambda_" + tag), r.params);
      const PatternScore sc = score_pattern(test, r.params, lc);

      // uniform random pattern with the same number of samples, alpha
      // retuned on the training set
      MeanSe uni {};
      const std::size_t count = r.params.active_count();
      if (count > 0) {
        Rng rng = root.derive(static_cast<std::uint64_t>(b));
        ParamVector u = uniform_random_pattern(r.params.height, r.params.width,
                                               count, rng);
        u.alpha = tune_alpha(train, lc, u.weights, r.phase1_alpha).params.alpha;
        uni = score_pattern(test, u, lc).ssim_stats;
      }
      os << lc.beta << ',' << r.params.sampling_fraction() << ','
         << r.params.alpha << ',' << sc.ssim_stats.mean << ',' << sc.ssim_stats.se
         << ',' << sc.psnr_stats.mean << ',' << sc.psnr_stats.se << ','
         << uni.mean << ',' << uni.se << ',' << r.final_pg_norm << ",\""
         << to_string(r.status) << "\"," << r.lower_solves << '\n';
      os.flush();
      out << "beta " << lc.beta << ": fraction " << r.params.sampling_fraction()
          << ", test ssim " << sc.ssim_stats.mean << " (uniform " << uni.mean
          << ")\n";
    }
    return kExitOk;
  }
}  // namespace

int run_cli(int argc, const char *const *argv, std::ostream &out,
            std::ostream &err) {
  CLI::App app { "Bilevel learning of k-space sampling patterns" };
  app.name("bmri");
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "Experiment config (INI)");
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--seed", g.seed, "Seed for data generation and baselines");
  app.add_option("--threads", g.threads, "Worker threads")
      ->check(CLI::Range(1u, 4096u));
  app.add_option("--tol", g.tol, "Lower-level solver tolerance")
      ->check(CLI::PositiveNumber);

  auto *gen = app.add_subcommand("gen-data", "Generate a phantom dataset");
  bool threshold = false;
  auto *lrn = app.add_subcommand("learn", "Learn a sampling pattern");
  lrn->add_flag("--threshold", threshold,
                "Binarize the learned pattern and retune alpha");
  std::string pattern;
  std::optional<double> alpha;
  auto *rec = app.add_subcommand("reconstruct",
                                 "Reconstruct the test split with a pattern");
  rec->add_option("--pattern", pattern, "Pattern or parameter file")->required();
  rec->add_option("--alpha", alpha, "Override alpha");
  std::vector<std::string> recons, truths;
  auto *ev = app.add_subcommand("evaluate", "SSIM/PSNR table");
  ev->add_option("--pattern", pattern, "Pattern to evaluate on the test split");
  ev->add_option("--recon", recons, "Reconstruction files");
  ev->add_option("--truth", truths, "Reference files (default: test split)");
  std::vector<std::string> kinds;
  std::optional<double> rate;
  bool retune = false;
  auto *bl = app.add_subcommand("baseline", "Emit baseline patterns");
  bl->add_option("--kind", kinds,
                 "uniform, variable-density, lowpass or random-lines");
  bl->add_option("--rate", rate, "Sampling rate in (0,1]");
  bl->add_flag("--retune", retune, "Tune alpha on the training split");
  double greedy_rate = 0.25;
  auto *gr = app.add_subcommand("greedy", "Greedy Cartesian line selection");
  gr->add_option("--rate", greedy_rate, "Fraction of lines");
  std::optional<double> bandwidth;
  auto *kd = app.add_subcommand("kde", "Density estimate of a pattern");
  kd->add_option("--pattern", pattern, "Pattern file")->required();
  kd->add_option("--bandwidth", bandwidth, "Gaussian bandwidth in pixels");
  auto *sw = app.add_subcommand("sweep-beta", "Learn over the configured betas");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed())
      return cmd_gen_data(g, out);
    if (lrn->parsed())
      return cmd_learn(g, threshold, out);
    if (rec->parsed())
      return cmd_reconstruct(g, pattern, alpha, out);
    if (ev->parsed())
      return cmd_evaluate(g, pattern, recons, truths, out);
    if (bl->parsed())
      return cmd_baseline(g, kinds, rate, retune, out);
    if (gr->parsed())
      return cmd_greedy(g, greedy_rate, out);
    if (kd->parsed())
      return cmd_kde(g, pattern, bandwidth, out);
    if (sw->parsed())
      return cmd_sweep(g, out);
  } catch (const ConfigError &e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError &e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error &e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const DivergenceError &e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const ConvergenceError &e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const SpdViolationError &e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const OptimizerError &e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const LearnError &e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const TrainingExampleError &e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return kExitOther;
  }
  err << "no subcommand\n";
  return kExitUsage;
}

}  // namespace bmri
