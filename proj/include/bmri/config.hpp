//
// bmri - Copyright 2026 The bmri Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "bmri/data_io.hpp"
#include "bmri/eval.hpp"
#include "bmri/upper_level.hpp"

namespace bmri {

/// Regularizer as written in a config; gamma <= 0 means "derive from data".
struct RegularizerChoice {
  std::string rho = "huber";
  double gamma = 0.0;
  std::string op = "gradient";
  int levels = 2;
};

/// Resolves the choice against the training images: the automatic Huber
/// gamma is 1e-2 times the largest gradient magnitude over the set.
Regularizer resolve_regularizer(const RegularizerChoice &choice,
                                const std::vector<TrainingPair> &pairs);

struct ExperimentConfig {
  DatasetSpec dataset;
  /// When set, the dataset is read from this manifest instead of generated.
  std::string manifest;
  RegularizerChoice reg;
  LearnConfig learn;
  std::vector<double> betas { 1e-4, 1e-3, 1e-2 };
  std::vector<std::string> baselines { "uniform", "variable-density", "lowpass",
                                       "random-lines" };
  double baseline_rate = 0.25;
  double baseline_decay = 4.0;
  double kde_bandwidth = 2.0;
  std::string out = "out";
  std::uint64_t seed = 1;
  unsigned threads = 1;

  void validate() const;
};

/// INI-style sections: [dataset] [regularizer] [lower] [adjoint] [learn]
/// [sweep] [baseline] [eval] [run]. Unknown keys are errors.
ExperimentConfig parse_config(std::istream &in);
ExperimentConfig load_config(const std::filesystem::path &path);

/// Dataset from the manifest when configured, otherwise generated.
Dataset obtain_dataset(const ExperimentConfig &cfg);

/// LearnConfig with the regularizer resolved against the training split.
LearnConfig resolve_learn_config(const ExperimentConfig &cfg,
                                 const std::vector<TrainingPair> &train);

}  // namespace bmri
