//
// bmri - Copyright 2026 The bmri Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bmri/core.hpp"
#include "bmri/upper_level.hpp"

namespace bmri {

/// Real-valued phantom: a fixed skull-like ring plus `ellipse_count` random
/// rotated ellipses with intensities in [0.1, 0.5], clipped to [0, 1].
ComplexImage make_phantom(Rng &rng, std::size_t height, std::size_t width,
                          int ellipse_count);

/// dft2(u_star) plus complex Gaussian noise of standard deviation sigma.
ComplexImage simulate_measurements(const ComplexImage &u_star,
                                   double noise_sigma, Rng &rng);

/// noise_rel * max |dft2(u_star)|
double relative_noise_sigma(const ComplexImage &u_star, double noise_rel);

enum class Split { kTrain, kTest };
const char *to_string(Split split) noexcept;
Split parse_split(const std::string &text);

struct DatasetSpec {
  std::size_t height = 32;
  std::size_t width = 32;
  std::size_t n_train = 5;
  std::size_t n_test = 10;
  int ellipses = 6;
  double noise_rel = 0.02;
  std::uint64_t seed = 1;
};

struct Dataset {
  std::vector<TrainingPair> pairs;
  std::vector<Split> splits;
  DatasetSpec spec;

  std::vector<TrainingPair> subset(Split split) const;
};

/// Pair i draws its phantom and noise from streams derived from (seed, i),
/// so each pair is independent of how many others are generated.
Dataset generate_dataset(const DatasetSpec &spec);

enum class FieldKind : std::uint8_t {
  kRealImage = 0,
  kComplexImage = 1,
  kPattern = 2,
  kParamVector = 3,
};

/// "BKF1", kind byte, u32 height, u32 width (little endian), then f64 LE
/// payload: row-major plane(s); complex = re plane then im plane;
/// param vector = n weights then alpha.
struct FieldFile {
  FieldKind kind = FieldKind::kRealImage;
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  std::vector<double> payload;

  static FieldFile from_real(const RealImage &img);
  static FieldFile from_complex(const ComplexImage &img);
  static FieldFile from_pattern(const ParamVector &p);
  static FieldFile from_params(const ParamVector &p);

  RealImage to_real() const;
  ComplexImage to_complex() const;
  /// Pattern or param vector; alpha is 0 for a bare pattern.
  ParamVector to_params() const;

  std::size_t expected_payload() const;
};

class FieldFormatError : public IoError {
 public:
  enum class Code {
    kBadMagic,
    kBadKind,
    kTruncated,
    kTrailingData,
    kNonFinite,
    kOutOfRange,
  };

  FieldFormatError(Code code, const std::string &what)
      : IoError(what), code_(code) { }
  Code code() const noexcept { return code_; }

 private:
  Code code_;
};

std::vector<std::uint8_t> encode_field(const FieldFile &f);
FieldFile decode_field(std::span<const std::uint8_t> bytes);
void write_field(const std::filesystem::path &path, const FieldFile &f);
FieldFile read_field(const std::filesystem::path &path);

/// Binary 16-bit PGM (P5, maxval 65535, big-endian samples).
std::vector<std::uint8_t> encode_pgm(const RealImage &plane, bool normalize);
void export_pgm(const std::filesystem::path &path, const RealImage &plane,
                bool normalize);
/// Reads back a file written by export_pgm as raw 16-bit samples.
std::vector<std::uint16_t> decode_pgm(std::span<const std::uint8_t> bytes,
                                      std::size_t &height, std::size_t &width);

/// Line-oriented dataset manifest:
///   # comment
///   <key> <value>
///   pair <train|test> <truth file> <kspace file>
/// File names are relative to the manifest's directory.
struct ManifestEntry {
  Split split = Split::kTrain;
  std::string truth;
  std::string kspace;
};

struct Manifest {
  std::vector<std::pair<std::string, std::string>> keys;
  std::vector<ManifestEntry> entries;

  const std::string *find(const std::string &key) const;
};

std::string format_manifest(const Manifest &m);
Manifest parse_manifest(const std::string &text);

/// Writes every pair as BKF files plus manifest.txt into `dir`.
std::filesystem::path save_dataset(const std::filesystem::path &dir,
                                   const Dataset &ds);
Dataset load_dataset(const std::filesystem::path &manifest_path);

std::vector<std::uint8_t> read_bytes(const std::filesystem::path &path);
void write_bytes(const std::filesystem::path &path,
                 std::span<const std::uint8_t> bytes);

}  // namespace bmri
