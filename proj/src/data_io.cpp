//
// bmri - Copyright 2026 The bmri Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "bmri/data_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <sstream>

#include "bmri/linops.hpp"

namespace bmri {

// Phantoms and measurements

namespace {
  struct Ellipse {
    double cx, cy, a, b, angle, value;
  };

  void add_ellipse(RealImage &img, const Ellipse &e) {
    const double ca = std::cos(e.angle), sa = std::sin(e.angle);
    for (std::size_t r = 0; r < img.height; ++r) {
      const double y =
          2.0 * (static_cast<double>(r) + 0.5) / static_cast<double>(img.height)
          - 1.0;
      for (std::size_t c = 0; c < img.width; ++c) {
        const double x = 2.0 * (static_cast<double>(c) + 0.5)
                             / static_cast<double>(img.width)
                         - 1.0;
        const double dx = x - e.cx, dy = y - e.cy;
        const double u = (ca * dx + sa * dy) / e.a;
        const double v = (-sa * dx + ca * dy) / e.b;
        if (u * u + v * v <= 1.0)
          img(r, c) += e.value;
      }
    }
  }
}  // namespace

ComplexImage make_phantom(Rng &rng, std::size_t height, std::size_t width,
                          int ellipse_count) {
  if (height < 8 || width < 8)
    throw DimensionError("phantoms need at least 8x8 pixels");
  if (ellipse_count < 1)
    throw DomainError("phantoms need at least one ellipse");
  RealImage img(height, width, 0.0);
  add_ellipse(img, { 0.0, 0.0, 0.72, 0.9, 0.0, 1.0 });
  add_ellipse(img, { 0.0, 0.0, 0.64, 0.82, 0.0, -0.8 });
  for (int k = 0; k < ellipse_count; ++k) {
    Ellipse e;
    // centers inside the inner region, axes small enough to stay mostly inside
    const double rad = 0.55 * std::sqrt(rng.uniform());
    const double phi = 2.0 * std::numbers::pi * rng.uniform();
    e.cx = 0.8 * rad * std::cos(phi);
    e.cy = rad * std::sin(phi);
    e.a = 0.06 + 0.24 * rng.uniform();
    e.b = 0.06 + 0.24 * rng.uniform();
    e.angle = std::numbers::pi * rng.uniform();
    e.value = 0.1 + 0.4 * rng.uniform();
    add_ellipse(img, e);
  }
  for (double &v : img.data)
    v = std::clamp(v, 0.0, 1.0);
  return ComplexImage::from_real(img);
}

ComplexImage simulate_measurements(const ComplexImage &u_star,
                                   double noise_sigma, Rng &rng) {
  if (!(noise_sigma >= 0.0))
    throw DomainError("noise level must be nonnegative");
  ComplexImage y = dft2(u_star);
  if (noise_sigma > 0.0)
    y += cgauss_sample(rng, y.height(), y.width(), noise_sigma);
  return y;
}

double relative_noise_sigma(const ComplexImage &u_star, double noise_rel) {
  const RealImage mag = dft2(u_star).magnitude();
  return noise_rel * *std::max_element(mag.data.begin(), mag.data.end());
}

const char *to_string(Split split) noexcept {
  return split == Split::kTrain ? "train" : "test";
}

Split parse_split(const std::string &text) {
  if (text == "train")
    return Split::kTrain;
  if (text == "test")
    return Split::kTest;
  throw ConfigError("unknown split '" + text + "'");
}

std::vector<TrainingPair> Dataset::subset(Split split) const {
  std::vector<TrainingPair> out;
  for (std::size_t i = 0; i < pairs.size(); ++i)
    if (splits[i] == split)
      out.push_back(pairs[i]);
  return out;
}

Dataset generate_dataset(const DatasetSpec &spec) {
  if (spec.n_train + spec.n_test == 0)
    throw ConfigError("dataset must contain at least one pair");
  if (!(spec.noise_rel >= 0.0))
    throw ConfigError("noise_rel must be nonnegative");
  Dataset ds;
  ds.spec = spec;
  const Rng root(spec.seed);
  const std::size_t total = spec.n_train + spec.n_test;
  for (std::size_t i = 0; i < total; ++i) {
    const Rng pair_rng = root.derive(static_cast<std::uint64_t>(i));
    Rng shape_rng = pair_rng.derive("phantom");
    Rng noise_rng = pair_rng.derive("noise");
    TrainingPair p;
    p.u_star = make_phantom(shape_rng, spec.height, spec.width, spec.ellipses);
    p.y = simulate_measurements(
        p.u_star, relative_noise_sigma(p.u_star, spec.noise_rel), noise_rng);
    ds.pairs.push_back(std::move(p));
    ds.splits.push_back(i < spec.n_train ? Split::kTrain : Split::kTest);
  }
  return ds;
}

// Field files

FieldFile FieldFile::from_real(const RealImage &img) {
  return { FieldKind::kRealImage, static_cast<std::uint32_t>(img.height),
           static_cast<std::uint32_t>(img.width), img.data };
}

FieldFile FieldFile::from_complex(const ComplexImage &img) {
  FieldFile f { FieldKind::kComplexImage,
                static_cast<std::uint32_t>(img.height()),
                static_cast<std::uint32_t>(img.width()),
                {} };
  f.payload.reserve(2 * img.size());
  f.payload.insert(f.payload.end(), img.re().begin(), img.re().end());
  f.payload.insert(f.payload.end(), img.im().begin(), img.im().end());
  return f;
}

FieldFile FieldFile::from_pattern(const ParamVector &p) {
  return { FieldKind::kPattern, static_cast<std::uint32_t>(p.height),
           static_cast<std::uint32_t>(p.width), p.weights };
}

FieldFile FieldFile::from_params(const ParamVector &p) {
  FieldFile f { FieldKind::kParamVector, static_cast<std::uint32_t>(p.height),
                static_cast<std::uint32_t>(p.width), p.weights };
  f.payload.push_back(p.alpha);
  return f;
}

std::size_t FieldFile::expected_payload() const {
  const std::size_t n = std::size_t { height } * width;
  switch (kind) {
  case FieldKind::kRealImage:
  case FieldKind::kPattern:
    return n;
  case FieldKind::kComplexImage:
    return 2 * n;
  case FieldKind::kParamVector:
    return n + 1;
  }
  return n;
}

RealImage FieldFile::to_real() const {
  if (kind != FieldKind::kRealImage && kind != FieldKind::kPattern)
    throw IoError("field is not a real plane");
  RealImage img(height, width);
  std::copy_n(payload.begin(), img.size(), img.data.begin());
  return img;
}

ComplexImage FieldFile::to_complex() const {
  const std::size_t n = std::size_t { height } * width;
  if (kind == FieldKind::kRealImage)
    return ComplexImage::from_real(to_real());
  if (kind != FieldKind::kComplexImage)
    throw IoError("field is not an image");
  return ComplexImage::from_planes(
      height, width, std::vector<double>(payload.begin(), payload.begin() + n),
      std::vector<double>(payload.begin() + n, payload.end()));
}

ParamVector FieldFile::to_params() const {
  if (kind != FieldKind::kPattern && kind != FieldKind::kParamVector)
    throw IoError("field is not a pattern");
  const std::size_t n = std::size_t { height } * width;
  ParamVector p(height, width, 0.0,
                kind == FieldKind::kParamVector ? payload[n] : 0.0);
  std::copy_n(payload.begin(), n, p.weights.begin());
  return p;
}

namespace {
  constexpr std::uint8_t kMagic[4] = { 'B', 'K', 'F', '1' };
  constexpr std::size_t kHeaderBytes = 13;

  void put_u32(std::vector<std::uint8_t> &out, std::uint32_t v) {
    for (int k = 0; k < 4; ++k)
      out.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
  }

  std::uint32_t get_u32(const std::uint8_t *p) {
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k)
      v |= std::uint32_t { p[k] } << (8 * k);
    return v;
  }

  void validate_field(const FieldFile &f) {
    using C = FieldFormatError::Code;
    for (double v : f.payload)
      if (!std::isfinite(v))
        throw FieldFormatError(C::kNonFinite, "field contains a non-finite value");
    const std::size_t n = std::size_t { f.height } * f.width;
    if (f.kind == FieldKind::kPattern || f.kind == FieldKind::kParamVector) {
      for (std::size_t i = 0; i < n; ++i)
        if (f.payload[i] < 0.0 || f.payload[i] > 1.0)
          throw FieldFormatError(C::kOutOfRange,
                                 "pattern weight outside [0,1] at index "
                                     + std::to_string(i));
      if (f.kind == FieldKind::kParamVector && f.payload[n] < 0.0)
        throw FieldFormatError(C::kOutOfRange, "negative alpha");
    }
  }
}  // namespace

std::vector<std::uint8_t> encode_field(const FieldFile &f) {
  if (f.height == 0 || f.width == 0)
    throw DimensionError("field dimensions must be positive");
  if (f.payload.size() != f.expected_payload())
    throw DimensionError("field payload does not match its header");
  validate_field(f);
  std::vector<std::uint8_t> out(kMagic, kMagic + 4);
  out.reserve(kHeaderBytes + 8 * f.payload.size());
  out.push_back(static_cast<std::uint8_t>(f.kind));
  put_u32(out, f.height);
  put_u32(out, f.width);
  for (double v : f.payload) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int k = 0; k < 8; ++k)
      out.push_back(static_cast<std::uint8_t>(bits >> (8 * k)));
  }
  return out;
}

FieldFile decode_field(std::span<const std::uint8_t> bytes) {
  using C = FieldFormatError::Code;
  if (bytes.size() < 4 || !std::equal(kMagic, kMagic + 4, bytes.begin()))
    throw FieldFormatError(C::kBadMagic, "not a BKF1 field file");
  if (bytes.size() < kHeaderBytes)
    throw FieldFormatError(C::kTruncated, "field header is truncated");
  FieldFile f;
  const std::uint8_t kind = bytes[4];
  if (kind > 3)
    throw FieldFormatError(C::kBadKind,
                           "unknown field kind " + std::to_string(kind));
  f.kind = static_cast<FieldKind>(kind);
  f.height = get_u32(bytes.data() + 5);
  f.width = get_u32(bytes.data() + 9);
  if (f.height == 0 || f.width == 0)
    throw FieldFormatError(C::kOutOfRange, "field dimensions must be positive");
  const std::size_t count = f.expected_payload();
  const std::size_t avail = (bytes.size() - kHeaderBytes) / 8;
  if (avail < count)
    throw FieldFormatError(C::kTruncated, "field payload is truncated");
  if (bytes.size() != kHeaderBytes + 8 * count)
    throw FieldFormatError(C::kTrailingData, "field has trailing bytes");
  f.payload.resize(count);
  const std::uint8_t *p = bytes.data() + kHeaderBytes;
  for (std::size_t i = 0; i < count; ++i, p += 8) {
    std::uint64_t bits = 0;
    for (int k = 0; k < 8; ++k)
      bits |= std::uint64_t { p[k] } << (8 * k);
    f.payload[i] = std::bit_cast<double>(bits);
  }
  validate_field(f);
  return f;
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad())
    throw IoError("read error on " + path.string());
  return bytes;
}

void write_bytes(const std::filesystem::path &path,
                 std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out)
    throw IoError("cannot create " + path.string());
  out.write(reinterpret_cast<const char *>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out)
    throw IoError("write error on " + path.string());
}

void write_field(const std::filesystem::path &path, const FieldFile &f) {
  write_bytes(path, encode_field(f));
}

FieldFile read_field(const std::filesystem::path &path) {
  const auto bytes = read_bytes(path);
  try {
    return decode_field(bytes);
  } catch (const FieldFormatError &e) {
    throw FieldFormatError(e.code(), path.string() + ": " + e.what());
  }
}

// PGM

std::vector<std::uint8_t> encode_pgm(const RealImage &plane, bool normalize) {
  if (plane.height == 0 || plane.width == 0)
    throw DimensionError("cannot export an empty plane");
  for (double v : plane.data)
    if (!std::isfinite(v))
      throw DomainError("cannot export non-finite values");
  double lo = 0.0, hi = 1.0;
  if (normalize) {
    const auto [mn, mx] = std::minmax_element(plane.data.begin(), plane.data.end());
    lo = *mn;
    hi = *mx;
  }
  const std::string header = "P5\n" + std::to_string(plane.width) + " "
                             + std::to_string(plane.height) + "\n65535\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(header.size() + 2 * plane.size());
  for (double v : plane.data) {
    double t = 0.0;
    if (hi > lo)
      t = std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
    const auto q = static_cast<std::uint16_t>(std::lround(t * 65535.0));
    out.push_back(static_cast<std::uint8_t>(q >> 8));
    out.push_back(static_cast<std::uint8_t>(q & 0xff));
  }
  return out;
}

void export_pgm(const std::filesystem::path &path, const RealImage &plane,
                bool normalize) {
  write_bytes(path, encode_pgm(plane, normalize));
}

std::vector<std::uint16_t> decode_pgm(std::span<const std::uint8_t> bytes,
                                      std::size_t &height, std::size_t &width) {
  std::string head(bytes.begin(),
                   bytes.begin() + static_cast<std::ptrdiff_t>(
                       std::min<std::size_t>(bytes.size(), 64)));
  std::istringstream is(head);
  std::string magic;
  unsigned maxval = 0;
  is >> magic >> width >> height >> maxval;
  if (!is || magic != "P5" || maxval != 65535)
    throw IoError("not a 16-bit P5 PGM");
  const auto offset = static_cast<std::size_t>(is.tellg()) + 1;
  if (bytes.size() != offset + 2 * height * width)
    throw IoError("PGM payload size mismatch");
  std::vector<std::uint16_t> out(height * width);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = static_cast<std::uint16_t>((bytes[offset + 2 * i] << 8)
                                        | bytes[offset + 2 * i + 1]);
  return out;
}

// Manifests

const std::string *Manifest::find(const std::string &key) const {
  for (const auto &kv : keys)
    if (kv.first == key)
      return &kv.second;
  return nullptr;
}

std::string format_manifest(const Manifest &m) {
  std::ostringstream os;
  os << "# bmri dataset manifest\n";
  for (const auto &[k, v] : m.keys) {
    if (k.empty() || k == "pair" || k.find_first_of(" \t\n#") != std::string::npos)
      throw ConfigError("invalid manifest key '" + k + "'");
    if (v.find('\n') != std::string::npos)
      throw ConfigError("manifest values must be single-line");
    os << k << ' ' << v << '\n';
  }
  for (const auto &e : m.entries)
    os << "pair " << to_string(e.split) << ' ' << e.truth << ' ' << e.kspace
       << '\n';
  return os.str();
}

Manifest parse_manifest(const std::string &text) {
  Manifest m;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#')
      continue;
    const auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    const auto sp = line.find_first_of(" \t");
    const std::string key = line.substr(0, sp);
    std::string rest;
    if (sp != std::string::npos)
      rest = line.substr(line.find_first_not_of(" \t", sp));
    if (key == "pair") {
      std::istringstream ls(rest);
      std::string split, truth, kspace, extra;
      ls >> split >> truth >> kspace;
      if (!ls || (ls >> extra))
        throw ConfigError("manifest line " + std::to_string(lineno)
                          + ": expected 'pair <split> <truth> <kspace>'");
      m.entries.push_back({ parse_split(split), truth, kspace });
    } else {
      m.keys.emplace_back(key, rest);
    }
  }
  return m;
}

namespace {
  std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
  }

  template <class T> T manifest_number(const Manifest &m, const char *key, T fallback) {
    const std::string *v = m.find(key);
    if (v == nullptr)
      return fallback;
    std::istringstream is(*v);
    T out {};
    is >> out;
    if (!is)
      throw ConfigError(std::string("manifest key '") + key + "' is not a number");
    return out;
  }
}  // namespace

std::filesystem::path save_dataset(const std::filesystem::path &dir,
                                   const Dataset &ds) {
  std::filesystem::create_directories(dir);
  Manifest m;
  m.keys = {
    { "height", std::to_string(ds.spec.height) },
    { "width", std::to_string(ds.spec.width) },
    { "n_train", std::to_string(ds.spec.n_train) },
    { "n_test", std::to_string(ds.spec.n_test) },
    { "ellipses", std::to_string(ds.spec.ellipses) },
    { "noise_rel", format_double(ds.spec.noise_rel) },
    { "seed", std::to_string(ds.spec.seed) },
  };
  for (std::size_t i = 0; i < ds.pairs.size(); ++i) {
    char name[64];
    std::snprintf(name, sizeof name, "pair%03zu", i);
    const std::string truth = std::string(name) + "_truth.bkf";
    const std::string kspace = std::string(name) + "_kspace.bkf";
    write_field(dir / truth, FieldFile::from_complex(ds.pairs[i].u_star));
    write_field(dir / kspace, FieldFile::from_complex(ds.pairs[i].y));
    m.entries.push_back({ ds.splits[i], truth, kspace });
  }
  const auto path = dir / "manifest.txt";
  const std::string text = format_manifest(m);
  write_bytes(path, std::span(reinterpret_cast<const std::uint8_t *>(text.data()),
                              text.size()));
  return path;
}

Dataset load_dataset(const std::filesystem::path &manifest_path) {
  const auto bytes = read_bytes(manifest_path);
  const Manifest m = parse_manifest(std::string(bytes.begin(), bytes.end()));
  if (m.entries.empty())
    throw ConfigError("manifest lists no pairs");
  Dataset ds;
  ds.spec.height = manifest_number<std::size_t>(m, "height", 0);
  ds.spec.width = manifest_number<std::size_t>(m, "width", 0);
  ds.spec.n_train = manifest_number<std::size_t>(m, "n_train", 0);
  ds.spec.n_test = manifest_number<std::size_t>(m, "n_test", 0);
  ds.spec.ellipses = manifest_number<int>(m, "ellipses", 0);
  ds.spec.noise_rel = manifest_number<double>(m, "noise_rel", 0.0);
  ds.spec.seed = manifest_number<std::uint64_t>(m, "seed", 0);
  const auto base = manifest_path.parent_path();
  for (const auto &e : m.entries) {
    TrainingPair p;
    p.u_star = read_field(base / e.truth).to_complex();
    p.y = read_field(base / e.kspace).to_complex();
    if (!p.u_star.same_shape(p.y) || !p.y.same_shape(ds.pairs.empty() ? p.y : ds.pairs.front().y))
      throw DimensionError("dataset pairs differ in shape");
    ds.pairs.push_back(std::move(p));
    ds.splits.push_back(e.split);
  }
  ds.spec.height = ds.pairs.front().y.height();
  ds.spec.width = ds.pairs.front().y.width();
  return ds;
}

}  // namespace bmri
