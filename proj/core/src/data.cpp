// Copyright 2026 The QTTT Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qttt/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qttt/errors.hpp"

namespace qttt {
namespace {

constexpr double kMargin = 0.1;
constexpr int kLatentDim = 3;
constexpr double kCurveNoise = 0.1;
constexpr double kCurveOffset = 0.5;
constexpr double kGridNoise = 0.3;

std::vector<double> random_unit(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> v(static_cast<std::size_t>(d));
  double norm = 0.0;
  do {
    for (auto& e : v) e = n(rng);
    norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
  } while (norm < 1e-6);
  for (auto& e : v) e /= norm;
  return v;
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

void guard_nonzero(std::span<double> row) {
  if (std::all_of(row.begin(), row.end(), [](double v) { return v == 0.0; })) row[0] += 1e-12;
}

/// Rejection-samples until both classes hold n/2 samples; `draw` returns a
/// label or -1 to reject.
template <typename Draw>
void fill_balanced(Dataset& ds, std::size_t n, Draw draw) {
  const std::size_t per_class = n / 2;
  std::array<std::vector<std::vector<double>>, 2> pools;
  std::vector<double> x(static_cast<std::size_t>(ds.d_x));
  std::size_t attempts = 0;
  while (pools[0].size() < per_class || pools[1].size() < n - per_class) {
    if (++attempts > 1000 * n) throw Error("dataset generator failed to balance classes");
    const int label = draw(std::span<double>(x));
    if (label < 0) continue;
    const std::size_t cap = label == 0 ? per_class : n - per_class;
    if (pools[static_cast<std::size_t>(label)].size() < cap) {
      pools[static_cast<std::size_t>(label)].push_back(x);
    }
  }
  // Interleave so the pre-shuffle order carries no block structure.
  ds.features = FeatureMatrix(n, static_cast<std::size_t>(ds.d_x));
  ds.labels.clear();
  std::size_t i0 = 0, i1 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const bool take0 = (i % 2 == 0 && i0 < pools[0].size()) || i1 >= pools[1].size();
    const auto& src = take0 ? pools[0][i0++] : pools[1][i1++];
    std::copy(src.begin(), src.end(), ds.features.row(i).begin());
    guard_nonzero(ds.features.row(i));
    ds.labels.push_back(take0 ? 0 : 1);
  }
}

std::pair<int, int> grid_shape(int d_x) {
  if (d_x < 4) {
    throw InvalidArgument("bars-and-stripes needs a grid of at least 2x2; valid d_x are >= 4, got " +
                          std::to_string(d_x));
  }
  int best_r = 2, best_c = 2;
  for (int r = 2; r * 2 <= d_x; ++r) {
    for (int c = r; r * c <= d_x; ++c) {
      const int area = r * c, best = best_r * best_c;
      if (area > best || (area == best && c - r < best_c - best_r)) {
        best_r = r;
        best_c = c;
      }
    }
  }
  return {best_r, best_c};
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw SchemaError("dataset: cannot parse number '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

FeatureMatrix FeatureMatrix::select(std::span<const std::size_t> indices) const {
  FeatureMatrix out(indices.size(), cols_);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= rows_) throw InvalidArgument("FeatureMatrix::select: index out of range");
    const auto src = row(indices[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

std::string_view to_string(DatasetFamily f) {
  switch (f) {
    case DatasetFamily::LinearlySeparable: return "linearly-separable";
    case DatasetFamily::HiddenManifold: return "hidden-manifold";
    case DatasetFamily::TwoCurves: return "two-curves";
    case DatasetFamily::Hyperplanes: return "hyperplanes";
    case DatasetFamily::BarsAndStripes: return "bars-and-stripes";
  }
  return "?";
}

DatasetFamily parse_family(std::string_view name) {
  for (auto f : kAllFamilies) {
    if (to_string(f) == name) return f;
  }
  throw InvalidArgument("unknown dataset family '" + std::string(name) +
                        "' (expected linearly-separable, hidden-manifold, two-curves, "
                        "hyperplanes or bars-and-stripes)");
}

std::vector<double> Dataset::one_hot(std::size_t i) const {
  std::vector<double> y(static_cast<std::size_t>(n_classes), 0.0);
  y[static_cast<std::size_t>(labels.at(i))] = 1.0;
  return y;
}

std::vector<int> Dataset::labels_of(std::span<const std::size_t> indices) const {
  std::vector<int> out;
  out.reserve(indices.size());
  for (auto i : indices) out.push_back(labels.at(i));
  return out;
}

Dataset generate(DatasetFamily family, int d_x, std::uint64_t seed, std::size_t n_samples) {
  if (d_x < 2) throw InvalidArgument("generate: d_x must be >= 2");
  if (n_samples < 10) throw InvalidArgument("generate: need at least 10 samples");
  Dataset ds;
  ds.name = std::string(to_string(family));
  ds.d_x = d_x;
  ds.n_classes = 2;
  ds.seed = seed;
  std::mt19937_64 rng(seed ^ (0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(family) + 1)));
  std::uniform_real_distribution<double> u11(-1.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  switch (family) {
    case DatasetFamily::LinearlySeparable: {
      const auto w = random_unit(rng, d_x);
      fill_balanced(ds, n_samples, [&](std::span<double> x) {
        for (auto& v : x) v = u11(rng);
        const double s = dot(w, x);
        if (std::abs(s) < kMargin) return -1;
        return s > 0 ? 1 : 0;
      });
      break;
    }
    case DatasetFamily::HiddenManifold: {
      std::vector<double> map(static_cast<std::size_t>(d_x * kLatentDim));
      for (auto& v : map) v = gauss(rng);
      const auto v_lat = random_unit(rng, kLatentDim);
      std::vector<double> z(kLatentDim);
      fill_balanced(ds, n_samples, [&](std::span<double> x) {
        for (auto& e : z) e = gauss(rng);
        for (int i = 0; i < d_x; ++i) {
          double acc = 0.0;
          for (int k = 0; k < kLatentDim; ++k) acc += map[static_cast<std::size_t>(i * kLatentDim + k)] * z[static_cast<std::size_t>(k)];
          x[static_cast<std::size_t>(i)] = std::tanh(acc / std::sqrt(double(kLatentDim)));
        }
        return dot(v_lat, z) > 0 ? 1 : 0;
      });
      break;
    }
    case DatasetFamily::TwoCurves: {
      std::uniform_real_distribution<double> freq(0.5, 2.0), phase(0.0, 2.0), t01(0.0, 1.0);
      std::vector<double> a(static_cast<std::size_t>(d_x)), b(static_cast<std::size_t>(d_x));
      for (int i = 0; i < d_x; ++i) {
        a[static_cast<std::size_t>(i)] = freq(rng);
        b[static_cast<std::size_t>(i)] = phase(rng);
      }
      const auto offset = random_unit(rng, d_x);
      int next = 0;
      fill_balanced(ds, n_samples, [&](std::span<double> x) {
        const int label = next;
        next = 1 - next;
        const double t = t01(rng);
        for (std::size_t i = 0; i < x.size(); ++i) {
          x[i] = 0.7 * std::sin(std::numbers::pi * (a[i] * t + b[i])) +
                 (label == 1 ? kCurveOffset * offset[i] : 0.0) + kCurveNoise * gauss(rng);
        }
        return label;
      });
      break;
    }
    case DatasetFamily::Hyperplanes: {
      const auto w1 = random_unit(rng, d_x);
      const auto w2 = random_unit(rng, d_x);
      fill_balanced(ds, n_samples, [&](std::span<double> x) {
        for (auto& v : x) v = u11(rng);
        const double s1 = dot(w1, x), s2 = dot(w2, x);
        if (std::abs(s1) < kMargin / 2 || std::abs(s2) < kMargin / 2) return -1;
        return (s1 > 0) != (s2 > 0) ? 1 : 0;
      });
      break;
    }
    case DatasetFamily::BarsAndStripes: {
      const auto [rows, cols] = grid_shape(d_x);
      std::bernoulli_distribution coin(0.5);
      int next = 0;
      fill_balanced(ds, n_samples, [&](std::span<double> x) {
        const int label = next;  // 0 = bars (columns constant), 1 = stripes (rows constant)
        const int lines = label == 0 ? cols : rows;
        std::vector<double> sign(static_cast<std::size_t>(lines));
        bool mixed = false;
        while (!mixed) {
          for (auto& s : sign) s = coin(rng) ? 1.0 : -1.0;
          mixed = std::any_of(sign.begin(), sign.end(), [&](double s) { return s != sign[0]; });
        }
        next = 1 - next;
        for (int r = 0; r < rows; ++r) {
          for (int c = 0; c < cols; ++c) {
            const double s = sign[static_cast<std::size_t>(label == 0 ? c : r)];
            x[static_cast<std::size_t>(r * cols + c)] = s + kGridNoise * gauss(rng);
          }
        }
        for (int i = rows * cols; i < d_x; ++i) x[static_cast<std::size_t>(i)] = kGridNoise * gauss(rng);
        return label;
      });
      break;
    }
  }

  std::vector<std::size_t> order(n_samples);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t n_test = n_samples / 5;
  ds.train.assign(order.begin(), order.end() - static_cast<std::ptrdiff_t>(n_test));
  ds.test.assign(order.end() - static_cast<std::ptrdiff_t>(n_test), order.end());
  std::sort(ds.train.begin(), ds.train.end());
  std::sort(ds.test.begin(), ds.test.end());
  return ds;
}

std::string_view to_string(CorruptionKind k) {
  switch (k) {
    case CorruptionKind::Brightness: return "brightness";
    case CorruptionKind::Fog: return "fog";
    case CorruptionKind::Snow: return "snow";
    case CorruptionKind::Gaussian: return "gaussian";
  }
  return "?";
}

CorruptionKind parse_corruption(std::string_view name) {
  for (auto k : {CorruptionKind::Brightness, CorruptionKind::Fog, CorruptionKind::Snow,
                 CorruptionKind::Gaussian}) {
    if (to_string(k) == name) return k;
  }
  throw InvalidArgument("unknown corruption '" + std::string(name) +
                        "' (expected brightness, fog, snow or gaussian)");
}

bool CorruptionSpec::is_identity() const noexcept {
  return kind == CorruptionKind::Brightness ? level == 1.0 : level == 0.0;
}

void CorruptionSpec::validate() const {
  if (!std::isfinite(level)) throw InvalidArgument("corruption level must be finite");
  switch (kind) {
    case CorruptionKind::Brightness: break;
    case CorruptionKind::Fog:
      if (level < 0.0 || level > 1.0) throw InvalidArgument("fog intensity must be in [0, 1]");
      break;
    case CorruptionKind::Snow:
      if (level < 0.0 || level > 1.0) throw InvalidArgument("snow probability must be in [0, 1]");
      if (!(snow_low < snow_high)) throw InvalidArgument("snow support must be non-empty");
      break;
    case CorruptionKind::Gaussian:
      if (level < 0.0) throw InvalidArgument("gaussian noise level must be >= 0");
      break;
  }
}

FeatureMatrix corrupt(const FeatureMatrix& features, const CorruptionSpec& spec) {
  spec.validate();
  FeatureMatrix out = features;
  if (spec.is_identity()) return out;
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> flake(spec.snow_low, spec.snow_high);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto row = out.row(i);
    switch (spec.kind) {
      case CorruptionKind::Brightness:
        for (auto& v : row) v *= spec.level;
        break;
      case CorruptionKind::Fog: {
        const double mean = std::accumulate(row.begin(), row.end(), 0.0) /
                            static_cast<double>(row.size());
        for (auto& v : row) v = (1.0 - spec.level) * v + spec.level * mean;
        break;
      }
      case CorruptionKind::Snow:
        for (auto& v : row) {
          if (u01(rng) < spec.level) v += flake(rng);
        }
        break;
      case CorruptionKind::Gaussian:
        for (auto& v : row) v += spec.level * gauss(rng);
        break;
    }
    guard_nonzero(row);
  }
  return out;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string to_hex(std::uint64_t v) {
  char buf[17];
  const auto res = std::to_chars(buf, buf + 16, v, 16);
  std::string s(buf, res.ptr);
  return std::string(16 - s.size(), '0') + s;
}

void save_dataset(const Dataset& ds, const std::filesystem::path& stem) {
  std::ostringstream csv;
  for (int i = 0; i < ds.d_x; ++i) csv << 'f' << i << ',';
  csv << "label\n";
  for (std::size_t r = 0; r < ds.size(); ++r) {
    for (double v : ds.features.row(r)) csv << format_double(v) << ',';
    csv << ds.labels[r] << '\n';
  }
  const std::string body = csv.str();

  const nlohmann::json meta{{"format", "qttt-dataset"},
                            {"version", 1},
                            {"name", ds.name},
                            {"d_x", ds.d_x},
                            {"n_classes", ds.n_classes},
                            {"n_samples", ds.size()},
                            {"seed", ds.seed},
                            {"train", ds.train},
                            {"test", ds.test},
                            {"checksum", "fnv1a64:" + to_hex(fnv1a64(body))}};

  auto csv_path = stem;
  csv_path += ".csv";
  auto json_path = stem;
  json_path += ".json";
  std::ofstream c(csv_path, std::ios::binary);
  std::ofstream j(json_path);
  if (!c || !j) throw Error("cannot write dataset files at " + stem.string());
  c << body;
  j << meta.dump(2) << '\n';
}

Dataset load_dataset(const std::filesystem::path& stem, std::optional<int> expected_d_x) {
  auto csv_path = stem;
  csv_path += ".csv";
  auto json_path = stem;
  json_path += ".json";
  std::ifstream c(csv_path, std::ios::binary);
  std::ifstream j(json_path);
  if (!c || !j) throw Error("cannot read dataset files at " + stem.string());
  const std::string body((std::istreambuf_iterator<char>(c)), std::istreambuf_iterator<char>());

  Dataset ds;
  nlohmann::json meta;
  try {
    j >> meta;
    if (meta.at("format").get<std::string>() != "qttt-dataset") {
      throw SchemaError("dataset: unknown format tag");
    }
    ds.name = meta.at("name").get<std::string>();
    ds.d_x = meta.at("d_x").get<int>();
    ds.n_classes = meta.at("n_classes").get<int>();
    ds.seed = meta.at("seed").get<std::uint64_t>();
    ds.train = meta.at("train").get<std::vector<std::size_t>>();
    ds.test = meta.at("test").get<std::vector<std::size_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("dataset metadata: ") + e.what());
  }
  if (expected_d_x && *expected_d_x != ds.d_x) {
    throw SchemaError("dataset: metadata d_x " + std::to_string(ds.d_x) + " but expected " +
                      std::to_string(*expected_d_x));
  }
  if (meta.at("checksum").get<std::string>() != "fnv1a64:" + to_hex(fnv1a64(body))) {
    throw IntegrityError("dataset: checksum mismatch for " + csv_path.string());
  }

  std::istringstream in(body);
  std::string line;
  std::getline(in, line);
  const auto header = split_commas(line);
  if (header.size() != static_cast<std::size_t>(ds.d_x) + 1 || header.back() != "label") {
    throw SchemaError("dataset: CSV has " + std::to_string(header.size()) +
                      " columns but metadata d_x is " + std::to_string(ds.d_x));
  }
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_commas(line);
    if (cells.size() != header.size()) throw SchemaError("dataset: ragged CSV row");
    for (std::size_t i = 0; i + 1 < cells.size(); ++i) values.push_back(parse_double(cells[i]));
    const int label = static_cast<int>(parse_double(cells.back()));
    if (label < 0 || label >= ds.n_classes) throw SchemaError("dataset: label out of range");
    ds.labels.push_back(label);
  }
  const std::size_t n = ds.labels.size();
  if (meta.at("n_samples").get<std::size_t>() != n) {
    throw SchemaError("dataset: sample count disagrees with metadata");
  }
  ds.features = FeatureMatrix(n, static_cast<std::size_t>(ds.d_x));
  for (std::size_t r = 0; r < n; ++r) {
    std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(r * ds.features.cols()),
                ds.features.cols(), ds.features.row(r).begin());
  }
  for (auto idx : ds.train) {
    if (idx >= n) throw SchemaError("dataset: split index out of range");
  }
  for (auto idx : ds.test) {
    if (idx >= n) throw SchemaError("dataset: split index out of range");
  }
  return ds;
}

}  // namespace qttt
