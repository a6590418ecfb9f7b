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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qttt {

/// Row-major N x d real matrix.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> data() const noexcept { return data_; }

  FeatureMatrix select(std::span<const std::size_t> indices) const;

  bool operator==(const FeatureMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

enum class DatasetFamily : std::uint8_t {
  LinearlySeparable,
  HiddenManifold,
  TwoCurves,
  Hyperplanes,
  BarsAndStripes,
};

std::string_view to_string(DatasetFamily f);
/// Accepts "linearly-separable", "hidden-manifold", "two-curves", "hyperplanes",
/// "bars-and-stripes"; throws InvalidArgument otherwise.
DatasetFamily parse_family(std::string_view name);
inline constexpr DatasetFamily kAllFamilies[] = {
    DatasetFamily::LinearlySeparable, DatasetFamily::HiddenManifold, DatasetFamily::TwoCurves,
    DatasetFamily::Hyperplanes, DatasetFamily::BarsAndStripes};

inline constexpr std::size_t kDefaultSampleCount = 300;

/// Labeled samples with a fixed train/test split.
struct Dataset {
  std::string name;
  int d_x = 0;
  int n_classes = 2;
  std::uint64_t seed = 0;
  FeatureMatrix features;
  std::vector<int> labels;
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;

  std::size_t size() const noexcept { return labels.size(); }
  std::vector<double> one_hot(std::size_t i) const;
  FeatureMatrix train_features() const { return features.select(train); }
  FeatureMatrix test_features() const { return features.select(test); }
  std::vector<int> labels_of(std::span<const std::size_t> indices) const;

  bool operator==(const Dataset&) const = default;
};

/// Binary-class synthetic data, exactly balanced, split 4:1 after a seeded
/// shuffle. Bars-and-stripes needs d_x >= 4.
Dataset generate(DatasetFamily family, int d_x, std::uint64_t seed,
                 std::size_t n_samples = kDefaultSampleCount);

enum class CorruptionKind : std::uint8_t { Brightness, Fog, Snow, Gaussian };

std::string_view to_string(CorruptionKind k);
CorruptionKind parse_corruption(std::string_view name);

/// Classical input corruption.
///
/// brightness: x * level. fog: (1 - level) x + level mean(x), level in [0, 1].
/// snow: each feature gains Unif(snow_low, snow_high) with probability level.
/// gaussian: x + level N(0, 1), level >= 0.
struct CorruptionSpec {
  CorruptionKind kind = CorruptionKind::Gaussian;
  double level = 0.0;
  std::uint64_t seed = 0;
  double snow_low = 0.0;
  double snow_high = 1.0;

  /// True when the corruption leaves every input unchanged.
  bool is_identity() const noexcept;
  void validate() const;
};

/// Applies the corruption row by row. A row that ends up all-zero gets 1e-12
/// added to its first feature so it stays encodable.
FeatureMatrix corrupt(const FeatureMatrix& features, const CorruptionSpec& spec);

/// Writes `<stem>.csv` (header f0..f{d-1},label) and `<stem>.json` (metadata,
/// split, checksum of the CSV bytes).
void save_dataset(const Dataset& ds, const std::filesystem::path& stem);
/// Reads the pair written by save_dataset. Throws SchemaError on a layout
/// mismatch and IntegrityError on a checksum mismatch.
Dataset load_dataset(const std::filesystem::path& stem,
                     std::optional<int> expected_d_x = std::nullopt);

std::uint64_t fnv1a64(std::string_view bytes);
std::string to_hex(std::uint64_t v);

}  // namespace qttt
