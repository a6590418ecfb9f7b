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

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace qttt {

/// Qubit and layer counts of the Y-shaped circuit plus the two architectural
/// toggles used by the ablation harness.
struct ArchitectureConfig {
  int d_x = 5;
  int n_classes = 2;
  int n_qubits = 3;   ///< data register, N_q
  int n_trash = 0;    ///< trash qubits, N_t; an equal-sized aux register is appended
  int layers_encoder = 4;
  int layers_decoder = 4;
  int layers_main = 4;
  bool use_linear = true;   ///< false: x' = x
  bool reuploading = true;  ///< false: one data layer followed by L_M variational layers

  /// N_q = max(ceil(d_x / 3), ceil(log2 d_x)), all other fields default.
  static ArchitectureConfig for_features(int d_x, int n_classes = 2, int n_trash = 0);

  int total_qubits() const noexcept { return n_qubits + n_trash; }
  /// Number of data-uploading layers in the main branch.
  int data_layers() const noexcept { return reuploading ? layers_main + 1 : 1; }

  /// Throws InvalidArgument when any invariant is violated.
  void validate() const;

  bool operator==(const ArchitectureConfig&) const = default;
};

int auto_qubit_count(int d_x);

void to_json(nlohmann::json& j, const ArchitectureConfig& a);
void from_json(const nlohmann::json& j, ArchitectureConfig& a);

enum class Segment : std::uint8_t { Linear, Encoder, Decoder, Main, Alpha, Sigma };
inline constexpr std::array<Segment, 6> kAllSegments{Segment::Linear, Segment::Encoder,
                                                     Segment::Decoder, Segment::Main,
                                                     Segment::Alpha, Segment::Sigma};

std::string_view to_string(Segment s);

/// Small set of parameter segments.
class SegmentSet {
 public:
  constexpr SegmentSet() = default;
  constexpr SegmentSet(std::initializer_list<Segment> segs) {
    for (auto s : segs) bits_ |= bit(s);
  }
  static constexpr SegmentSet all() {
    return {Segment::Linear, Segment::Encoder, Segment::Decoder,
            Segment::Main,   Segment::Alpha,   Segment::Sigma};
  }
  constexpr bool contains(Segment s) const { return (bits_ & bit(s)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr SegmentSet& insert(Segment s) {
    bits_ |= bit(s);
    return *this;
  }
  constexpr bool operator==(const SegmentSet&) const = default;

 private:
  static constexpr std::uint8_t bit(Segment s) {
    return static_cast<std::uint8_t>(1U << static_cast<unsigned>(s));
  }
  std::uint8_t bits_ = 0;
};

struct SegmentRange {
  std::size_t offset = 0;
  std::size_t size = 0;
  std::size_t end() const noexcept { return offset + size; }
};

/// Offsets of every named segment inside the flat parameter vector.
///
/// Order: theta_L (M row-major then b), theta_E, theta_D, theta_M, alpha (C x N_q
/// row-major), sigma (log sigma_MT, log sigma_AE). Rotation layers store angles
/// per qubit as (theta, phi, lambda). theta_M holds the variational angles of
/// every layer followed by the data weights w_1..w_{L+1}, d_x each.
class ParamLayout {
 public:
  explicit ParamLayout(const ArchitectureConfig& arch);

  SegmentRange range(Segment s) const { return ranges_[static_cast<std::size_t>(s)]; }
  std::size_t total() const noexcept { return ranges_.back().end(); }
  std::size_t size_of(SegmentSet set) const;

  std::size_t linear_matrix(int row, int col) const;
  std::size_t linear_bias(int row) const;
  /// Rotation angle `slot` of `qubit` in encoder/decoder layer `layer`.
  std::size_t encoder_angle(int layer, int qubit, int slot) const;
  std::size_t decoder_angle(int layer, int qubit, int slot) const;
  std::size_t main_variational_angle(int layer, int qubit, int slot) const;
  std::size_t main_data_weight(int data_layer, int feature) const;
  std::size_t alpha(int cls, int qubit) const;
  std::size_t log_sigma_mt() const { return range(Segment::Sigma).offset; }
  std::size_t log_sigma_ae() const { return range(Segment::Sigma).offset + 1; }

  /// Which segment a flat index belongs to.
  Segment segment_of(std::size_t index) const;

 private:
  ArchitectureConfig arch_;
  std::array<SegmentRange, 6> ranges_{};
};

/// All trainable parameters as one flat vector with named segments.
class QtttParams {
 public:
  /// Deterministic initialization: theta_L = identity map, circuit angles
  /// ~ N(0, 0.1^2), data weights = 1, alpha = 1, log sigma = 0.
  static QtttParams initial(const ArchitectureConfig& arch, std::uint64_t seed);
  /// Wraps explicit values; throws InvalidArgument on a length mismatch.
  static QtttParams from_values(const ArchitectureConfig& arch, std::vector<double> values);

  const ArchitectureConfig& arch() const noexcept { return arch_; }
  const ParamLayout& layout() const noexcept { return layout_; }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> segment(Segment s) const;
  std::span<double> segment(Segment s);

  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  double sigma_mt() const;
  double sigma_ae() const;

  bool operator==(const QtttParams& o) const {
    return arch_ == o.arch_ && values_ == o.values_;
  }

 private:
  QtttParams(const ArchitectureConfig& arch, std::vector<double> values);

  ArchitectureConfig arch_;
  ParamLayout layout_;
  std::vector<double> values_;
};

/// Versioned checkpoint: architecture, flat parameter vector, segment map.
nlohmann::json checkpoint_to_json(const QtttParams& params);
QtttParams checkpoint_from_json(const nlohmann::json& j);
void save_checkpoint(const QtttParams& params, const std::string& path);
QtttParams load_checkpoint(const std::string& path);

inline constexpr int kCheckpointVersion = 1;

}  // namespace qttt
