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
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "qttt/circuits.hpp"
#include "qttt/data.hpp"
#include "qttt/grad.hpp"
#include "qttt/params.hpp"

namespace qttt {

struct AdamConfig {
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step = 0;

  static AdamState zeros(std::size_t n) { return {std::vector<double>(n), std::vector<double>(n), 0}; }
};

/// One bias-corrected Adam update. Entries with `update_mask[i] == 0` are left
/// untouched (an empty mask updates everything). Throws DivergenceError, before
/// modifying anything, if a gradient or an updated value is non-finite.
void optimizer_step(std::span<double> params, std::span<const double> grads, AdamState& state,
                    const AdamConfig& config, std::span<const std::uint8_t> update_mask = {});

/// Per-parameter update mask for a set of segments.
std::vector<std::uint8_t> segment_mask(const ParamLayout& layout, SegmentSet segments);

/// Circuit noise applied at inference: none, one fixed realization shared by
/// every sample, or one realization per sample.
class NoiseModel {
 public:
  NoiseModel() = default;
  static NoiseModel fixed(NoiseSpec spec);
  static NoiseModel per_sample(std::vector<NoiseSpec> specs);

  const NoiseSpec* for_sample(std::size_t i) const;
  bool empty() const noexcept { return specs_.empty(); }

 private:
  std::vector<NoiseSpec> specs_;
  bool per_sample_ = false;
};

enum class TrainObjective : std::uint8_t {
  MultiTask,   ///< uncertainty-weighted sum of both losses over every segment
  Sequential,  ///< main task first (theta_L, theta_E, theta_M, alpha), then theta_D on l_AE
};

struct TrainConfig {
  int epochs = 100;
  int batch_size = 32;
  AdamConfig adam{};
  std::uint64_t seed = 0;
  /// Stop once |l_total(epoch) - l_total(epoch - 1)| < tolerance; 0 disables.
  double tolerance = 0.0;
  TrainObjective objective = TrainObjective::MultiTask;
};

struct EpochRecord {
  int epoch = 0;
  double l_total = 0.0;
  double l_mt = 0.0;
  double l_ae = 0.0;
  double sigma_mt = 1.0;
  double sigma_ae = 1.0;
  double train_acc = 0.0;
  double test_acc = 0.0;

  bool operator==(const EpochRecord&) const = default;
};

struct FitResult {
  QtttParams params;
  std::vector<EpochRecord> history;
};

/// Noise-free mini-batch Adam on the training split. Deterministic in
/// (dataset, arch, config). Throws DivergenceError on a non-finite loss.
FitResult fit(const Dataset& dataset, const ArchitectureConfig& arch, const TrainConfig& config);

/// epoch,l_total,l_mt,l_ae,sigma_mt,sigma_ae,train_acc,test_acc
void write_history_csv(std::ostream& out, std::span<const EpochRecord> history);

/// Percentage of correct predictions.
double accuracy(const QtttParams& params, const FeatureMatrix& features,
                std::span<const int> labels, const NoiseModel& noise = {});
std::vector<int> predict_all(const QtttParams& params, const FeatureMatrix& features,
                             const NoiseModel& noise = {});
/// Mean auto-encoder loss over the rows.
double mean_qae_loss(const QtttParams& params, const FeatureMatrix& features,
                     const NoiseModel& noise = {});

enum class TttMode : std::uint8_t { Batch, Online };

struct TttConfig {
  TttMode mode = TttMode::Batch;
  int epochs = 10;
  AdamConfig adam{0.005, 0.9, 0.999, 1e-8};
  /// Mini-batch size for batch mode; 0 uses the whole test set per step.
  int batch_size = 0;
};

struct TttResult {
  QtttParams params;
  /// Mean l_AE over the test set before adaptation and after each epoch.
  std::vector<double> ae_trace;
  double ae_before = 0.0;
  double ae_after = 0.0;
  int best_epoch = 0;
  bool reverted = false;
};

/// Adapts theta_L, theta_E, theta_D on the unlabeled test features by
/// minimizing the mean auto-encoder loss; theta_M, alpha and sigma stay frozen.
/// Returns the iterate with the lowest traced loss, so ae_after <= ae_before.
TttResult ttt_batch(const QtttParams& trained, const FeatureMatrix& test_features,
                    const NoiseModel& noise, const TttConfig& config);

struct OnlineResult {
  std::vector<int> predictions;
  double ae_before = 0.0;  ///< mean over samples
  double ae_after = 0.0;
  int reverted = 0;
};

/// For each sample in order: start from `trained`, adapt on that sample alone,
/// predict, discard the adaptation.
OnlineResult ttt_online(const QtttParams& trained, const FeatureMatrix& stream,
                        const NoiseModel& noise, const TttConfig& config);

struct ProbeStep {
  double eta = 0.0;
  double delta_mt = 0.0;  ///< l_MT(theta_LE - eta grad l_AE) - l_MT(theta_LE)
  double slope = 0.0;     ///< delta_mt / eta
};

struct TheoremProbeReport {
  double inner_product = 0.0;  ///< <grad l_MT, grad l_AE> over theta_LE = [theta_L, theta_E]
  double norm_mt = 0.0;
  double norm_ae = 0.0;
  double l_mt = 0.0;
  std::vector<ProbeStep> steps;
  /// Linear extrapolation to eta -> 0 of the two smallest-eta slopes.
  double directional_estimate = 0.0;
};

/// One-step test-time update along -grad l_AE restricted to the shared
/// segments, and the resulting change of the main-task loss for every eta.
TheoremProbeReport theorem_probe(const QtttParams& params, std::span<const double> x,
                                 std::span<const double> y_one_hot, const NoiseSpec* noise,
                                 std::span<const double> etas);

}  // namespace qttt
