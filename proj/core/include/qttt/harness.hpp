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
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qttt/data.hpp"
#include "qttt/grad.hpp"
#include "qttt/params.hpp"
#include "qttt/train.hpp"

namespace qttt {

struct DatasetSpec {
  DatasetFamily family = DatasetFamily::LinearlySeparable;
  int d_x = 5;
  std::size_t n_samples = kDefaultSampleCount;

  /// "<family>-d<d_x>", e.g. "two-curves-d5".
  std::string name() const;
};

struct CorruptionSweep {
  CorruptionKind kind = CorruptionKind::Gaussian;
  std::vector<double> levels;
  double snow_low = 0.0;
  double snow_high = 1.0;
};

/// One evaluation condition: an optional input corruption and a circuit noise bound.
struct SweepPoint {
  std::optional<CorruptionKind> corruption;
  double level = 0.0;
  double epsilon = 0.0;
};

/// A fully validated experiment description.
///
/// JSON layout (every section optional, unknown keys rejected):
///
///     {
///       "datasets": [{"family": "linearly-separable", "d_x": 5, "n_samples": 300}],
///       "seeds": [0, 1, 2],
///       "architecture": {"n_qubits": 3, "n_trash": 0, "layers_encoder": 4,
///                        "layers_decoder": 4, "layers_main": 4,
///                        "use_linear": true, "reuploading": true},
///       "train": {"epochs": 100, "batch_size": 32, "learning_rate": 0.01,
///                 "beta1": 0.9, "beta2": 0.999, "epsilon": 1e-8, "tolerance": 0},
///       "ttt": {"epochs": 10, "learning_rate": 0.005, "batch_size": 0,
///               "online_epochs": 10},
///       "sweep": {"corruption": {"kind": "gaussian", "levels": [0, 0.3]},
///                 "epsilons": [0.0, 0.314],
///                 "variants": ["baseline-no-ttt", "qttt-batch", "qttt-online"]},
///       "ablation": {"variants": ["qttt-batch", "ablation-no-ttt"]},
///       "theorem": {"train_epochs": 5, "probes_per_model": 40,
///                   "etas": [1e-3, 5e-4, 2.5e-4], "alignment_threshold": 1e-4},
///       "complexity": {"layers_main": [4, 8, 16], "shots": 1}
///     }
///
/// When "n_qubits" is absent it is derived from each dataset's d_x.
struct ExperimentConfig {
  std::vector<DatasetSpec> datasets{DatasetSpec{}};
  std::vector<std::uint64_t> seeds{0};

  std::optional<int> n_qubits;
  int n_trash = 0;
  int layers_encoder = 4;
  int layers_decoder = 4;
  int layers_main = 4;
  bool use_linear = true;
  bool reuploading = true;

  TrainConfig train{};
  TttConfig ttt{};
  int online_epochs = 10;

  std::optional<CorruptionSweep> corruption;
  std::vector<double> epsilons{0.0};
  std::vector<std::string> sweep_variants{"baseline-no-ttt", "qttt-batch", "qttt-online"};
  std::vector<std::string> ablation_variants;

  int theorem_train_epochs = 5;
  int theorem_probes_per_model = 40;
  std::vector<double> theorem_etas{1e-3, 5e-4, 2.5e-4};
  double alignment_threshold = 1e-4;

  std::vector<int> complexity_layers_main{4, 8, 16};
  std::uint64_t complexity_shots = 1;

  /// Throws ConfigError on malformed input or unknown keys.
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  ArchitectureConfig architecture_for(const DatasetSpec& ds) const;
  /// Cross product of corruption levels and noise bounds, corruption-major.
  std::vector<SweepPoint> sweep_points() const;
};

/// The eight ablation variants, in report order.
inline const std::vector<std::string> kAblationVariants{
    "qttt-batch",     "ablation-nt1",        "ablation-nt2",           "qttt-online",
    "ablation-no-ttt", "ablation-no-linear", "ablation-no-reuploading", "ablation-no-multitask"};

/// One line of a metrics CSV. ae_before/ae_after are mean test-set
/// auto-encoder losses around adaptation (equal for variants without TTT).
struct MetricsRow {
  std::string dataset;
  std::uint64_t seed = 0;
  std::string variant;
  std::string corruption_kind = "none";
  double corruption_level = 0.0;
  double epsilon = 0.0;
  double accuracy = 0.0;
  double ae_before = 0.0;
  double ae_after = 0.0;
};

/// dataset,seed,variant,corruption_kind,corruption_level,epsilon,accuracy,ae_before,ae_after
void write_metrics_csv(std::ostream& out, std::span<const MetricsRow> rows);
std::vector<MetricsRow> read_metrics_csv(std::istream& in);

struct RunOptions {
  std::filesystem::path out_dir = "runs";
  /// Draw a fresh noise realization for every test sample instead of one per
  /// (seed, epsilon).
  bool noise_resample = false;
  std::ostream* log = nullptr;
};

/// Stable hash of the config plus the subcommand and options that influence results.
std::string config_hash(const ExperimentConfig& cfg, std::string_view command,
                        const RunOptions& opts);

/// Seed derived from a base seed and a tag; independent streams per tag.
std::uint64_t derive_seed(std::uint64_t base, std::string_view tag);

/// Trains (or loads the cached checkpoint of) one model. Cached under
/// `<out>/models/`, keyed by dataset, seed, architecture and training config.
QtttParams trained_model(const ExperimentConfig& cfg, const DatasetSpec& ds, std::uint64_t seed,
                         const ArchitectureConfig& arch, const TrainConfig& train,
                         const RunOptions& opts);

/// Runs one variant at one sweep point against a trained model.
MetricsRow evaluate_variant(const std::string& variant, const QtttParams& model,
                            const Dataset& dataset, std::uint64_t seed, const SweepPoint& point,
                            const ExperimentConfig& cfg, const RunOptions& opts);

struct CommandOutput {
  std::filesystem::path dir;
  std::vector<std::filesystem::path> files;
};

CommandOutput cmd_generate(const ExperimentConfig& cfg, const RunOptions& opts);
CommandOutput cmd_train(const ExperimentConfig& cfg, const RunOptions& opts);

struct SweepOutput {
  CommandOutput output;
  std::vector<MetricsRow> rows;
};

SweepOutput cmd_sweep(const ExperimentConfig& cfg, const RunOptions& opts);
/// Throws ConfigError on an unknown ablation variant.
SweepOutput cmd_ablation(const ExperimentConfig& cfg, const RunOptions& opts);

struct ComplexityOutput {
  CommandOutput output;
  std::vector<GateCountReport> reports;
};

ComplexityOutput cmd_complexity(const ExperimentConfig& cfg, const RunOptions& opts);

struct ProbeRecord {
  std::string dataset;
  std::uint64_t seed = 0;
  std::size_t sample = 0;
  TheoremProbeReport report;
};

struct TheoremOutput {
  CommandOutput output;
  std::vector<ProbeRecord> probes;
  std::size_t aligned = 0;      ///< probes with inner product > threshold
  double descent_rate = 0.0;    ///< among aligned: smallest-eta step lowered l_MT
  double match_rate = 0.0;      ///< among aligned: |estimate + ip| <= 5% |ip|
};

TheoremOutput cmd_theorem(const ExperimentConfig& cfg, const RunOptions& opts);

}  // namespace qttt
