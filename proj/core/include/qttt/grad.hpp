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
#include <span>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "qttt/circuits.hpp"
#include "qttt/params.hpp"

namespace qttt {

enum class LossKind : std::uint8_t { Total, MainTask, AutoEncoder };
enum class GradMethod : std::uint8_t { ParameterShift, FiniteDifference, Analytic, Mixed };

std::string_view to_string(LossKind k);
std::string_view to_string(GradMethod m);

/// One input with an optional one-hot label (empty for the auto-encoder loss).
struct Datum {
  std::span<const double> x;
  std::span<const double> y;
};

/// Gradient entries for the requested segments, concatenated in layout order.
struct GradientVector {
  std::vector<double> values;
  SegmentSet segments;
  GradMethod method = GradMethod::ParameterShift;

  /// Scatters into a vector of the full parameter length (zeros elsewhere).
  std::vector<double> to_full(const ParamLayout& layout) const;
  /// The slice belonging to one segment.
  std::span<const double> segment(const ParamLayout& layout, Segment s) const;
};

/// The scalar loss of the given kind at raw input x.
double evaluate_loss(LossKind kind, const Datum& d, const QtttParams& params,
                     const NoiseSpec* noise = nullptr);

/// Two-term parameter-shift rule applied to every circuit observable (class
/// fidelities, reconstruction fidelity), chained through the classical loss.
/// Data-uploading weights pick up the factor x'_i. Only theta_E, theta_D and
/// theta_M may be requested; anything else throws UnsupportedSegment.
GradientVector grad_parameter_shift(LossKind kind, const Datum& d, const QtttParams& params,
                                    const NoiseSpec* noise, SegmentSet mask,
                                    GateTally* tally = nullptr);

/// Central differences (L(p + h) - L(p - h)) / 2h on every masked parameter.
GradientVector grad_finite_difference(LossKind kind, const Datum& d, const QtttParams& params,
                                      const NoiseSpec* noise, SegmentSet mask, double h = 1e-5);

/// Closed-form gradients with respect to alpha and log sigma.
GradientVector grad_analytic_heads(LossKind kind, const Datum& d, const QtttParams& params,
                                   const NoiseSpec* noise = nullptr);

/// Gradient of theta_L: central differences of the loss in x' (step h) chained
/// exactly through x' = M x + b.
GradientVector grad_linear_layer(LossKind kind, const Datum& d, const QtttParams& params,
                                 const NoiseSpec* noise = nullptr, double h = 1e-5);

/// Full-length gradient over `mask` combining the three routes above.
std::vector<double> loss_gradient(LossKind kind, const Datum& d, const QtttParams& params,
                                  const NoiseSpec* noise, SegmentSet mask,
                                  GateTally* tally = nullptr);

/// Segments whose gradient comes from the parameter-shift rule.
inline constexpr SegmentSet kCircuitSegments{Segment::Encoder, Segment::Decoder, Segment::Main};
/// Segments updated by test-time training.
inline constexpr SegmentSet kTttSegments{Segment::Linear, Segment::Encoder, Segment::Decoder};

/// Gate applications of one full parameter-shift gradient pass, for training
/// (total loss over theta_E, theta_D, theta_M on N_train points) and for
/// test-time training (auto-encoder loss over theta_E, theta_D on N_test points).
struct GateCountReport {
  std::uint64_t shots = 1;
  std::uint64_t n_train = 0;
  std::uint64_t n_test = 0;
  int n_qubits = 0;
  int layers_encoder = 0;
  int layers_decoder = 0;
  int layers_main = 0;
  std::uint64_t training_gates_per_datum = 0;
  std::uint64_t ttt_gates_per_datum = 0;
  std::uint64_t training_gates = 0;
  std::uint64_t ttt_gates = 0;
  double measured_ratio = 0.0;
  /// (N_test / N_train) (L_E + L_D)^2 / (L_E + L_D + L_M)^2
  double asymptotic_ratio = 0.0;
};

GateCountReport count_gates(const ArchitectureConfig& arch, std::uint64_t n_train,
                            std::uint64_t n_test, std::uint64_t shots = 1);

nlohmann::json to_json(const GateCountReport& r);

}  // namespace qttt
