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

#include "qttt/params.hpp"
#include "qttt/statevec.hpp"

namespace qttt {

enum class PauliAxis : std::uint8_t { X, Y, Z };

/// One coherent over-rotation inserted after a layer.
struct NoiseRotation {
  int slot = 0;
  int qubit = 0;
  PauliAxis axis = PauliAxis::X;
  double angle = 0.0;

  bool operator==(const NoiseRotation&) const = default;
};

/// A fixed realization of random unitary circuit noise.
///
/// Slots are numbered encoder layers first, then decoder layers, then main-branch
/// repetitions; every slot carries one rotation per data-register qubit.
struct NoiseSpec {
  double epsilon_theta = 0.0;
  std::uint64_t seed = 0;
  std::vector<NoiseRotation> realization;

  bool operator==(const NoiseSpec&) const = default;
};

int noise_slot_count(const ArchitectureConfig& arch);

/// Draws one rotation per (slot, qubit): axis uniform over {X, Y, Z}, angle
/// ~ Unif(0, epsilon_theta). Deterministic in `seed`.
NoiseSpec realize_noise(const ArchitectureConfig& arch, double epsilon_theta,
                        std::uint64_t seed);

enum class GateOrigin : std::uint8_t {
  EncoderRotation,
  EncoderEntangler,
  TrashSwap,
  DecoderRotation,
  DecoderEntangler,
  MainVariational,
  MainData,
  MainEntangler,
  Noise,
};

std::string_view to_string(GateOrigin origin);

/// Ties one angle slot of one gate to a flat parameter: angle = scale * p.
/// Circuit angles have scale 1; data-uploading angles have scale x'_i.
struct AngleBinding {
  std::size_t gate = 0;
  int slot = 0;
  std::size_t param = 0;
  double scale = 1.0;
};

/// Running count of simulated gate applications.
struct GateTally {
  std::uint64_t gates = 0;
  std::uint64_t circuits = 0;
};

/// A gate list annotated with provenance and parameter bindings.
class Circuit {
 public:
  explicit Circuit(int n_qubits) : n_qubits_(n_qubits) {}

  int n_qubits() const noexcept { return n_qubits_; }
  std::size_t size() const noexcept { return gates_.size(); }
  std::span<const GateOp> gates() const noexcept { return gates_; }
  std::span<const GateOrigin> origins() const noexcept { return origins_; }
  std::span<const AngleBinding> bindings() const noexcept { return bindings_; }

  void add(const GateOp& g, GateOrigin origin);
  /// Binds angle `slot` of the most recently added gate.
  void bind_last(int slot, std::size_t param, double scale = 1.0);
  void append(const Circuit& other);

  void run(StateVector& state, GateTally* tally = nullptr) const;
  /// Runs with `delta` added to one angle slot of one gate.
  void run_shifted(StateVector& state, std::size_t gate, int slot, double delta,
                   GateTally* tally = nullptr) const;

  /// [{"kind", "qubits", "angles", "origin"}, ...]
  nlohmann::json to_json() const;

 private:
  int n_qubits_;
  std::vector<GateOp> gates_;
  std::vector<GateOrigin> origins_;
  std::vector<AngleBinding> bindings_;
};

/// x' = M x + b with theta_L = [Flatten(M), b].
std::vector<double> linear_preprocess(std::span<const double> x, std::span<const double> theta_L);

/// Applies the linear layer, or returns x unchanged when the architecture disables it.
std::vector<double> prepare_input(std::span<const double> x, const QtttParams& params);

/// Amplitude encoding of x' on the data register with the aux register at |0>.
StateVector initial_state(std::span<const double> x_prime, const ArchitectureConfig& arch);

/// L_E x [U3 layer; ladder entangler] followed by the trash/aux SWAP.
Circuit encoder_circuit(const QtttParams& params, const NoiseSpec* noise);
/// L_D x [U3 layer; ladder entangler] on the data register.
Circuit decoder_circuit(const QtttParams& params, const NoiseSpec* noise);
/// L_M x [V_l; S_l] then S_{L+1}; data angles (w_l * x')[3q..3q+2] per qubit.
Circuit main_block_circuit(const QtttParams& params, std::span<const double> x_prime,
                           const NoiseSpec* noise);

/// Encoder + decoder.
Circuit qae_circuit(const QtttParams& params, const NoiseSpec* noise);
/// Encoder + data re-uploading block.
Circuit main_circuit(const QtttParams& params, std::span<const double> x_prime,
                     const NoiseSpec* noise);

StateVector run_encoder(std::span<const double> x_prime, const QtttParams& params,
                        const NoiseSpec* noise = nullptr);
StateVector run_decoder(StateVector encoded, const QtttParams& params,
                        const NoiseSpec* noise = nullptr);
StateVector run_main_branch(std::span<const double> x_prime, const QtttParams& params,
                            const NoiseSpec* noise = nullptr);

}  // namespace qttt
