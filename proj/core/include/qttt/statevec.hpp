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
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace qttt {

using Complex = std::complex<double>;

enum class GateKind : std::uint8_t { U3, RX, RY, RZ, CNOT, SWAP };

std::string_view to_string(GateKind kind);

/// A single gate. Rotation angles are in radians.
///
/// U3(theta, phi, lambda) = RZ(phi) * RY(theta) * RZ(lambda), global phase
/// dropped, so every angle slot is a Pauli-rotation angle. For CNOT,
/// `qubits[0]` is the control and `qubits[1]` the target.
struct GateOp {
  GateKind kind = GateKind::U3;
  std::array<int, 2> qubits{0, -1};
  std::array<double, 3> angles{0.0, 0.0, 0.0};

  static GateOp u3(int q, double theta, double phi, double lambda);
  static GateOp rx(int q, double angle);
  static GateOp ry(int q, double angle);
  static GateOp rz(int q, double angle);
  static GateOp cnot(int control, int target);
  static GateOp swap(int a, int b);

  int arity() const noexcept {
    return (kind == GateKind::CNOT || kind == GateKind::SWAP) ? 2 : 1;
  }
  /// Number of angle slots carried by the gate (3 for U3, 1 for RX/RY/RZ).
  int angle_count() const noexcept;
};

/// The gate g^-1 such that applying g then inverse(g) is the identity.
GateOp inverse(const GateOp& g);

/// Pure n-qubit state. Qubit 0 is the most significant bit of the basis index.
class StateVector {
 public:
  /// |0...0> on `n_qubits` qubits.
  explicit StateVector(int n_qubits);

  /// Wraps explicit amplitudes; throws InvalidArgument unless the length is
  /// 2^n_qubits and the norm is 1 within 1e-10.
  static StateVector from_amplitudes(int n_qubits, std::vector<Complex> amps);

  /// Computational basis state |index>.
  static StateVector basis(int n_qubits, std::size_t index);

  int n_qubits() const noexcept { return n_qubits_; }
  std::size_t dim() const noexcept { return amps_.size(); }
  std::span<const Complex> amplitudes() const noexcept { return amps_; }
  const Complex& operator[](std::size_t i) const { return amps_[i]; }

  double norm() const noexcept;

  /// In-place application; validates qubit indices.
  void apply(const GateOp& g);

  /// Appends `extra` qubits in |0> as the least significant bits.
  StateVector with_ancillas(int extra) const;

 private:
  StateVector(int n_qubits, std::vector<Complex> amps)
      : n_qubits_(n_qubits), amps_(std::move(amps)) {}

  void apply_single(int q, const std::array<Complex, 4>& m);
  void apply_cnot(int control, int target);
  void apply_swap(int a, int b);

  int n_qubits_;
  std::vector<Complex> amps_;
};

/// Returns U_g |state>.
StateVector apply_gate(StateVector state, const GateOp& g);

/// CNOT(q_i -> q_{i+1}) for i = 0..k-2, then the wrap-around CNOT(q_{k-1} -> q_0).
StateVector apply_ladder_entangler(StateVector state, std::span<const int> qubits);

/// The ladder entangler as a gate list.
std::vector<GateOp> ladder_entangler(std::span<const int> qubits);

/// Zero-pads `x` to 2^n_qubits and normalizes it. Throws DegenerateInput for
/// the all-zero vector and InvalidArgument if `x` does not fit.
StateVector amplitude_encode(std::span<const double> x, int n_qubits);

/// Density matrix on a subset of qubits, stored row-major.
struct ReducedDensity {
  int n_qubits = 0;
  std::vector<Complex> matrix;

  std::size_t dim() const noexcept { return std::size_t{1} << n_qubits; }
  const Complex& at(std::size_t r, std::size_t c) const { return matrix[r * dim() + c]; }
  Complex& at(std::size_t r, std::size_t c) { return matrix[r * dim() + c]; }

  static ReducedDensity pure(const StateVector& s);
  /// Single-qubit state from its Bloch vector (x, y, z), |r| <= 1.
  static ReducedDensity from_bloch(double x, double y, double z);
};

/// Tr_rest |psi><psi|. The first entry of `keep` becomes the most significant
/// bit of the reduced index.
ReducedDensity partial_trace(const StateVector& state, std::span<const int> keep);

/// |<a|b>|^2 clamped to [0, 1].
double fidelity_pure(const StateVector& a, const StateVector& b);

/// Tr[rho sigma] without clamping; the imaginary part is discarded.
double trace_product(const ReducedDensity& rho, const ReducedDensity& sigma);

/// Tr[rho sigma] clamped to [0, 1].
double fidelity_mixed(const ReducedDensity& rho, const ReducedDensity& sigma);

/// <psi| rho |psi> for a pure state on the same number of qubits.
double expectation(const ReducedDensity& rho, const StateVector& psi);

}  // namespace qttt
