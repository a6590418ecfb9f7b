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

// Circuit gate lists written out directly from the circuit description, used
// as the reference for the library's builders.

#include <random>
#include <vector>

#include "qttt/circuits.hpp"
#include "qttt/params.hpp"

namespace reference {

using namespace qttt;

inline QtttParams random_params(const ArchitectureConfig& arch, std::uint64_t seed) {
  QtttParams p = QtttParams::initial(arch, seed);
  std::mt19937_64 rng(seed + 1000);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (double& v : p.values()) v += 0.5 * u(rng);
  return p;
}

inline void push_rotations(std::vector<GateOp>& out, const QtttParams& p, std::size_t offset, int n_qubits) {
  for (int q = 0; q < n_qubits; ++q) {
    const std::size_t i = offset + static_cast<std::size_t>(3 * q);
    out.push_back(GateOp::u3(q, p[i], p[i + 1], p[i + 2]));
  }
}

inline void push_ladder(std::vector<GateOp>& out, int n_qubits) {
  for (int q = 0; q + 1 < n_qubits; ++q) out.push_back(GateOp::cnot(q, q + 1));
  out.push_back(GateOp::cnot(n_qubits - 1, 0));
}

inline void push_noise(std::vector<GateOp>& out, const NoiseSpec* noise, int slot, int n_qubits) {
  if (!noise) return;
  for (int q = 0; q < n_qubits; ++q) {
    const auto& r = noise->realization[static_cast<std::size_t>(slot * n_qubits + q)];
    out.push_back(r.axis == PauliAxis::X   ? GateOp::rx(q, r.angle)
                  : r.axis == PauliAxis::Y ? GateOp::ry(q, r.angle)
                                           : GateOp::rz(q, r.angle));
  }
}

inline void push_data(std::vector<GateOp>& out, const QtttParams& p, const std::vector<double>& xp, int layer) {
  const auto& a = p.arch();
  const std::size_t w0 = p.layout().range(Segment::Main).offset +
                         static_cast<std::size_t>(3 * a.n_qubits * a.layers_main + layer * a.d_x);
  for (int q = 0; q < a.n_qubits; ++q) {
    double ang[3] = {0, 0, 0};
    for (int k = 0; k < 3; ++k) {
      const int f = 3 * q + k;
      if (f < a.d_x) ang[k] = p[w0 + static_cast<std::size_t>(f)] * xp[static_cast<std::size_t>(f)];
    }
    out.push_back(GateOp::u3(q, ang[0], ang[1], ang[2]));
  }
}

inline std::vector<GateOp> reference_encoder(const QtttParams& p, const NoiseSpec* noise) {
  const auto& a = p.arch();
  std::vector<GateOp> g;
  for (int l = 0; l < a.layers_encoder; ++l) {
    push_rotations(g, p, p.layout().range(Segment::Encoder).offset + static_cast<std::size_t>(9 * l), a.n_qubits);
    push_ladder(g, a.n_qubits);
    push_noise(g, noise, l, a.n_qubits);
  }
  for (int t = 0; t < a.n_trash; ++t) g.push_back(GateOp::swap(a.n_qubits - a.n_trash + t, a.n_qubits + t));
  return g;
}

inline std::vector<GateOp> reference_decoder(const QtttParams& p, const NoiseSpec* noise) {
  const auto& a = p.arch();
  std::vector<GateOp> g;
  for (int l = 0; l < a.layers_decoder; ++l) {
    push_rotations(g, p, p.layout().range(Segment::Decoder).offset + static_cast<std::size_t>(9 * l), a.n_qubits);
    push_ladder(g, a.n_qubits);
    push_noise(g, noise, a.layers_encoder + l, a.n_qubits);
  }
  return g;
}

inline std::vector<GateOp> reference_main_block(const QtttParams& p, const std::vector<double>& xp,
                                         const NoiseSpec* noise) {
  const auto& a = p.arch();
  const std::size_t m0 = p.layout().range(Segment::Main).offset;
  const int slot0 = a.layers_encoder + a.layers_decoder;
  std::vector<GateOp> g;
  if (a.reuploading) {
    for (int l = 0; l < a.layers_main; ++l) {
      push_rotations(g, p, m0 + static_cast<std::size_t>(9 * l), a.n_qubits);
      push_data(g, p, xp, l);
      push_ladder(g, a.n_qubits);
      push_noise(g, noise, slot0 + l, a.n_qubits);
    }
    push_data(g, p, xp, a.layers_main);
  } else {
    push_data(g, p, xp, 0);
    push_ladder(g, a.n_qubits);
    for (int l = 0; l < a.layers_main; ++l) {
      push_rotations(g, p, m0 + static_cast<std::size_t>(9 * l), a.n_qubits);
      push_ladder(g, a.n_qubits);
      push_noise(g, noise, slot0 + l, a.n_qubits);
    }
  }
  return g;
}

}  // namespace reference
