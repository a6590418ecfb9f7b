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

#include "qttt/circuits.hpp"

#include <numeric>
#include <random>
#include <string>

#include <nlohmann/json.hpp>

#include "qttt/errors.hpp"

namespace qttt {
namespace {

std::vector<int> data_register(const ArchitectureConfig& arch) {
  std::vector<int> qubits(static_cast<std::size_t>(arch.n_qubits));
  std::iota(qubits.begin(), qubits.end(), 0);
  return qubits;
}

void check_noise(const NoiseSpec* noise, const ArchitectureConfig& arch) {
  if (noise == nullptr) return;
  const auto expected = static_cast<std::size_t>(noise_slot_count(arch) * arch.n_qubits);
  if (noise->realization.size() != expected) {
    throw InvalidArgument("noise realization has " + std::to_string(noise->realization.size()) +
                          " rotations, architecture needs " + std::to_string(expected));
  }
}

void add_noise(Circuit& c, const NoiseSpec* noise, const ArchitectureConfig& arch, int slot) {
  if (noise == nullptr) return;
  for (int q = 0; q < arch.n_qubits; ++q) {
    const auto& r = noise->realization[static_cast<std::size_t>(slot * arch.n_qubits + q)];
    switch (r.axis) {
      case PauliAxis::X: c.add(GateOp::rx(r.qubit, r.angle), GateOrigin::Noise); break;
      case PauliAxis::Y: c.add(GateOp::ry(r.qubit, r.angle), GateOrigin::Noise); break;
      case PauliAxis::Z: c.add(GateOp::rz(r.qubit, r.angle), GateOrigin::Noise); break;
    }
  }
}

template <typename AngleIndex>
void add_rotation_layer(Circuit& c, const QtttParams& p, GateOrigin origin, AngleIndex index) {
  for (int q = 0; q < p.arch().n_qubits; ++q) {
    const std::size_t i0 = index(q, 0), i1 = index(q, 1), i2 = index(q, 2);
    c.add(GateOp::u3(q, p[i0], p[i1], p[i2]), origin);
    c.bind_last(0, i0);
    c.bind_last(1, i1);
    c.bind_last(2, i2);
  }
}

void add_entangler(Circuit& c, const ArchitectureConfig& arch, GateOrigin origin) {
  const auto qubits = data_register(arch);
  for (const auto& g : ladder_entangler(qubits)) c.add(g, origin);
}

void add_data_layer(Circuit& c, const QtttParams& p, std::span<const double> x_prime,
                    int data_layer) {
  const auto& arch = p.arch();
  for (int q = 0; q < arch.n_qubits; ++q) {
    GateOp g = GateOp::u3(q, 0, 0, 0);
    std::array<std::size_t, 3> params{};
    std::array<bool, 3> bound{false, false, false};
    for (int k = 0; k < 3; ++k) {
      const int feature = 3 * q + k;
      if (feature >= arch.d_x) continue;
      params[k] = p.layout().main_data_weight(data_layer, feature);
      g.angles[k] = p[params[k]] * x_prime[static_cast<std::size_t>(feature)];
      bound[k] = true;
    }
    c.add(g, GateOrigin::MainData);
    for (int k = 0; k < 3; ++k) {
      if (bound[k]) c.bind_last(k, params[k], x_prime[static_cast<std::size_t>(3 * q + k)]);
    }
  }
}

}  // namespace

int noise_slot_count(const ArchitectureConfig& arch) {
  return arch.layers_encoder + arch.layers_decoder + arch.layers_main;
}

NoiseSpec realize_noise(const ArchitectureConfig& arch, double epsilon_theta,
                        std::uint64_t seed) {
  if (!(epsilon_theta >= 0.0)) throw InvalidArgument("noise epsilon must be >= 0");
  NoiseSpec spec{epsilon_theta, seed, {}};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> axis(0, 2);
  std::uniform_real_distribution<double> angle(0.0, 1.0);
  const int slots = noise_slot_count(arch);
  spec.realization.reserve(static_cast<std::size_t>(slots * arch.n_qubits));
  for (int s = 0; s < slots; ++s) {
    for (int q = 0; q < arch.n_qubits; ++q) {
      const auto ax = static_cast<PauliAxis>(axis(rng));
      // u in [0, 1) keeps the angle in [0, epsilon) and is exactly 0 when epsilon is 0.
      const double a = epsilon_theta * angle(rng);
      spec.realization.push_back(NoiseRotation{s, q, ax, a});
    }
  }
  return spec;
}

std::string_view to_string(GateOrigin origin) {
  switch (origin) {
    case GateOrigin::EncoderRotation: return "encoder.u3";
    case GateOrigin::EncoderEntangler: return "encoder.entangler";
    case GateOrigin::TrashSwap: return "trash.swap";
    case GateOrigin::DecoderRotation: return "decoder.u3";
    case GateOrigin::DecoderEntangler: return "decoder.entangler";
    case GateOrigin::MainVariational: return "main.variational";
    case GateOrigin::MainData: return "main.data";
    case GateOrigin::MainEntangler: return "main.entangler";
    case GateOrigin::Noise: return "noise";
  }
  return "?";
}

void Circuit::add(const GateOp& g, GateOrigin origin) {
  gates_.push_back(g);
  origins_.push_back(origin);
}

void Circuit::bind_last(int slot, std::size_t param, double scale) {
  if (gates_.empty() || slot < 0 || slot >= gates_.back().angle_count()) {
    throw InvalidArgument("bind_last: no angle slot to bind");
  }
  bindings_.push_back(AngleBinding{gates_.size() - 1, slot, param, scale});
}

void Circuit::append(const Circuit& other) {
  if (other.n_qubits_ != n_qubits_) throw InvalidArgument("append: qubit counts differ");
  const std::size_t base = gates_.size();
  gates_.insert(gates_.end(), other.gates_.begin(), other.gates_.end());
  origins_.insert(origins_.end(), other.origins_.begin(), other.origins_.end());
  for (auto b : other.bindings_) {
    b.gate += base;
    bindings_.push_back(b);
  }
}

void Circuit::run(StateVector& state, GateTally* tally) const {
  for (const auto& g : gates_) state.apply(g);
  if (tally != nullptr) {
    tally->gates += gates_.size();
    ++tally->circuits;
  }
}

void Circuit::run_shifted(StateVector& state, std::size_t gate, int slot, double delta,
                          GateTally* tally) const {
  for (std::size_t i = 0; i < gates_.size(); ++i) {
    if (i == gate) {
      GateOp g = gates_[i];
      g.angles[static_cast<std::size_t>(slot)] += delta;
      state.apply(g);
    } else {
      state.apply(gates_[i]);
    }
  }
  if (tally != nullptr) {
    tally->gates += gates_.size();
    ++tally->circuits;
  }
}

nlohmann::json Circuit::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t i = 0; i < gates_.size(); ++i) {
    const auto& g = gates_[i];
    nlohmann::json qubits = nlohmann::json::array({g.qubits[0]});
    if (g.arity() == 2) qubits.push_back(g.qubits[1]);
    out.push_back({{"kind", std::string(to_string(g.kind))},
                   {"qubits", qubits},
                   {"angles", std::vector<double>(g.angles.begin(),
                                                  g.angles.begin() + g.angle_count())},
                   {"origin", std::string(to_string(origins_[i]))}});
  }
  return out;
}

std::vector<double> linear_preprocess(std::span<const double> x,
                                      std::span<const double> theta_L) {
  const std::size_t d = x.size();
  if (theta_L.size() != d * (d + 1)) {
    throw InvalidArgument("linear_preprocess: theta_L has " + std::to_string(theta_L.size()) +
                          " entries, expected " + std::to_string(d * (d + 1)));
  }
  std::vector<double> out(d);
  for (std::size_t i = 0; i < d; ++i) {
    double acc = theta_L[d * d + i];
    for (std::size_t j = 0; j < d; ++j) acc += theta_L[i * d + j] * x[j];
    out[i] = acc;
  }
  return out;
}

std::vector<double> prepare_input(std::span<const double> x, const QtttParams& params) {
  if (x.size() != static_cast<std::size_t>(params.arch().d_x)) {
    throw InvalidArgument("input has " + std::to_string(x.size()) + " features, expected " +
                          std::to_string(params.arch().d_x));
  }
  if (!params.arch().use_linear) return {x.begin(), x.end()};
  return linear_preprocess(x, params.segment(Segment::Linear));
}

StateVector initial_state(std::span<const double> x_prime, const ArchitectureConfig& arch) {
  return amplitude_encode(x_prime, arch.n_qubits).with_ancillas(arch.n_trash);
}

Circuit encoder_circuit(const QtttParams& params, const NoiseSpec* noise) {
  const auto& arch = params.arch();
  check_noise(noise, arch);
  Circuit c(arch.total_qubits());
  const auto& layout = params.layout();
  for (int l = 0; l < arch.layers_encoder; ++l) {
    add_rotation_layer(c, params, GateOrigin::EncoderRotation,
                       [&](int q, int k) { return layout.encoder_angle(l, q, k); });
    add_entangler(c, arch, GateOrigin::EncoderEntangler);
    add_noise(c, noise, arch, l);
  }
  for (int t = 0; t < arch.n_trash; ++t) {
    c.add(GateOp::swap(arch.n_qubits - arch.n_trash + t, arch.n_qubits + t),
          GateOrigin::TrashSwap);
  }
  return c;
}

Circuit decoder_circuit(const QtttParams& params, const NoiseSpec* noise) {
  const auto& arch = params.arch();
  check_noise(noise, arch);
  Circuit c(arch.total_qubits());
  const auto& layout = params.layout();
  for (int l = 0; l < arch.layers_decoder; ++l) {
    add_rotation_layer(c, params, GateOrigin::DecoderRotation,
                       [&](int q, int k) { return layout.decoder_angle(l, q, k); });
    add_entangler(c, arch, GateOrigin::DecoderEntangler);
    add_noise(c, noise, arch, arch.layers_encoder + l);
  }
  return c;
}

Circuit main_block_circuit(const QtttParams& params, std::span<const double> x_prime,
                           const NoiseSpec* noise) {
  const auto& arch = params.arch();
  check_noise(noise, arch);
  if (x_prime.size() != static_cast<std::size_t>(arch.d_x)) {
    throw InvalidArgument("main_block_circuit: x' length mismatch");
  }
  Circuit c(arch.total_qubits());
  const auto& layout = params.layout();
  const int slot0 = arch.layers_encoder + arch.layers_decoder;
  auto variational = [&](int l) {
    add_rotation_layer(c, params, GateOrigin::MainVariational,
                       [&](int q, int k) { return layout.main_variational_angle(l, q, k); });
  };
  if (arch.reuploading) {
    for (int l = 0; l < arch.layers_main; ++l) {
      variational(l);
      add_data_layer(c, params, x_prime, l);
      add_entangler(c, arch, GateOrigin::MainEntangler);
      add_noise(c, noise, arch, slot0 + l);
    }
    add_data_layer(c, params, x_prime, arch.layers_main);
  } else {
    add_data_layer(c, params, x_prime, 0);
    add_entangler(c, arch, GateOrigin::MainEntangler);
    for (int l = 0; l < arch.layers_main; ++l) {
      variational(l);
      add_entangler(c, arch, GateOrigin::MainEntangler);
      add_noise(c, noise, arch, slot0 + l);
    }
  }
  return c;
}

Circuit qae_circuit(const QtttParams& params, const NoiseSpec* noise) {
  Circuit c = encoder_circuit(params, noise);
  c.append(decoder_circuit(params, noise));
  return c;
}

Circuit main_circuit(const QtttParams& params, std::span<const double> x_prime,
                     const NoiseSpec* noise) {
  Circuit c = encoder_circuit(params, noise);
  c.append(main_block_circuit(params, x_prime, noise));
  return c;
}

StateVector run_encoder(std::span<const double> x_prime, const QtttParams& params,
                        const NoiseSpec* noise) {
  StateVector s = initial_state(x_prime, params.arch());
  encoder_circuit(params, noise).run(s);
  return s;
}

StateVector run_decoder(StateVector encoded, const QtttParams& params, const NoiseSpec* noise) {
  if (encoded.n_qubits() != params.arch().total_qubits()) {
    throw InvalidArgument("run_decoder: state has the wrong qubit count");
  }
  decoder_circuit(params, noise).run(encoded);
  return encoded;
}

StateVector run_main_branch(std::span<const double> x_prime, const QtttParams& params,
                            const NoiseSpec* noise) {
  StateVector s = run_encoder(x_prime, params, noise);
  main_block_circuit(params, x_prime, noise).run(s);
  return s;
}

}  // namespace qttt
