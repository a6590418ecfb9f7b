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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "qttt/circuits.hpp"
#include "qttt/errors.hpp"
#include "support/dense_oracle.hpp"
#include "support/reference_circuits.hpp"

using namespace qttt;
using namespace reference;

namespace {

void expect_same_gates(std::span<const GateOp> got, const std::vector<GateOp>& want) {
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    EXPECT_EQ(got[i].kind, want[i].kind) << i;
    EXPECT_EQ(got[i].qubits[0], want[i].qubits[0]) << i;
    if (want[i].arity() == 2) EXPECT_EQ(got[i].qubits[1], want[i].qubits[1]) << i;
    for (int k = 0; k < want[i].angle_count(); ++k) EXPECT_DOUBLE_EQ(got[i].angles[k], want[i].angles[k]) << i;
  }
}

double max_diff(const StateVector& s, const oracle::Vec& v) {
  double m = 0.0;
  for (std::size_t i = 0; i < s.dim(); ++i) m = std::max(m, std::abs(s[i] - v(static_cast<Eigen::Index>(i))));
  return m;
}

}  // namespace

TEST(Noise, SlotCountAndRealizationShape) {
  const auto arch = ArchitectureConfig::for_features(5);
  EXPECT_EQ(noise_slot_count(arch), 12);
  const NoiseSpec n = realize_noise(arch, std::numbers::pi / 40, 3);
  ASSERT_EQ(n.realization.size(), 36u);
  std::set<PauliAxis> axes;
  for (std::size_t i = 0; i < n.realization.size(); ++i) {
    const auto& r = n.realization[i];
    EXPECT_EQ(r.slot, static_cast<int>(i / 3));
    EXPECT_EQ(r.qubit, static_cast<int>(i % 3));
    EXPECT_GE(r.angle, 0.0);
    EXPECT_LT(r.angle, std::numbers::pi / 40);
    axes.insert(r.axis);
  }
  EXPECT_EQ(axes.size(), 3u);
}

TEST(Noise, SeededAndScaled) {
  const auto arch = ArchitectureConfig::for_features(5);
  EXPECT_EQ(realize_noise(arch, 0.3, 5), realize_noise(arch, 0.3, 5));
  EXPECT_FALSE(realize_noise(arch, 0.3, 5) == realize_noise(arch, 0.3, 6));
  for (const auto& r : realize_noise(arch, 0.0, 5).realization) EXPECT_EQ(r.angle, 0.0);
  // Same seed, doubled bound: every angle doubles and axes are unchanged.
  const auto a = realize_noise(arch, 0.2, 8), b = realize_noise(arch, 0.4, 8);
  for (std::size_t i = 0; i < a.realization.size(); ++i) {
    EXPECT_EQ(a.realization[i].axis, b.realization[i].axis);
    EXPECT_NEAR(2 * a.realization[i].angle, b.realization[i].angle, 1e-15);
  }
  EXPECT_THROW(realize_noise(arch, -0.1, 1), InvalidArgument);
}

TEST(Noise, RealizationMustMatchTheArchitecture) {
  auto arch = ArchitectureConfig::for_features(5);
  const NoiseSpec n = realize_noise(arch, 0.1, 1);
  arch.layers_main = 5;
  const QtttParams p = QtttParams::initial(arch, 0);
  EXPECT_THROW(encoder_circuit(p, &n), InvalidArgument);
}

TEST(Circuits, GateCountsPerBlock) {
  const auto arch = ArchitectureConfig::for_features(5);
  const QtttParams p = QtttParams::initial(arch, 0);
  const std::vector<double> xp{1, 2, 3, 4, 5};
  EXPECT_EQ(encoder_circuit(p, nullptr).size(), 24u);
  EXPECT_EQ(decoder_circuit(p, nullptr).size(), 24u);
  EXPECT_EQ(main_block_circuit(p, xp, nullptr).size(), 39u);
  EXPECT_EQ(qae_circuit(p, nullptr).size(), 48u);
  EXPECT_EQ(main_circuit(p, xp, nullptr).size(), 63u);
  const NoiseSpec n = realize_noise(arch, 0.1, 1);
  EXPECT_EQ(qae_circuit(p, &n).size(), 48u + 24u);
  EXPECT_EQ(main_block_circuit(p, xp, &n).size(), 39u + 12u);

  auto trash = ArchitectureConfig::for_features(5, 2, 2);
  EXPECT_EQ(encoder_circuit(QtttParams::initial(trash, 0), nullptr).size(), 26u);
}

TEST(Circuits, BuildersMatchReferenceGateLists) {
  for (int n_trash : {0, 1}) {
    for (bool reupload : {true, false}) {
      auto arch = ArchitectureConfig::for_features(5, 2, n_trash);
      arch.layers_encoder = 2;
      arch.layers_decoder = 3;
      arch.layers_main = 2;
      arch.reuploading = reupload;
      const QtttParams p = random_params(arch, 17);
      const NoiseSpec noise = realize_noise(arch, 0.4, 23);
      const std::vector<double> xp{0.3, -0.2, 0.9, 0.1, -0.7};
      for (const NoiseSpec* n : {static_cast<const NoiseSpec*>(nullptr), &noise}) {
        expect_same_gates(encoder_circuit(p, n).gates(), reference_encoder(p, n));
        expect_same_gates(decoder_circuit(p, n).gates(), reference_decoder(p, n));
        expect_same_gates(main_block_circuit(p, xp, n).gates(), reference_main_block(p, xp, n));
      }
    }
  }
}

TEST(Circuits, DataAnglesAreZeroPaddedPerQubit) {
  const auto arch = ArchitectureConfig::for_features(5);
  const QtttParams p = QtttParams::initial(arch, 0);
  const std::vector<double> xp{0.1, 0.2, 0.3, 0.4, 0.5};
  const Circuit c = main_block_circuit(p, xp, nullptr);
  // Layer 0: 3 variational U3, then data U3 on qubits 0..2.
  const GateOp& q1 = c.gates()[4];
  ASSERT_EQ(q1.kind, GateKind::U3);
  EXPECT_DOUBLE_EQ(q1.angles[0], 0.4);
  EXPECT_DOUBLE_EQ(q1.angles[1], 0.5);
  EXPECT_EQ(q1.angles[2], 0.0);
  const GateOp& q2 = c.gates()[5];
  EXPECT_EQ(q2.angles[0], 0.0);
  EXPECT_EQ(q2.angles[1], 0.0);
  EXPECT_EQ(q2.angles[2], 0.0);
  EXPECT_THROW(main_block_circuit(p, std::vector<double>{1, 2, 3}, nullptr), InvalidArgument);
}

TEST(Circuits, BindingsCarryDataScale) {
  const auto arch = ArchitectureConfig::for_features(5);
  const QtttParams p = QtttParams::initial(arch, 0);
  const std::vector<double> xp{0.1, 0.2, 0.3, 0.4, 0.5};
  const Circuit c = main_block_circuit(p, xp, nullptr);
  std::size_t data_bindings = 0;
  for (const auto& b : c.bindings()) {
    if (p.layout().segment_of(b.param) != Segment::Main) ADD_FAILURE();
    if (c.origins()[b.gate] == GateOrigin::MainData) {
      ++data_bindings;
      const auto feature = (b.param - p.layout().main_data_weight(0, 0)) % 5;
      EXPECT_DOUBLE_EQ(b.scale, xp[feature]);
    } else {
      EXPECT_EQ(b.scale, 1.0);
    }
  }
  EXPECT_EQ(data_bindings, 25u);
  EXPECT_EQ(c.bindings().size(), 25u + 36u);
}

TEST(Circuits, RunMatchesDenseOracleWithTrashQubits) {
  auto arch = ArchitectureConfig::for_features(5, 2, 1);
  arch.layers_encoder = 2;
  arch.layers_decoder = 2;
  arch.layers_main = 2;
  const QtttParams p = random_params(arch, 4);
  const NoiseSpec noise = realize_noise(arch, 0.5, 2);
  const std::vector<double> xp{0.5, -1.0, 0.25, 2.0, 0.75};
  const int n = arch.total_qubits();

  auto enc = reference_encoder(p, &noise);
  const oracle::Vec psi0 = oracle::encode(xp, 3, 1);
  const oracle::Vec encoded = oracle::unitary(enc, n) * psi0;
  EXPECT_LT(max_diff(run_encoder(xp, p, &noise), encoded), 1e-12);

  const oracle::Vec decoded = oracle::unitary(reference_decoder(p, &noise), n) * encoded;
  EXPECT_LT(max_diff(run_decoder(run_encoder(xp, p, &noise), p, &noise), decoded), 1e-12);

  const oracle::Vec main_out = oracle::unitary(reference_main_block(p, xp, &noise), n) * encoded;
  EXPECT_LT(max_diff(run_main_branch(xp, p, &noise), main_out), 1e-12);
}

TEST(Circuits, ShiftedRunEqualsEditedGate) {
  const auto arch = ArchitectureConfig::for_features(5);
  const QtttParams p = random_params(arch, 1);
  const Circuit c = qae_circuit(p, nullptr);
  StateVector a = initial_state(std::vector<double>{1, 2, 3, 4, 5}, arch);
  StateVector b = a;
  c.run_shifted(a, 7, 1, 0.25);
  std::vector<GateOp> edited(c.gates().begin(), c.gates().end());
  edited[7].angles[1] += 0.25;
  for (const auto& g : edited) b.apply(g);
  for (std::size_t i = 0; i < a.dim(); ++i) EXPECT_NEAR(std::abs(a[i] - b[i]), 0.0, 1e-15);
}

TEST(Circuits, TallyCountsGateApplications) {
  const auto arch = ArchitectureConfig::for_features(5);
  const QtttParams p = QtttParams::initial(arch, 0);
  GateTally t;
  StateVector s(3);
  qae_circuit(p, nullptr).run(s, &t);
  qae_circuit(p, nullptr).run_shifted(s, 0, 0, 0.1, &t);
  EXPECT_EQ(t.gates, 96u);
  EXPECT_EQ(t.circuits, 2u);
}

TEST(Circuits, JsonListsProvenance) {
  const auto arch = ArchitectureConfig::for_features(5, 2, 1);
  const QtttParams p = QtttParams::initial(arch, 0);
  const auto j = encoder_circuit(p, nullptr).to_json();
  ASSERT_EQ(j.size(), 25u);
  EXPECT_EQ(j[0]["kind"], "U3");
  EXPECT_EQ(j[0]["origin"], "encoder.u3");
  EXPECT_EQ(j[3]["kind"], "CNOT");
  EXPECT_EQ(j[24]["origin"], "trash.swap");
  EXPECT_EQ(j[24]["qubits"], nlohmann::json({2, 3}));
}

TEST(LinearLayer, AffineMap) {
  // M = [[1, 2], [0, -1]], b = [0.5, 0.25]
  const std::vector<double> theta{1, 2, 0, -1, 0.5, 0.25};
  const auto out = linear_preprocess(std::vector<double>{3, 4}, theta);
  EXPECT_DOUBLE_EQ(out[0], 11.5);
  EXPECT_DOUBLE_EQ(out[1], -3.75);
  EXPECT_THROW(linear_preprocess(std::vector<double>{3, 4}, std::vector<double>(5)), InvalidArgument);
}

TEST(LinearLayer, DisabledLayerPassesInputThrough) {
  auto arch = ArchitectureConfig::for_features(5);
  arch.use_linear = false;
  QtttParams p = QtttParams::initial(arch, 0);
  p[0] = 7.0;
  const std::vector<double> x{1, 2, 3, 4, 5};
  EXPECT_EQ(prepare_input(x, p), x);
  EXPECT_THROW(prepare_input(std::vector<double>{1, 2}, p), InvalidArgument);
}
