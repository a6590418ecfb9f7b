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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "qttt/errors.hpp"
#include "qttt/params.hpp"

using namespace qttt;

TEST(Architecture, QubitCountRule) {
  EXPECT_EQ(auto_qubit_count(5), 3);
  EXPECT_EQ(auto_qubit_count(8), 3);
  EXPECT_EQ(auto_qubit_count(10), 4);
  EXPECT_EQ(auto_qubit_count(16), 6);
  EXPECT_EQ(ArchitectureConfig::for_features(5).n_qubits, 3);
}

TEST(Architecture, ValidationRejectsInconsistentShapes) {
  ArchitectureConfig a;
  a.n_classes = 7;
  EXPECT_THROW(a.validate(), InvalidArgument);
  a = {};
  a.n_trash = 3;
  EXPECT_THROW(a.validate(), InvalidArgument);
  a = {};
  a.d_x = 9;  // 2^3 < 9
  EXPECT_THROW(a.validate(), InvalidArgument);
  a = {};
  a.layers_main = 0;
  EXPECT_THROW(a.validate(), InvalidArgument);
  EXPECT_NO_THROW(ArchitectureConfig{}.validate());
}

TEST(Layout, SegmentSizesForTheDefaultCircuit) {
  const ParamLayout layout(ArchitectureConfig::for_features(5));
  // theta_L: 5x5 + 5; E, D: 4 layers x 3 qubits x 3 angles;
  // M: 36 variational + 5 data layers x 5 weights; alpha: 2 x 3; sigma: 2.
  EXPECT_EQ(layout.range(Segment::Linear).size, 30u);
  EXPECT_EQ(layout.range(Segment::Encoder).size, 36u);
  EXPECT_EQ(layout.range(Segment::Decoder).size, 36u);
  EXPECT_EQ(layout.range(Segment::Main).size, 61u);
  EXPECT_EQ(layout.range(Segment::Alpha).size, 6u);
  EXPECT_EQ(layout.range(Segment::Sigma).size, 2u);
  EXPECT_EQ(layout.total(), 171u);
  EXPECT_EQ(layout.range(Segment::Encoder).offset, 30u);
  EXPECT_EQ(layout.range(Segment::Decoder).offset, 66u);
  EXPECT_EQ(layout.range(Segment::Main).offset, 102u);
  EXPECT_EQ(layout.range(Segment::Alpha).offset, 163u);
  EXPECT_EQ(layout.log_sigma_mt(), 169u);
  EXPECT_EQ(layout.log_sigma_ae(), 170u);
}

TEST(Layout, IndexHelpers) {
  const ParamLayout layout(ArchitectureConfig::for_features(5));
  EXPECT_EQ(layout.linear_matrix(1, 2), 7u);
  EXPECT_EQ(layout.linear_bias(3), 28u);
  EXPECT_EQ(layout.encoder_angle(1, 2, 0), 30u + 15u);
  EXPECT_EQ(layout.decoder_angle(0, 0, 2), 66u + 2u);
  EXPECT_EQ(layout.main_variational_angle(3, 2, 2), 102u + 35u);
  EXPECT_EQ(layout.main_data_weight(0, 0), 138u);
  EXPECT_EQ(layout.main_data_weight(4, 4), 162u);
  EXPECT_EQ(layout.alpha(1, 2), 168u);
  EXPECT_EQ(layout.segment_of(0), Segment::Linear);
  EXPECT_EQ(layout.segment_of(65), Segment::Encoder);
  EXPECT_EQ(layout.segment_of(66), Segment::Decoder);
  EXPECT_EQ(layout.segment_of(170), Segment::Sigma);
}

TEST(Layout, AblationsChangeTheMainSegment) {
  ArchitectureConfig a = ArchitectureConfig::for_features(5);
  a.reuploading = false;
  EXPECT_EQ(ParamLayout(a).range(Segment::Main).size, 36u + 5u);
  a = ArchitectureConfig::for_features(5, 3);
  EXPECT_EQ(ParamLayout(a).range(Segment::Alpha).size, 9u);
}

TEST(SegmentSet, Membership) {
  constexpr SegmentSet s{Segment::Linear, Segment::Decoder};
  static_assert(s.contains(Segment::Linear));
  EXPECT_TRUE(s.contains(Segment::Decoder));
  EXPECT_FALSE(s.contains(Segment::Main));
  EXPECT_EQ(ParamLayout(ArchitectureConfig{}).size_of(s), 66u);
  EXPECT_TRUE(SegmentSet::all().contains(Segment::Sigma));
}

TEST(Params, InitialValues) {
  const auto arch = ArchitectureConfig::for_features(5);
  const QtttParams p = QtttParams::initial(arch, 42);
  const auto& layout = p.layout();
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) EXPECT_EQ(p[layout.linear_matrix(i, j)], i == j ? 1.0 : 0.0);
    EXPECT_EQ(p[layout.linear_bias(i)], 0.0);
  }
  for (double a : p.segment(Segment::Alpha)) EXPECT_EQ(a, 1.0);
  for (double s : p.segment(Segment::Sigma)) EXPECT_EQ(s, 0.0);
  EXPECT_DOUBLE_EQ(p.sigma_mt(), 1.0);
  for (int l = 0; l < arch.data_layers(); ++l)
    for (int i = 0; i < 5; ++i) EXPECT_EQ(p[layout.main_data_weight(l, i)], 1.0);

  const auto e = p.segment(Segment::Encoder);
  const double mean = std::accumulate(e.begin(), e.end(), 0.0) / static_cast<double>(e.size());
  double var = 0.0;
  for (double v : e) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(e.size() - 1));
  EXPECT_GT(sd, 0.05);
  EXPECT_LT(sd, 0.15);
}

TEST(Params, InitializationIsSeeded) {
  const auto arch = ArchitectureConfig::for_features(5);
  EXPECT_EQ(QtttParams::initial(arch, 1), QtttParams::initial(arch, 1));
  EXPECT_FALSE(QtttParams::initial(arch, 1) == QtttParams::initial(arch, 2));
  EXPECT_THROW(QtttParams::from_values(arch, std::vector<double>(170)), InvalidArgument);
}

class CheckpointTest : public ::testing::Test {
 protected:
  std::filesystem::path dir = std::filesystem::temp_directory_path() / "qttt_checkpoint_test";
  void SetUp() override { std::filesystem::create_directories(dir); }
  void TearDown() override { std::filesystem::remove_all(dir); }
};

TEST_F(CheckpointTest, RoundTripIsExact) {
  auto arch = ArchitectureConfig::for_features(5, 3, 1);
  QtttParams p = QtttParams::initial(arch, 9);
  p[3] = 0.1 + 0.2;  // not representable as a short decimal
  const auto path = (dir / "ck.json").string();
  save_checkpoint(p, path);
  EXPECT_EQ(load_checkpoint(path), p);
}

TEST_F(CheckpointTest, SchemaViolationsAreRejected) {
  const QtttParams p = QtttParams::initial(ArchitectureConfig{}, 0);
  auto j = checkpoint_to_json(p);
  ASSERT_EQ(j.at("segments").at("theta_E").at("offset"), 30);

  auto bad_version = j;
  bad_version["version"] = 99;
  EXPECT_THROW(checkpoint_from_json(bad_version), SchemaError);

  auto bad_format = j;
  bad_format["format"] = "something-else";
  EXPECT_THROW(checkpoint_from_json(bad_format), SchemaError);

  auto short_values = j;
  short_values["values"].erase(0);
  EXPECT_THROW(checkpoint_from_json(short_values), SchemaError);

  auto bad_segments = j;
  bad_segments["segments"]["theta_D"]["offset"] = 0;
  EXPECT_THROW(checkpoint_from_json(bad_segments), SchemaError);

  EXPECT_THROW(load_checkpoint((dir / "missing.json").string()), Error);
}
