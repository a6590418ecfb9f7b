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

#include "qttt/params.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include <nlohmann/json.hpp>

#include "qttt/errors.hpp"

namespace qttt {

int auto_qubit_count(int d_x) {
  if (d_x < 1) throw InvalidArgument("feature dimension must be >= 1");
  int log2_ceil = 0;
  while ((1 << log2_ceil) < d_x) ++log2_ceil;
  return std::max({(d_x + 2) / 3, log2_ceil, 1});
}

ArchitectureConfig ArchitectureConfig::for_features(int d_x, int n_classes, int n_trash) {
  ArchitectureConfig a;
  a.d_x = d_x;
  a.n_classes = n_classes;
  a.n_qubits = auto_qubit_count(d_x);
  a.n_trash = n_trash;
  a.validate();
  return a;
}

void ArchitectureConfig::validate() const {
  auto fail = [](const std::string& what) { throw InvalidArgument("architecture: " + what); };
  if (d_x < 1) fail("d_x must be >= 1");
  if (n_classes < 2 || n_classes > 6) fail("class count must be in [2, 6]");
  if (n_qubits < 2) fail("need at least 2 data qubits");
  if ((std::size_t{1} << n_qubits) < static_cast<std::size_t>(d_x)) {
    fail("2^N_q must be >= d_x for amplitude encoding");
  }
  if (3 * n_qubits < d_x) fail("3 * N_q must be >= d_x for data uploading");
  if (n_trash < 0 || n_trash >= n_qubits) fail("need 0 <= N_t < N_q");
  if (layers_encoder < 1 || layers_decoder < 1 || layers_main < 1) {
    fail("all layer counts must be >= 1");
  }
  if (total_qubits() > 20) fail("more than 20 qubits is not supported");
}

void to_json(nlohmann::json& j, const ArchitectureConfig& a) {
  j = nlohmann::json{{"d_x", a.d_x},
                     {"n_classes", a.n_classes},
                     {"n_qubits", a.n_qubits},
                     {"n_trash", a.n_trash},
                     {"layers_encoder", a.layers_encoder},
                     {"layers_decoder", a.layers_decoder},
                     {"layers_main", a.layers_main},
                     {"use_linear", a.use_linear},
                     {"reuploading", a.reuploading}};
}

void from_json(const nlohmann::json& j, ArchitectureConfig& a) {
  j.at("d_x").get_to(a.d_x);
  j.at("n_classes").get_to(a.n_classes);
  j.at("n_qubits").get_to(a.n_qubits);
  j.at("n_trash").get_to(a.n_trash);
  j.at("layers_encoder").get_to(a.layers_encoder);
  j.at("layers_decoder").get_to(a.layers_decoder);
  j.at("layers_main").get_to(a.layers_main);
  j.at("use_linear").get_to(a.use_linear);
  j.at("reuploading").get_to(a.reuploading);
}

std::string_view to_string(Segment s) {
  switch (s) {
    case Segment::Linear: return "theta_L";
    case Segment::Encoder: return "theta_E";
    case Segment::Decoder: return "theta_D";
    case Segment::Main: return "theta_M";
    case Segment::Alpha: return "alpha";
    case Segment::Sigma: return "sigma";
  }
  return "?";
}

ParamLayout::ParamLayout(const ArchitectureConfig& arch) : arch_(arch) {
  const auto d = static_cast<std::size_t>(arch.d_x);
  const auto nq = static_cast<std::size_t>(arch.n_qubits);
  const std::array<std::size_t, 6> sizes{
      d * (d + 1),
      3 * nq * static_cast<std::size_t>(arch.layers_encoder),
      3 * nq * static_cast<std::size_t>(arch.layers_decoder),
      3 * nq * static_cast<std::size_t>(arch.layers_main) +
          d * static_cast<std::size_t>(arch.data_layers()),
      static_cast<std::size_t>(arch.n_classes) * nq,
      2};
  std::size_t offset = 0;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    ranges_[i] = SegmentRange{offset, sizes[i]};
    offset += sizes[i];
  }
}

std::size_t ParamLayout::size_of(SegmentSet set) const {
  std::size_t n = 0;
  for (auto s : kAllSegments) {
    if (set.contains(s)) n += range(s).size;
  }
  return n;
}

std::size_t ParamLayout::linear_matrix(int row, int col) const {
  return range(Segment::Linear).offset + static_cast<std::size_t>(row * arch_.d_x + col);
}
std::size_t ParamLayout::linear_bias(int row) const {
  return range(Segment::Linear).offset + static_cast<std::size_t>(arch_.d_x * arch_.d_x + row);
}
std::size_t ParamLayout::encoder_angle(int layer, int qubit, int slot) const {
  return range(Segment::Encoder).offset +
         static_cast<std::size_t>((layer * arch_.n_qubits + qubit) * 3 + slot);
}
std::size_t ParamLayout::decoder_angle(int layer, int qubit, int slot) const {
  return range(Segment::Decoder).offset +
         static_cast<std::size_t>((layer * arch_.n_qubits + qubit) * 3 + slot);
}
std::size_t ParamLayout::main_variational_angle(int layer, int qubit, int slot) const {
  return range(Segment::Main).offset +
         static_cast<std::size_t>((layer * arch_.n_qubits + qubit) * 3 + slot);
}
std::size_t ParamLayout::main_data_weight(int data_layer, int feature) const {
  return range(Segment::Main).offset +
         static_cast<std::size_t>(3 * arch_.n_qubits * arch_.layers_main) +
         static_cast<std::size_t>(data_layer * arch_.d_x + feature);
}
std::size_t ParamLayout::alpha(int cls, int qubit) const {
  return range(Segment::Alpha).offset + static_cast<std::size_t>(cls * arch_.n_qubits + qubit);
}

Segment ParamLayout::segment_of(std::size_t index) const {
  for (auto s : kAllSegments) {
    if (index < range(s).end()) return s;
  }
  throw InvalidArgument("segment_of: index out of range");
}

QtttParams::QtttParams(const ArchitectureConfig& arch, std::vector<double> values)
    : arch_(arch), layout_(arch), values_(std::move(values)) {}

QtttParams QtttParams::initial(const ArchitectureConfig& arch, std::uint64_t seed) {
  arch.validate();
  ParamLayout layout(arch);
  std::vector<double> v(layout.total(), 0.0);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> angle(0.0, 0.1);

  for (int i = 0; i < arch.d_x; ++i) v[layout.linear_matrix(i, i)] = 1.0;
  for (auto s : {Segment::Encoder, Segment::Decoder}) {
    const auto r = layout.range(s);
    for (std::size_t i = r.offset; i < r.end(); ++i) v[i] = angle(rng);
  }
  for (int l = 0; l < arch.layers_main; ++l) {
    for (int q = 0; q < arch.n_qubits; ++q) {
      for (int k = 0; k < 3; ++k) v[layout.main_variational_angle(l, q, k)] = angle(rng);
    }
  }
  for (int l = 0; l < arch.data_layers(); ++l) {
    for (int i = 0; i < arch.d_x; ++i) v[layout.main_data_weight(l, i)] = 1.0;
  }
  const auto a = layout.range(Segment::Alpha);
  for (std::size_t i = a.offset; i < a.end(); ++i) v[i] = 1.0;
  return QtttParams(arch, std::move(v));
}

QtttParams QtttParams::from_values(const ArchitectureConfig& arch, std::vector<double> values) {
  arch.validate();
  if (values.size() != ParamLayout(arch).total()) {
    throw InvalidArgument("QtttParams: expected " + std::to_string(ParamLayout(arch).total()) +
                          " values, got " + std::to_string(values.size()));
  }
  return QtttParams(arch, std::move(values));
}

std::span<const double> QtttParams::segment(Segment s) const {
  const auto r = layout_.range(s);
  return std::span<const double>(values_).subspan(r.offset, r.size);
}

std::span<double> QtttParams::segment(Segment s) {
  const auto r = layout_.range(s);
  return std::span<double>(values_).subspan(r.offset, r.size);
}

double QtttParams::sigma_mt() const { return std::exp(values_[layout_.log_sigma_mt()]); }
double QtttParams::sigma_ae() const { return std::exp(values_[layout_.log_sigma_ae()]); }

nlohmann::json checkpoint_to_json(const QtttParams& params) {
  nlohmann::json segments = nlohmann::json::object();
  for (auto s : kAllSegments) {
    const auto r = params.layout().range(s);
    segments[std::string(to_string(s))] = {{"offset", r.offset}, {"size", r.size}};
  }
  return nlohmann::json{{"format", "qttt-checkpoint"},
                        {"version", kCheckpointVersion},
                        {"architecture", params.arch()},
                        {"segments", segments},
                        {"values", std::vector<double>(params.values().begin(),
                                                       params.values().end())}};
}

QtttParams checkpoint_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "qttt-checkpoint") {
      throw SchemaError("checkpoint: unknown format tag");
    }
    if (j.at("version").get<int>() != kCheckpointVersion) {
      throw SchemaError("checkpoint: unsupported version " + j.at("version").dump());
    }
    const auto arch = j.at("architecture").get<ArchitectureConfig>();
    const ParamLayout layout(arch);
    for (auto s : kAllSegments) {
      const auto& seg = j.at("segments").at(std::string(to_string(s)));
      const auto r = layout.range(s);
      if (seg.at("offset").get<std::size_t>() != r.offset ||
          seg.at("size").get<std::size_t>() != r.size) {
        throw SchemaError("checkpoint: segment map does not match the architecture for " +
                          std::string(to_string(s)));
      }
    }
    return QtttParams::from_values(arch, j.at("values").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("checkpoint: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw SchemaError(std::string("checkpoint: ") + e.what());
  }
}

void save_checkpoint(const QtttParams& params, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write checkpoint " + path);
  out << checkpoint_to_json(params).dump(2) << '\n';
}

QtttParams load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read checkpoint " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("checkpoint " + path + ": " + e.what());
  }
  return checkpoint_from_json(j);
}

}  // namespace qttt
