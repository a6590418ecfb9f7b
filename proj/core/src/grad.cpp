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

#include "qttt/grad.hpp"

#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "qttt/errors.hpp"
#include "qttt/model.hpp"

namespace qttt {
namespace {

constexpr double kShift = std::numbers::pi / 2;

double loss_at(LossKind kind, std::span<const double> x_prime, std::span<const double> y,
               const QtttParams& params, const NoiseSpec* noise) {
  const auto& arch = params.arch();
  double l_mt = 0.0, l_ae = 0.0;
  if (kind != LossKind::AutoEncoder) {
    StateVector s = initial_state(x_prime, arch);
    main_circuit(params, x_prime, noise).run(s);
    l_mt = main_task_loss_from(fidelity_matrix(s, arch), params.segment(Segment::Alpha), y,
                               arch.n_qubits);
  }
  if (kind != LossKind::MainTask) {
    StateVector s = initial_state(x_prime, arch);
    qae_circuit(params, noise).run(s);
    l_ae = 1.0 - reconstruction_fidelity(s, x_prime, arch);
  }
  switch (kind) {
    case LossKind::MainTask: return l_mt;
    case LossKind::AutoEncoder: return l_ae;
    case LossKind::Total: {
      const auto& layout = params.layout();
      return combine_losses(l_mt, l_ae, params[layout.log_sigma_mt()],
                            params[layout.log_sigma_ae()])
          .l_total;
    }
  }
  return 0.0;
}

GradientVector compress(const std::vector<double>& full, const ParamLayout& layout,
                        SegmentSet mask, GradMethod method) {
  GradientVector g{{}, mask, method};
  g.values.reserve(layout.size_of(mask));
  for (auto s : kAllSegments) {
    if (!mask.contains(s)) continue;
    const auto r = layout.range(s);
    g.values.insert(g.values.end(), full.begin() + static_cast<std::ptrdiff_t>(r.offset),
                    full.begin() + static_cast<std::ptrdiff_t>(r.end()));
  }
  return g;
}

void check_label(LossKind kind, const Datum& d, const ArchitectureConfig& arch) {
  if (kind == LossKind::AutoEncoder) return;
  if (d.y.size() != static_cast<std::size_t>(arch.n_classes)) {
    throw InvalidArgument("a one-hot label of length C is required for this loss");
  }
  class_of(d.y);
}

void parameter_shift_into(std::vector<double>& full, LossKind kind, const Datum& d,
                          std::span<const double> x_prime, const QtttParams& params,
                          const NoiseSpec* noise, SegmentSet mask, GateTally* tally) {
  const auto& arch = params.arch();
  const auto& layout = params.layout();
  const double w_mt = kind == LossKind::Total ? 0.5 / std::pow(params.sigma_mt(), 2) : 1.0;
  const double w_ae = kind == LossKind::Total ? 0.5 / std::pow(params.sigma_ae(), 2) : 1.0;
  const StateVector init = initial_state(x_prime, arch);

  const bool need_main = kind != LossKind::AutoEncoder &&
                         (mask.contains(Segment::Encoder) || mask.contains(Segment::Main));
  const bool need_qae = kind != LossKind::MainTask &&
                        (mask.contains(Segment::Encoder) || mask.contains(Segment::Decoder));

  if (need_main) {
    const Circuit circuit = main_circuit(params, x_prime, noise);
    StateVector base = init;
    circuit.run(base, tally);
    const auto f = fidelity_matrix(base, arch);
    const auto alpha = params.segment(Segment::Alpha);
    const auto nq = static_cast<std::size_t>(arch.n_qubits);
    // dl_MT / df_{c,q} = (alpha f - y) alpha
    std::vector<double> dl_df(f.size());
    for (std::size_t c = 0; c < static_cast<std::size_t>(arch.n_classes); ++c) {
      for (std::size_t q = 0; q < nq; ++q) {
        const std::size_t i = c * nq + q;
        dl_df[i] = w_mt * (alpha[i] * f[i] - d.y[c]) * alpha[i];
      }
    }
    for (const auto& b : circuit.bindings()) {
      if (!mask.contains(layout.segment_of(b.param))) continue;
      StateVector plus = init, minus = init;
      circuit.run_shifted(plus, b.gate, b.slot, kShift, tally);
      circuit.run_shifted(minus, b.gate, b.slot, -kShift, tally);
      const auto fp = fidelity_matrix(plus, arch);
      const auto fm = fidelity_matrix(minus, arch);
      double acc = 0.0;
      for (std::size_t i = 0; i < f.size(); ++i) acc += dl_df[i] * 0.5 * (fp[i] - fm[i]);
      full[b.param] += b.scale * acc;
    }
  }

  if (need_qae) {
    const Circuit circuit = qae_circuit(params, noise);
    for (const auto& b : circuit.bindings()) {
      if (!mask.contains(layout.segment_of(b.param))) continue;
      StateVector plus = init, minus = init;
      circuit.run_shifted(plus, b.gate, b.slot, kShift, tally);
      circuit.run_shifted(minus, b.gate, b.slot, -kShift, tally);
      const double dfid = 0.5 * (reconstruction_fidelity(plus, x_prime, arch) -
                                 reconstruction_fidelity(minus, x_prime, arch));
      full[b.param] -= b.scale * w_ae * dfid;
    }
  }
}

}  // namespace

std::string_view to_string(LossKind k) {
  switch (k) {
    case LossKind::Total: return "total";
    case LossKind::MainTask: return "main-task";
    case LossKind::AutoEncoder: return "auto-encoder";
  }
  return "?";
}

std::string_view to_string(GradMethod m) {
  switch (m) {
    case GradMethod::ParameterShift: return "parameter-shift";
    case GradMethod::FiniteDifference: return "finite-difference";
    case GradMethod::Analytic: return "analytic";
    case GradMethod::Mixed: return "mixed";
  }
  return "?";
}

std::vector<double> GradientVector::to_full(const ParamLayout& layout) const {
  std::vector<double> full(layout.total(), 0.0);
  std::size_t k = 0;
  for (auto s : kAllSegments) {
    if (!segments.contains(s)) continue;
    const auto r = layout.range(s);
    for (std::size_t i = r.offset; i < r.end(); ++i) full[i] = values[k++];
  }
  return full;
}

std::span<const double> GradientVector::segment(const ParamLayout& layout, Segment s) const {
  if (!segments.contains(s)) throw InvalidArgument("gradient does not cover this segment");
  std::size_t offset = 0;
  for (auto t : kAllSegments) {
    if (t == s) break;
    if (segments.contains(t)) offset += layout.range(t).size;
  }
  return std::span<const double>(values).subspan(offset, layout.range(s).size);
}

double evaluate_loss(LossKind kind, const Datum& d, const QtttParams& params,
                     const NoiseSpec* noise) {
  check_label(kind, d, params.arch());
  const auto x_prime = prepare_input(d.x, params);
  return loss_at(kind, x_prime, d.y, params, noise);
}

GradientVector grad_parameter_shift(LossKind kind, const Datum& d, const QtttParams& params,
                                    const NoiseSpec* noise, SegmentSet mask, GateTally* tally) {
  for (auto s : {Segment::Linear, Segment::Alpha, Segment::Sigma}) {
    if (mask.contains(s)) {
      throw UnsupportedSegment("parameter-shift rule does not apply to " +
                               std::string(to_string(s)));
    }
  }
  check_label(kind, d, params.arch());
  const auto x_prime = prepare_input(d.x, params);
  std::vector<double> full(params.layout().total(), 0.0);
  parameter_shift_into(full, kind, d, x_prime, params, noise, mask, tally);
  return compress(full, params.layout(), mask, GradMethod::ParameterShift);
}

GradientVector grad_finite_difference(LossKind kind, const Datum& d, const QtttParams& params,
                                      const NoiseSpec* noise, SegmentSet mask, double h) {
  if (!(h > 0.0)) throw InvalidArgument("finite-difference step must be > 0");
  check_label(kind, d, params.arch());
  const auto& layout = params.layout();
  std::vector<double> full(layout.total(), 0.0);
  QtttParams probe = params;
  for (auto s : kAllSegments) {
    if (!mask.contains(s)) continue;
    const auto r = layout.range(s);
    for (std::size_t i = r.offset; i < r.end(); ++i) {
      const double orig = probe[i];
      probe[i] = orig + h;
      const double up = evaluate_loss(kind, d, probe, noise);
      probe[i] = orig - h;
      const double down = evaluate_loss(kind, d, probe, noise);
      probe[i] = orig;
      full[i] = (up - down) / (2 * h);
    }
  }
  return compress(full, layout, mask, GradMethod::FiniteDifference);
}

GradientVector grad_analytic_heads(LossKind kind, const Datum& d, const QtttParams& params,
                                   const NoiseSpec* noise) {
  const auto& arch = params.arch();
  const auto& layout = params.layout();
  check_label(kind, d, arch);
  std::vector<double> full(layout.total(), 0.0);
  const SegmentSet heads{Segment::Alpha, Segment::Sigma};
  if (kind == LossKind::AutoEncoder) {
    return compress(full, layout, heads, GradMethod::Analytic);
  }

  const auto x_prime = prepare_input(d.x, params);
  const auto f = fidelity_matrix(run_main_branch(x_prime, params, noise), arch);
  const auto alpha = params.segment(Segment::Alpha);
  const double l_mt = main_task_loss_from(f, alpha, d.y, arch.n_qubits);
  const double w_mt = kind == LossKind::Total ? 0.5 / std::pow(params.sigma_mt(), 2) : 1.0;
  const auto nq = static_cast<std::size_t>(arch.n_qubits);
  const auto a = layout.range(Segment::Alpha);
  for (std::size_t c = 0; c < static_cast<std::size_t>(arch.n_classes); ++c) {
    for (std::size_t q = 0; q < nq; ++q) {
      const std::size_t i = c * nq + q;
      full[a.offset + i] = w_mt * (alpha[i] * f[i] - d.y[c]) * f[i];
    }
  }
  if (kind == LossKind::Total) {
    StateVector s = initial_state(x_prime, arch);
    qae_circuit(params, noise).run(s);
    const double l_ae = 1.0 - reconstruction_fidelity(s, x_prime, arch);
    // d/ds [l e^{-2s} / 2 + s] = 1 - l e^{-2s}
    full[layout.log_sigma_mt()] = 1.0 - l_mt / std::pow(params.sigma_mt(), 2);
    full[layout.log_sigma_ae()] = 1.0 - l_ae / std::pow(params.sigma_ae(), 2);
  }
  return compress(full, layout, heads, GradMethod::Analytic);
}

GradientVector grad_linear_layer(LossKind kind, const Datum& d, const QtttParams& params,
                                 const NoiseSpec* noise, double h) {
  if (!(h > 0.0)) throw InvalidArgument("finite-difference step must be > 0");
  const auto& arch = params.arch();
  const auto& layout = params.layout();
  check_label(kind, d, arch);
  std::vector<double> full(layout.total(), 0.0);
  const SegmentSet lin{Segment::Linear};
  if (!arch.use_linear) return compress(full, layout, lin, GradMethod::FiniteDifference);

  auto x_prime = prepare_input(d.x, params);
  for (int i = 0; i < arch.d_x; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const double orig = x_prime[ui];
    x_prime[ui] = orig + h;
    const double up = loss_at(kind, x_prime, d.y, params, noise);
    x_prime[ui] = orig - h;
    const double down = loss_at(kind, x_prime, d.y, params, noise);
    x_prime[ui] = orig;
    const double g = (up - down) / (2 * h);
    for (int j = 0; j < arch.d_x; ++j) full[layout.linear_matrix(i, j)] = g * d.x[static_cast<std::size_t>(j)];
    full[layout.linear_bias(i)] = g;
  }
  return compress(full, layout, lin, GradMethod::FiniteDifference);
}

std::vector<double> loss_gradient(LossKind kind, const Datum& d, const QtttParams& params,
                                  const NoiseSpec* noise, SegmentSet mask, GateTally* tally) {
  const auto& layout = params.layout();
  check_label(kind, d, params.arch());
  std::vector<double> full(layout.total(), 0.0);

  SegmentSet circuit;
  for (auto s : {Segment::Encoder, Segment::Decoder, Segment::Main}) {
    if (mask.contains(s)) circuit.insert(s);
  }
  if (!circuit.empty()) {
    const auto x_prime = prepare_input(d.x, params);
    parameter_shift_into(full, kind, d, x_prime, params, noise, circuit, tally);
  }
  auto scatter = [&](const GradientVector& g) {
    const auto part = g.to_full(layout);
    for (auto s : kAllSegments) {
      if (!g.segments.contains(s)) continue;
      const auto r = layout.range(s);
      for (std::size_t i = r.offset; i < r.end(); ++i) full[i] = part[i];
    }
  };
  if (mask.contains(Segment::Linear)) scatter(grad_linear_layer(kind, d, params, noise));
  if (mask.contains(Segment::Alpha) || mask.contains(Segment::Sigma)) {
    auto heads = grad_analytic_heads(kind, d, params, noise);
    SegmentSet keep;
    if (mask.contains(Segment::Alpha)) keep.insert(Segment::Alpha);
    if (mask.contains(Segment::Sigma)) keep.insert(Segment::Sigma);
    const auto part = heads.to_full(layout);
    for (auto s : {Segment::Alpha, Segment::Sigma}) {
      if (!keep.contains(s)) continue;
      const auto r = layout.range(s);
      for (std::size_t i = r.offset; i < r.end(); ++i) full[i] = part[i];
    }
  }
  return full;
}

GateCountReport count_gates(const ArchitectureConfig& arch, std::uint64_t n_train,
                            std::uint64_t n_test, std::uint64_t shots) {
  arch.validate();
  const QtttParams params = QtttParams::initial(arch, 0);
  const std::vector<double> x_prime(static_cast<std::size_t>(arch.d_x), 1.0);
  const Circuit main = main_circuit(params, x_prime, nullptr);
  const Circuit qae = qae_circuit(params, nullptr);
  const auto& layout = params.layout();

  auto bound = [&](const Circuit& c, SegmentSet mask) {
    std::uint64_t n = 0;
    for (const auto& b : c.bindings()) n += mask.contains(layout.segment_of(b.param)) ? 1 : 0;
    return n;
  };

  // One unshifted main-branch pass supplies the residuals, then two shifted
  // passes per bound angle slot in each circuit.
  const SegmentSet train_mask = kCircuitSegments;
  const SegmentSet ttt_mask{Segment::Encoder, Segment::Decoder};
  GateCountReport r;
  r.shots = shots;
  r.n_train = n_train;
  r.n_test = n_test;
  r.n_qubits = arch.n_qubits;
  r.layers_encoder = arch.layers_encoder;
  r.layers_decoder = arch.layers_decoder;
  r.layers_main = arch.layers_main;
  r.training_gates_per_datum = main.size() * (1 + 2 * bound(main, train_mask)) +
                               qae.size() * 2 * bound(qae, train_mask);
  r.ttt_gates_per_datum = qae.size() * 2 * bound(qae, ttt_mask);
  r.training_gates = shots * n_train * r.training_gates_per_datum;
  r.ttt_gates = shots * n_test * r.ttt_gates_per_datum;
  r.measured_ratio = r.training_gates == 0
                         ? 0.0
                         : static_cast<double>(r.ttt_gates) / static_cast<double>(r.training_gates);
  const double ed = arch.layers_encoder + arch.layers_decoder;
  const double edm = ed + arch.layers_main;
  r.asymptotic_ratio = n_train == 0 ? 0.0
                                    : static_cast<double>(n_test) / static_cast<double>(n_train) *
                                          (ed * ed) / (edm * edm);
  return r;
}

nlohmann::json to_json(const GateCountReport& r) {
  return nlohmann::json{{"shots", r.shots},
                        {"n_train", r.n_train},
                        {"n_test", r.n_test},
                        {"n_qubits", r.n_qubits},
                        {"layers_encoder", r.layers_encoder},
                        {"layers_decoder", r.layers_decoder},
                        {"layers_main", r.layers_main},
                        {"training_gates_per_datum", r.training_gates_per_datum},
                        {"ttt_gates_per_datum", r.ttt_gates_per_datum},
                        {"training_gates", r.training_gates},
                        {"ttt_gates", r.ttt_gates},
                        {"measured_ratio", r.measured_ratio},
                        {"asymptotic_ratio", r.asymptotic_ratio}};
}

}  // namespace qttt
