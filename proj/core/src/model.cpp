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

#include "qttt/model.hpp"

#include <array>
#include <cmath>
#include <numeric>
#include <string>

#include "qttt/errors.hpp"

namespace qttt {
namespace {

using Bloch = std::array<double, 3>;

std::vector<Bloch> bloch_table(int n_classes) {
  const double r3 = std::sqrt(3.0);
  switch (n_classes) {
    case 2: return {{0, 0, 1}, {0, 0, -1}};
    case 3: return {{0, 0, 1}, {r3 / 2, 0, -0.5}, {-r3 / 2, 0, -0.5}};
    case 4: {
      const double a = 2 * std::sqrt(2.0) / 3, b = std::sqrt(2.0) / 3, c = std::sqrt(2.0 / 3);
      return {{0, 0, 1}, {a, 0, -1.0 / 3}, {-b, c, -1.0 / 3}, {-b, -c, -1.0 / 3}};
    }
    case 5: return {{0, 0, 1}, {0, 0, -1}, {1, 0, 0}, {-0.5, r3 / 2, 0}, {-0.5, -r3 / 2, 0}};
    case 6: return {{0, 0, 1}, {0, 0, -1}, {1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}};
    default:
      throw InvalidArgument("label states are defined for 2 to 6 classes, got " +
                            std::to_string(n_classes));
  }
}

}  // namespace

LabelStates LabelStates::for_classes(int n_classes) {
  LabelStates out;
  for (const auto& b : bloch_table(n_classes)) {
    out.states_.push_back(ReducedDensity::from_bloch(b[0], b[1], b[2]));
  }
  return out;
}

const LabelStates& label_states(int n_classes) {
  static const std::array<LabelStates, 5> tables{
      LabelStates::for_classes(2), LabelStates::for_classes(3), LabelStates::for_classes(4),
      LabelStates::for_classes(5), LabelStates::for_classes(6)};
  if (n_classes < 2 || n_classes > 6) {
    throw InvalidArgument("label states are defined for 2 to 6 classes");
  }
  return tables[static_cast<std::size_t>(n_classes - 2)];
}

LossBreakdown combine_losses(double l_mt, double l_ae, double log_sigma_mt,
                             double log_sigma_ae) {
  LossBreakdown b;
  b.l_mt = l_mt;
  b.l_ae = l_ae;
  b.sigma_mt = std::exp(log_sigma_mt);
  b.sigma_ae = std::exp(log_sigma_ae);
  b.l_total = l_mt / (2 * b.sigma_mt * b.sigma_mt) + l_ae / (2 * b.sigma_ae * b.sigma_ae) +
              std::log(b.sigma_mt * b.sigma_ae);
  return b;
}

int class_of(std::span<const double> y) {
  int cls = -1;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] == 1.0) {
      if (cls >= 0) throw InvalidArgument("label is not one-hot: several ones");
      cls = static_cast<int>(i);
    } else if (y[i] != 0.0) {
      throw InvalidArgument("label is not one-hot: entry other than 0 or 1");
    }
  }
  if (cls < 0) throw InvalidArgument("label is not one-hot: no class set");
  return cls;
}

std::vector<double> one_hot(int cls, int n_classes) {
  if (cls < 0 || cls >= n_classes) throw InvalidArgument("class index out of range");
  std::vector<double> y(static_cast<std::size_t>(n_classes), 0.0);
  y[static_cast<std::size_t>(cls)] = 1.0;
  return y;
}

double reconstruction_fidelity(const StateVector& decoded, std::span<const double> x_prime,
                               const ArchitectureConfig& arch) {
  const StateVector target = amplitude_encode(x_prime, arch.n_qubits);
  if (arch.n_trash == 0) return fidelity_pure(target, decoded);
  std::vector<int> data(static_cast<std::size_t>(arch.n_qubits));
  std::iota(data.begin(), data.end(), 0);
  return std::clamp(expectation(partial_trace(decoded, data), target), 0.0, 1.0);
}

std::vector<double> fidelity_matrix(const StateVector& main_output,
                                    const ArchitectureConfig& arch) {
  const auto& labels = label_states(arch.n_classes);
  const auto nq = static_cast<std::size_t>(arch.n_qubits);
  std::vector<double> f(static_cast<std::size_t>(arch.n_classes) * nq);
  for (int q = 0; q < arch.n_qubits; ++q) {
    const int keep[] = {q};
    const ReducedDensity rho_q = partial_trace(main_output, keep);
    for (int c = 0; c < arch.n_classes; ++c) {
      f[static_cast<std::size_t>(c) * nq + static_cast<std::size_t>(q)] =
          fidelity_mixed(labels[c], rho_q);
    }
  }
  return f;
}

double main_task_loss_from(std::span<const double> fidelities, std::span<const double> alpha,
                           std::span<const double> y_one_hot, int n_qubits) {
  class_of(y_one_hot);
  const std::size_t nq = static_cast<std::size_t>(n_qubits);
  if (fidelities.size() != y_one_hot.size() * nq || alpha.size() != fidelities.size()) {
    throw InvalidArgument("main_task_loss: fidelity/alpha/label shapes disagree");
  }
  double acc = 0.0;
  for (std::size_t c = 0; c < y_one_hot.size(); ++c) {
    for (std::size_t q = 0; q < nq; ++q) {
      const double r = alpha[c * nq + q] * fidelities[c * nq + q] - y_one_hot[c];
      acc += r * r;
    }
  }
  return 0.5 * acc;
}

std::vector<double> class_scores(std::span<const double> fidelities,
                                 std::span<const double> alpha, int n_classes, int n_qubits) {
  std::vector<double> scores(static_cast<std::size_t>(n_classes), 0.0);
  const auto nq = static_cast<std::size_t>(n_qubits);
  for (std::size_t c = 0; c < scores.size(); ++c) {
    for (std::size_t q = 0; q < nq; ++q) scores[c] += alpha[c * nq + q] * fidelities[c * nq + q];
  }
  return scores;
}

int argmax_lowest(std::span<const double> scores) {
  if (scores.empty()) throw InvalidArgument("argmax of an empty score vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return static_cast<int>(best);
}

double qae_loss(std::span<const double> x, const QtttParams& params, const NoiseSpec* noise) {
  const auto x_prime = prepare_input(x, params);
  StateVector s = initial_state(x_prime, params.arch());
  qae_circuit(params, noise).run(s);
  return 1.0 - reconstruction_fidelity(s, x_prime, params.arch());
}

std::vector<double> class_fidelities(std::span<const double> x, const QtttParams& params,
                                     const NoiseSpec* noise) {
  const auto x_prime = prepare_input(x, params);
  return fidelity_matrix(run_main_branch(x_prime, params, noise), params.arch());
}

double main_task_loss(std::span<const double> x, std::span<const double> y_one_hot,
                      const QtttParams& params, const NoiseSpec* noise) {
  if (y_one_hot.size() != static_cast<std::size_t>(params.arch().n_classes)) {
    throw InvalidArgument("label length differs from the class count");
  }
  class_of(y_one_hot);
  return main_task_loss_from(class_fidelities(x, params, noise), params.segment(Segment::Alpha),
                             y_one_hot, params.arch().n_qubits);
}

LossBreakdown total_loss(std::span<const double> x, std::span<const double> y_one_hot,
                         const QtttParams& params, const NoiseSpec* noise) {
  const auto& layout = params.layout();
  return combine_losses(main_task_loss(x, y_one_hot, params, noise), qae_loss(x, params, noise),
                        params[layout.log_sigma_mt()], params[layout.log_sigma_ae()]);
}

int predict(std::span<const double> x, const QtttParams& params, const NoiseSpec* noise) {
  const auto& arch = params.arch();
  return argmax_lowest(class_scores(class_fidelities(x, params, noise),
                                    params.segment(Segment::Alpha), arch.n_classes,
                                    arch.n_qubits));
}

}  // namespace qttt
