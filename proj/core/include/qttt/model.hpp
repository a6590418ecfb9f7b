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

#include <span>
#include <vector>

#include "qttt/circuits.hpp"
#include "qttt/params.hpp"
#include "qttt/statevec.hpp"

namespace qttt {

/// Single-qubit label states rho_c, one per class.
///
/// Two classes use |0> and |1>. Three to six classes use pure states whose
/// Bloch vectors form a trine, tetrahedron, triangular bipyramid and octahedron.
class LabelStates {
 public:
  static LabelStates for_classes(int n_classes);

  int size() const noexcept { return static_cast<int>(states_.size()); }
  const ReducedDensity& operator[](int c) const { return states_[static_cast<std::size_t>(c)]; }

 private:
  std::vector<ReducedDensity> states_;
};

const LabelStates& label_states(int n_classes);

struct LossBreakdown {
  double l_mt = 0.0;
  double l_ae = 0.0;
  double l_total = 0.0;
  double sigma_mt = 1.0;
  double sigma_ae = 1.0;
};

/// l_mt / (2 sigma_mt^2) + l_ae / (2 sigma_ae^2) + log(sigma_mt sigma_ae), with
/// sigma = exp(log_sigma).
LossBreakdown combine_losses(double l_mt, double l_ae, double log_sigma_mt, double log_sigma_ae);

/// Validates a one-hot row and returns its class index.
int class_of(std::span<const double> one_hot);
std::vector<double> one_hot(int cls, int n_classes);

/// Tr[rho_{x'} rho~] where rho~ is the decoder output reduced to the data register.
double reconstruction_fidelity(const StateVector& decoded, std::span<const double> x_prime,
                               const ArchitectureConfig& arch);

/// C x N_q row-major matrix of Tr[rho_c rho_{y,q}].
std::vector<double> fidelity_matrix(const StateVector& main_output, const ArchitectureConfig& arch);

/// 1/2 sum_c sum_q (alpha_{c,q} f_{c,q} - y_c)^2.
double main_task_loss_from(std::span<const double> fidelities, std::span<const double> alpha,
                           std::span<const double> y_one_hot, int n_qubits);

/// sum_q alpha_{c,q} f_{c,q} for every class.
std::vector<double> class_scores(std::span<const double> fidelities, std::span<const double> alpha,
                                 int n_classes, int n_qubits);

/// argmax with ties going to the lowest index.
int argmax_lowest(std::span<const double> scores);

/// 1 - Tr[rho_{x'} rho~_{x'}] for raw input x.
double qae_loss(std::span<const double> x, const QtttParams& params,
                const NoiseSpec* noise = nullptr);

/// f_{c,q} for raw input x.
std::vector<double> class_fidelities(std::span<const double> x, const QtttParams& params,
                                     const NoiseSpec* noise = nullptr);

double main_task_loss(std::span<const double> x, std::span<const double> y_one_hot,
                      const QtttParams& params, const NoiseSpec* noise = nullptr);

LossBreakdown total_loss(std::span<const double> x, std::span<const double> y_one_hot,
                         const QtttParams& params, const NoiseSpec* noise = nullptr);

int predict(std::span<const double> x, const QtttParams& params,
            const NoiseSpec* noise = nullptr);

}  // namespace qttt
