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

#include "qttt/statevec.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qttt/errors.hpp"

namespace qttt {
namespace {

constexpr double kNormTolerance = 1e-10;

std::array<Complex, 4> rotation_matrix(GateKind kind, const std::array<double, 3>& a) {
  using namespace std::complex_literals;
  switch (kind) {
    case GateKind::RX: {
      const double c = std::cos(a[0] / 2), s = std::sin(a[0] / 2);
      return {Complex{c, 0}, Complex{0, -s}, Complex{0, -s}, Complex{c, 0}};
    }
    case GateKind::RY: {
      const double c = std::cos(a[0] / 2), s = std::sin(a[0] / 2);
      return {Complex{c, 0}, Complex{-s, 0}, Complex{s, 0}, Complex{c, 0}};
    }
    case GateKind::RZ: {
      const Complex e = std::polar(1.0, -a[0] / 2);
      return {e, Complex{0, 0}, Complex{0, 0}, std::conj(e)};
    }
    case GateKind::U3: {
      // RZ(phi) RY(theta) RZ(lambda)
      const double c = std::cos(a[0] / 2), s = std::sin(a[0] / 2);
      const double sum = (a[1] + a[2]) / 2, diff = (a[1] - a[2]) / 2;
      return {c * std::polar(1.0, -sum), -s * std::polar(1.0, -diff),
              s * std::polar(1.0, diff), c * std::polar(1.0, sum)};
    }
    default:
      throw InvalidArgument("rotation_matrix: not a single-qubit gate");
  }
}

}  // namespace

std::string_view to_string(GateKind kind) {
  switch (kind) {
    case GateKind::U3: return "U3";
    case GateKind::RX: return "RX";
    case GateKind::RY: return "RY";
    case GateKind::RZ: return "RZ";
    case GateKind::CNOT: return "CNOT";
    case GateKind::SWAP: return "SWAP";
  }
  return "?";
}

GateOp GateOp::u3(int q, double theta, double phi, double lambda) {
  return GateOp{GateKind::U3, {q, -1}, {theta, phi, lambda}};
}
GateOp GateOp::rx(int q, double angle) { return GateOp{GateKind::RX, {q, -1}, {angle, 0, 0}}; }
GateOp GateOp::ry(int q, double angle) { return GateOp{GateKind::RY, {q, -1}, {angle, 0, 0}}; }
GateOp GateOp::rz(int q, double angle) { return GateOp{GateKind::RZ, {q, -1}, {angle, 0, 0}}; }
GateOp GateOp::cnot(int control, int target) {
  return GateOp{GateKind::CNOT, {control, target}, {0, 0, 0}};
}
GateOp GateOp::swap(int a, int b) { return GateOp{GateKind::SWAP, {a, b}, {0, 0, 0}}; }

int GateOp::angle_count() const noexcept {
  switch (kind) {
    case GateKind::U3: return 3;
    case GateKind::RX:
    case GateKind::RY:
    case GateKind::RZ: return 1;
    default: return 0;
  }
}

GateOp inverse(const GateOp& g) {
  GateOp inv = g;
  switch (g.kind) {
    case GateKind::U3:
      // (RZ(p) RY(t) RZ(l))^-1 = RZ(-l) RY(-t) RZ(-p)
      inv.angles = {-g.angles[0], -g.angles[2], -g.angles[1]};
      break;
    case GateKind::RX:
    case GateKind::RY:
    case GateKind::RZ:
      inv.angles[0] = -g.angles[0];
      break;
    default:
      break;
  }
  return inv;
}

StateVector::StateVector(int n_qubits) : n_qubits_(n_qubits) {
  if (n_qubits < 1 || n_qubits > 30) {
    throw InvalidArgument("StateVector: qubit count must be in [1, 30], got " +
                          std::to_string(n_qubits));
  }
  amps_.assign(std::size_t{1} << n_qubits, Complex{0, 0});
  amps_[0] = 1.0;
}

StateVector StateVector::from_amplitudes(int n_qubits, std::vector<Complex> amps) {
  if (n_qubits < 1 || n_qubits > 30 || amps.size() != (std::size_t{1} << n_qubits)) {
    throw InvalidArgument("StateVector: amplitude count must be 2^n_qubits");
  }
  StateVector s(n_qubits, std::move(amps));
  if (std::abs(s.norm() - 1.0) > kNormTolerance) {
    throw InvalidArgument("StateVector: amplitudes are not normalized");
  }
  return s;
}

StateVector StateVector::basis(int n_qubits, std::size_t index) {
  StateVector s(n_qubits);
  if (index >= s.dim()) throw InvalidArgument("StateVector::basis: index out of range");
  s.amps_[0] = 0.0;
  s.amps_[index] = 1.0;
  return s;
}

double StateVector::norm() const noexcept {
  double acc = 0.0;
  for (const auto& a : amps_) acc += std::norm(a);
  return std::sqrt(acc);
}

void StateVector::apply(const GateOp& g) {
  auto check = [&](int q) {
    if (q < 0 || q >= n_qubits_) {
      throw InvalidArgument("gate " + std::string(to_string(g.kind)) + ": qubit index " +
                            std::to_string(q) + " out of range for " +
                            std::to_string(n_qubits_) + " qubits");
    }
  };
  check(g.qubits[0]);
  if (g.arity() == 2) {
    check(g.qubits[1]);
    if (g.qubits[0] == g.qubits[1]) {
      throw InvalidArgument("gate " + std::string(to_string(g.kind)) +
                            ": duplicate qubit index " + std::to_string(g.qubits[0]));
    }
  }
  switch (g.kind) {
    case GateKind::CNOT: apply_cnot(g.qubits[0], g.qubits[1]); break;
    case GateKind::SWAP: apply_swap(g.qubits[0], g.qubits[1]); break;
    default: apply_single(g.qubits[0], rotation_matrix(g.kind, g.angles)); break;
  }
}

void StateVector::apply_single(int q, const std::array<Complex, 4>& m) {
  const std::size_t stride = std::size_t{1} << (n_qubits_ - 1 - q);
  const std::size_t n = amps_.size();
  for (std::size_t base = 0; base < n; base += 2 * stride) {
    for (std::size_t k = base; k < base + stride; ++k) {
      const Complex a0 = amps_[k];
      const Complex a1 = amps_[k + stride];
      amps_[k] = m[0] * a0 + m[1] * a1;
      amps_[k + stride] = m[2] * a0 + m[3] * a1;
    }
  }
}

void StateVector::apply_cnot(int control, int target) {
  const std::size_t cbit = std::size_t{1} << (n_qubits_ - 1 - control);
  const std::size_t tbit = std::size_t{1} << (n_qubits_ - 1 - target);
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    if ((i & cbit) && !(i & tbit)) std::swap(amps_[i], amps_[i | tbit]);
  }
}

void StateVector::apply_swap(int a, int b) {
  const std::size_t abit = std::size_t{1} << (n_qubits_ - 1 - a);
  const std::size_t bbit = std::size_t{1} << (n_qubits_ - 1 - b);
  for (std::size_t i = 0; i < amps_.size(); ++i) {
    if ((i & abit) && !(i & bbit)) std::swap(amps_[i], amps_[(i & ~abit) | bbit]);
  }
}

StateVector StateVector::with_ancillas(int extra) const {
  if (extra < 0) throw InvalidArgument("with_ancillas: negative qubit count");
  if (extra == 0) return *this;
  std::vector<Complex> out(amps_.size() << extra, Complex{0, 0});
  for (std::size_t i = 0; i < amps_.size(); ++i) out[i << extra] = amps_[i];
  return StateVector(n_qubits_ + extra, std::move(out));
}

StateVector apply_gate(StateVector state, const GateOp& g) {
  state.apply(g);
  return state;
}

std::vector<GateOp> ladder_entangler(std::span<const int> qubits) {
  if (qubits.size() < 2) {
    throw InvalidArgument("ladder entangler needs at least 2 qubits");
  }
  std::vector<GateOp> gates;
  gates.reserve(qubits.size());
  for (std::size_t i = 0; i + 1 < qubits.size(); ++i) {
    gates.push_back(GateOp::cnot(qubits[i], qubits[i + 1]));
  }
  gates.push_back(GateOp::cnot(qubits.back(), qubits.front()));
  return gates;
}

StateVector apply_ladder_entangler(StateVector state, std::span<const int> qubits) {
  for (const auto& g : ladder_entangler(qubits)) state.apply(g);
  return state;
}

StateVector amplitude_encode(std::span<const double> x, int n_qubits) {
  StateVector s(n_qubits);
  if (x.size() > s.dim()) {
    throw InvalidArgument("amplitude_encode: " + std::to_string(x.size()) +
                          " features do not fit in " + std::to_string(n_qubits) + " qubits");
  }
  double sq = 0.0;
  for (double v : x) sq += v * v;
  if (!(sq > 0.0)) {
    throw DegenerateInput("amplitude_encode: cannot encode an all-zero feature vector");
  }
  if (!std::isfinite(sq)) throw InvalidArgument("amplitude_encode: non-finite feature");
  const double inv = 1.0 / std::sqrt(sq);
  std::vector<Complex> amps(s.dim(), Complex{0, 0});
  for (std::size_t i = 0; i < x.size(); ++i) amps[i] = x[i] * inv;
  return StateVector::from_amplitudes(n_qubits, std::move(amps));
}

ReducedDensity ReducedDensity::pure(const StateVector& s) {
  ReducedDensity r{s.n_qubits(), std::vector<Complex>(s.dim() * s.dim())};
  const auto a = s.amplitudes();
  for (std::size_t i = 0; i < s.dim(); ++i) {
    for (std::size_t j = 0; j < s.dim(); ++j) r.at(i, j) = a[i] * std::conj(a[j]);
  }
  return r;
}

ReducedDensity ReducedDensity::from_bloch(double x, double y, double z) {
  if (x * x + y * y + z * z > 1.0 + 1e-12) {
    throw InvalidArgument("from_bloch: Bloch vector longer than 1");
  }
  return ReducedDensity{1,
                        {Complex{(1 + z) / 2, 0}, Complex{x / 2, -y / 2},
                         Complex{x / 2, y / 2}, Complex{(1 - z) / 2, 0}}};
}

ReducedDensity partial_trace(const StateVector& state, std::span<const int> keep) {
  if (keep.empty()) throw InvalidArgument("partial_trace: keep list is empty");
  const int n = state.n_qubits();
  std::vector<bool> kept(n, false);
  for (int q : keep) {
    if (q < 0 || q >= n) throw InvalidArgument("partial_trace: qubit index out of range");
    if (kept[q]) throw InvalidArgument("partial_trace: duplicate qubit index");
    kept[q] = true;
  }
  std::vector<int> rest;
  for (int q = 0; q < n; ++q) {
    if (!kept[q]) rest.push_back(q);
  }

  const int k = static_cast<int>(keep.size());
  const std::size_t kdim = std::size_t{1} << k;
  const std::size_t edim = std::size_t{1} << rest.size();
  auto full_index = [&](std::size_t r, std::size_t e) {
    std::size_t idx = 0;
    for (int i = 0; i < k; ++i) {
      if ((r >> (k - 1 - i)) & 1U) idx |= std::size_t{1} << (n - 1 - keep[i]);
    }
    const int m = static_cast<int>(rest.size());
    for (int i = 0; i < m; ++i) {
      if ((e >> (m - 1 - i)) & 1U) idx |= std::size_t{1} << (n - 1 - rest[i]);
    }
    return idx;
  };

  ReducedDensity out{k, std::vector<Complex>(kdim * kdim, Complex{0, 0})};
  std::vector<Complex> column(kdim);
  const auto amps = state.amplitudes();
  for (std::size_t e = 0; e < edim; ++e) {
    for (std::size_t r = 0; r < kdim; ++r) column[r] = amps[full_index(r, e)];
    for (std::size_t r = 0; r < kdim; ++r) {
      if (column[r] == Complex{0, 0}) continue;
      for (std::size_t c = 0; c < kdim; ++c) out.at(r, c) += column[r] * std::conj(column[c]);
    }
  }
  return out;
}

double fidelity_pure(const StateVector& a, const StateVector& b) {
  if (a.n_qubits() != b.n_qubits()) {
    throw InvalidArgument("fidelity_pure: qubit counts differ");
  }
  Complex ip{0, 0};
  for (std::size_t i = 0; i < a.dim(); ++i) ip += std::conj(a[i]) * b[i];
  return std::clamp(std::norm(ip), 0.0, 1.0);
}

double trace_product(const ReducedDensity& rho, const ReducedDensity& sigma) {
  if (rho.n_qubits != sigma.n_qubits) {
    throw InvalidArgument("trace_product: dimensions differ");
  }
  const std::size_t d = rho.dim();
  double acc = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) acc += (rho.at(i, j) * sigma.at(j, i)).real();
  }
  return acc;
}

double fidelity_mixed(const ReducedDensity& rho, const ReducedDensity& sigma) {
  return std::clamp(trace_product(rho, sigma), 0.0, 1.0);
}

double expectation(const ReducedDensity& rho, const StateVector& psi) {
  if (rho.n_qubits != psi.n_qubits()) {
    throw InvalidArgument("expectation: dimensions differ");
  }
  const std::size_t d = rho.dim();
  Complex acc{0, 0};
  for (std::size_t i = 0; i < d; ++i) {
    Complex row{0, 0};
    for (std::size_t j = 0; j < d; ++j) row += rho.at(i, j) * psi[j];
    acc += std::conj(psi[i]) * row;
  }
  return acc.real();
}

}  // namespace qttt
