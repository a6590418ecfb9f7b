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

// Dense-matrix reference simulator. Every gate is expanded to a full
// 2^n x 2^n unitary and states/densities are plain Eigen objects, so nothing
// here shares code with the stride-based library simulator.

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "qttt/statevec.hpp"

namespace oracle {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline Mat u3(double theta, double phi, double lambda) {
  const cd i(0.0, 1.0);
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  Mat m(2, 2);
  m << c * std::exp(-i * (phi + lambda) / 2.0), -s * std::exp(-i * (phi - lambda) / 2.0),
      s * std::exp(i * (phi - lambda) / 2.0), c * std::exp(i * (phi + lambda) / 2.0);
  return m;
}

inline Mat rx(double a) {
  const cd i(0.0, 1.0);
  Mat m(2, 2);
  m << std::cos(a / 2), -i * std::sin(a / 2), -i * std::sin(a / 2), std::cos(a / 2);
  return m;
}

inline Mat ry(double a) {
  Mat m(2, 2);
  m << std::cos(a / 2), -std::sin(a / 2), std::sin(a / 2), std::cos(a / 2);
  return m;
}

inline Mat rz(double a) {
  const cd i(0.0, 1.0);
  Mat m = Mat::Zero(2, 2);
  m(0, 0) = std::exp(-i * a / 2.0);
  m(1, 1) = std::exp(i * a / 2.0);
  return m;
}

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c)
      out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
  return out;
}

/// I (x) ... (x) m (x) ... (x) I with qubit 0 leftmost.
inline Mat embed(const Mat& m, int q, int n) {
  Mat out = Mat::Identity(1, 1);
  for (int k = 0; k < n; ++k) out = kron(out, k == q ? m : Mat::Identity(2, 2));
  return out;
}

inline int bit(std::size_t index, int q, int n) { return static_cast<int>((index >> (n - 1 - q)) & 1U); }

inline Mat permutation(int n, auto map) {
  const std::size_t dim = std::size_t{1} << n;
  Mat p = Mat::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < dim; ++i) p(static_cast<Eigen::Index>(map(i)), static_cast<Eigen::Index>(i)) = 1.0;
  return p;
}

inline Mat cnot(int control, int target, int n) {
  return permutation(n, [=](std::size_t i) {
    return bit(i, control, n) ? i ^ (std::size_t{1} << (n - 1 - target)) : i;
  });
}

inline Mat swap(int a, int b, int n) {
  return permutation(n, [=](std::size_t i) {
    const int ba = bit(i, a, n), bb = bit(i, b, n);
    if (ba == bb) return i;
    return i ^ (std::size_t{1} << (n - 1 - a)) ^ (std::size_t{1} << (n - 1 - b));
  });
}

inline Mat gate_matrix(const qttt::GateOp& g, int n) {
  using qttt::GateKind;
  switch (g.kind) {
    case GateKind::U3: return embed(u3(g.angles[0], g.angles[1], g.angles[2]), g.qubits[0], n);
    case GateKind::RX: return embed(rx(g.angles[0]), g.qubits[0], n);
    case GateKind::RY: return embed(ry(g.angles[0]), g.qubits[0], n);
    case GateKind::RZ: return embed(rz(g.angles[0]), g.qubits[0], n);
    case GateKind::CNOT: return cnot(g.qubits[0], g.qubits[1], n);
    case GateKind::SWAP: return swap(g.qubits[0], g.qubits[1], n);
  }
  return Mat::Identity(1, 1);
}

inline Mat unitary(const std::vector<qttt::GateOp>& gates, int n) {
  Mat u = Mat::Identity(Eigen::Index{1} << n, Eigen::Index{1} << n);
  for (const auto& g : gates) u = gate_matrix(g, n) * u;
  return u;
}

inline Vec to_vec(const qttt::StateVector& s) {
  Vec v(static_cast<Eigen::Index>(s.dim()));
  for (std::size_t i = 0; i < s.dim(); ++i) v(static_cast<Eigen::Index>(i)) = s[i];
  return v;
}

inline Vec basis0(int n) {
  Vec v = Vec::Zero(Eigen::Index{1} << n);
  v(0) = 1.0;
  return v;
}

/// Zero-padded, normalized feature vector on n data qubits followed by `aux`
/// qubits in |0>.
inline Vec encode(const std::vector<double>& x, int n, int aux = 0) {
  Vec data = Vec::Zero(Eigen::Index{1} << n);
  double norm = 0.0;
  for (double v : x) norm += v * v;
  norm = std::sqrt(norm);
  for (std::size_t i = 0; i < x.size(); ++i) data(static_cast<Eigen::Index>(i)) = x[i] / norm;
  Vec out = data;
  for (int a = 0; a < aux; ++a) {
    Vec next = Vec::Zero(out.size() * 2);
    for (Eigen::Index i = 0; i < out.size(); ++i) next(2 * i) = out(i);
    out = next;
  }
  return out;
}

/// Reduced density on `keep` (in the given order, first = most significant),
/// computed as sum_k (I (x) <k|) rho (I (x) |k>) over the traced basis.
inline Mat reduce(const Vec& psi, const std::vector<int>& keep, int n) {
  const std::size_t dim = std::size_t{1} << n;
  const auto kd = static_cast<Eigen::Index>(std::size_t{1} << keep.size());
  Mat rho = psi * psi.adjoint();
  Mat out = Mat::Zero(kd, kd);
  auto kept_index = [&](std::size_t i) {
    std::size_t k = 0;
    for (int q : keep) k = (k << 1) | static_cast<std::size_t>(bit(i, q, n));
    return k;
  };
  auto rest_index = [&](std::size_t i) {
    std::size_t r = 0;
    for (int q = 0; q < n; ++q) {
      bool kept = false;
      for (int k : keep) kept = kept || k == q;
      if (!kept) r = (r << 1) | static_cast<std::size_t>(bit(i, q, n));
    }
    return r;
  };
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j)
      if (rest_index(i) == rest_index(j))
        out(static_cast<Eigen::Index>(kept_index(i)), static_cast<Eigen::Index>(kept_index(j))) +=
            rho(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return out;
}

inline Mat bloch(double x, double y, double z) {
  const cd i(0.0, 1.0);
  Mat m(2, 2);
  m << (1.0 + z) / 2.0, (x - i * y) / 2.0, (x + i * y) / 2.0, (1.0 - z) / 2.0;
  return m;
}

inline double trace_product(const Mat& a, const Mat& b) { return (a * b).trace().real(); }

}  // namespace oracle
