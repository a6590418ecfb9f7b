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

// Acceptance run: one PASS/FAIL line per headline criterion.
//
//   qttt_acceptance [--out DIR] [--only NAME]...
//
// Trained models are cached under DIR/models, so repeated runs only pay for
// evaluation.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qttt/circuits.hpp"
#include "qttt/grad.hpp"
#include "qttt/harness.hpp"
#include "qttt/params.hpp"
#include "qttt/statevec.hpp"

using namespace qttt;
using nlohmann::json;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? std::nan("") : s / static_cast<double>(v.size());
}

// --- shared experiment grids --------------------------------------------------

const std::vector<double> kNoiseLevels{4 * std::numbers::pi / 40, 8 * std::numbers::pi / 40,
                                       12 * std::numbers::pi / 40};

json noise_grid() {
  return {{"datasets",
           {{{"family", "linearly-separable"}, {"d_x", 5}}, {{"family", "hidden-manifold"}, {"d_x", 5}}}},
          {"seeds", {0, 1, 2}},
          {"sweep", {{"epsilons", kNoiseLevels}}}};
}

std::vector<MetricsRow> g_sweep_rows;  // every sweep row, for the descent contract

class Acceptance {
 public:
  explicit Acceptance(std::filesystem::path out) { opts_.out_dir = std::move(out); }

  const SweepOutput& noise_sweep() {
    if (!noise_) {
      noise_ = cmd_sweep(ExperimentConfig::from_json(noise_grid()), opts_);
      g_sweep_rows.insert(g_sweep_rows.end(), noise_->rows.begin(), noise_->rows.end());
    }
    return *noise_;
  }

  const SweepOutput& corruption_sweep() {
    if (!corruption_) {
      const json j{{"datasets", {{{"family", "linearly-separable"}, {"d_x", 5}}}},
                   {"seeds", {0, 1, 2}},
                   {"sweep",
                    {{"corruption", {{"kind", "gaussian"}, {"levels", {0.0, 0.3, 0.6}}}},
                     {"variants", {"baseline-no-ttt", "qttt-batch"}}}}};
      corruption_ = cmd_sweep(ExperimentConfig::from_json(j), opts_);
      g_sweep_rows.insert(g_sweep_rows.end(), corruption_->rows.begin(), corruption_->rows.end());
    }
    return *corruption_;
  }

  const SweepOutput& ablation() {
    if (!ablation_) {
      ablation_ = cmd_ablation(ExperimentConfig::from_json(noise_grid()), opts_);
      g_sweep_rows.insert(g_sweep_rows.end(), ablation_->rows.begin(), ablation_->rows.end());
    }
    return *ablation_;
  }

  const RunOptions& options() const { return opts_; }

 private:
  RunOptions opts_;
  std::optional<SweepOutput> noise_;
  std::optional<SweepOutput> corruption_;
  std::optional<SweepOutput> ablation_;
};

std::map<std::string, std::vector<double>> accuracy_by(const std::vector<MetricsRow>& rows,
                                                       const std::function<bool(const MetricsRow&)>& keep) {
  std::map<std::string, std::vector<double>> out;
  for (const auto& r : rows)
    if (keep(r)) out[r.variant].push_back(r.accuracy);
  return out;
}

// --- criteria -----------------------------------------------------------------

Outcome simulator() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
  double worst_norm = 0.0, worst_roundtrip = 0.0;

  auto random_gate = [&](int n) {
    std::uniform_int_distribution<int> pick_q(0, n - 1), pick_kind(0, 5);
    const int a = pick_q(rng);
    int b = pick_q(rng);
    while (n > 1 && b == a) b = pick_q(rng);
    switch (n > 1 ? pick_kind(rng) : pick_kind(rng) % 4) {
      case 0: return GateOp::u3(a, angle(rng), angle(rng), angle(rng));
      case 1: return GateOp::rx(a, angle(rng));
      case 2: return GateOp::ry(a, angle(rng));
      case 3: return GateOp::rz(a, angle(rng));
      case 4: return GateOp::cnot(a, b);
      default: return GateOp::swap(a, b);
    }
  };

  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + trial % 6;
    StateVector s(n);
    s.apply(GateOp::ry(0, angle(rng)));
    for (int g = 0; g < 100; ++g) {
      const GateOp op = random_gate(n);
      const StateVector before = s;
      s.apply(op);
      worst_norm = std::max(worst_norm, std::abs(s.norm() - 1.0));
      const StateVector back = apply_gate(s, inverse(op));
      for (std::size_t i = 0; i < s.dim(); ++i)
        worst_roundtrip = std::max(worst_roundtrip, std::abs(back[i] - before[i]));
    }
  }

  // Oracle cases with closed-form answers.
  std::vector<std::string> failures;
  auto check = [&](bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  };
  const std::vector<int> k0{0};
  const auto prod = partial_trace(StateVector::basis(2, 0b01), k0);
  check(std::abs(prod.at(0, 0) - 1.0) < 1e-12 && std::abs(prod.at(1, 1)) < 1e-12, "product marginal");
  const double h = 1.0 / std::sqrt(2.0);
  const auto bell = StateVector::from_amplitudes(2, {h, 0.0, 0.0, h});
  const auto mb = partial_trace(bell, k0);
  check(std::abs(mb.at(0, 0) - 0.5) < 1e-12 && std::abs(mb.at(1, 1) - 0.5) < 1e-12 &&
            std::abs(mb.at(0, 1)) < 1e-12,
        "bell marginal");
  check(fidelity_pure(StateVector::basis(1, 0), StateVector::basis(1, 1)) < 1e-12, "orthogonal");
  check(std::abs(fidelity_pure(StateVector::basis(1, 0), StateVector::from_amplitudes(1, {h, h})) - 0.5) < 1e-12,
        "|<0|+>|^2");
  check(std::abs(fidelity_mixed(ReducedDensity::from_bloch(0, 0, 0), ReducedDensity::from_bloch(0, 0, 1)) - 0.5) <
            1e-12,
        "mixed vs pure");
  check(fidelity_mixed(ReducedDensity::from_bloch(0, 0, 1), ReducedDensity::from_bloch(0, 0, -1)) < 1e-12,
        "diag orthogonal");

  // Full-keep trace and the pure-state consistency on random states.
  double worst_outer = 0.0, worst_consistency = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 4;
    StateVector a(n), b(n);
    for (int g = 0; g < 20; ++g) {
      a.apply(random_gate(n));
      b.apply(random_gate(n));
    }
    std::vector<int> all(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q) all[static_cast<std::size_t>(q)] = q;
    const auto rho = partial_trace(a, all);
    for (std::size_t r = 0; r < a.dim(); ++r)
      for (std::size_t c = 0; c < a.dim(); ++c)
        worst_outer = std::max(worst_outer, std::abs(rho.at(r, c) - a[r] * std::conj(a[c])));
    const double tp = trace_product(rho, partial_trace(b, all));
    worst_consistency = std::max(worst_consistency, std::abs(tp - fidelity_pure(a, b)));
  }
  check(worst_outer < 1e-12, "keep-all outer product");
  check(worst_consistency < 1e-10, "Tr[rho sigma] = |<a|b>|^2");

  Outcome o;
  o.pass = worst_norm < 1e-10 && worst_roundtrip < 1e-10 && failures.empty();
  o.detail = "max norm drift " + fmt(worst_norm, 3) + ", max round-trip error " + fmt(worst_roundtrip, 3) +
             ", oracle failures " + std::to_string(failures.size());
  for (const auto& f : failures) o.detail += " [" + f + "]";
  return o;
}

Outcome gradients() {
  const auto arch = ArchitectureConfig::for_features(5);  // N_q = 3, L = 4
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const LossKind kinds[] = {LossKind::Total, LossKind::MainTask, LossKind::AutoEncoder};
  std::size_t pairs = 0;
  double worst = 0.0;
  for (int inst = 0; inst < 12; ++inst) {
    QtttParams p = QtttParams::initial(arch, 100 + static_cast<std::uint64_t>(inst));
    for (auto& v : p.values()) v += 0.5 * u(rng);
    std::vector<double> x(5);
    for (auto& v : x) v = u(rng);
    const std::vector<double> y = inst % 2 == 0 ? std::vector<double>{1, 0} : std::vector<double>{0, 1};
    const LossKind kind = kinds[inst % 3];
    const Datum d{x, kind == LossKind::AutoEncoder ? std::span<const double>{} : std::span<const double>(y)};
    const NoiseSpec noise = realize_noise(arch, 0.5, static_cast<std::uint64_t>(inst));
    const NoiseSpec* np = inst % 4 >= 2 ? &noise : nullptr;
    const auto ps = grad_parameter_shift(kind, d, p, np, kCircuitSegments);
    const auto fd = grad_finite_difference(kind, d, p, np, kCircuitSegments);
    for (std::size_t i = 0; i < ps.values.size(); ++i) {
      const double a = ps.values[i], b = fd.values[i];
      if (a == 0.0 && b == 0.0) continue;  // segment not in this loss
      worst = std::max(worst, std::abs(a - b) / std::max(std::abs(b), 1e-3));
      ++pairs;
    }
  }
  return {pairs >= 200 && worst < 1e-5,
          std::to_string(pairs) + " (parameter, instance) pairs, max relative error " + fmt(worst, 3)};
}

Outcome theorem(const Acceptance& acc) {
  const json j{{"datasets",
                {{{"family", "linearly-separable"}, {"d_x", 5}}, {{"family", "hidden-manifold"}, {"d_x", 5}}}},
               {"seeds", {0, 1, 2}},
               {"theorem", {{"train_epochs", 5}, {"probes_per_model", 40}}}};
  const auto out = cmd_theorem(ExperimentConfig::from_json(j), acc.options());
  return {out.aligned >= 100 && out.descent_rate >= 0.95 && out.match_rate == 1.0,
          std::to_string(out.aligned) + "/" + std::to_string(out.probes.size()) +
              " aligned probes, descent " + fmt(100 * out.descent_rate) + "%, estimate within 5% on " +
              fmt(100 * out.match_rate) + "%"};
}

Outcome noise_trend(Acceptance& acc) {
  const auto& rows = acc.noise_sweep().rows;
  const double top = kNoiseLevels.back();
  auto at_top = accuracy_by(rows, [&](const MetricsRow& r) { return std::abs(r.epsilon - top) < 1e-12; });
  auto all = accuracy_by(rows, [](const MetricsRow&) { return true; });
  const double base = mean(at_top["baseline-no-ttt"]);
  const double batch = mean(at_top["qttt-batch"]);
  const double batch_all = mean(all["qttt-batch"]);
  const double online_all = mean(all["qttt-online"]);
  const bool gain = batch >= base + 2.5;
  const bool order = batch_all >= online_all;
  return {gain && order,
          "12pi/40: baseline " + fmt(base) + ", batch " + fmt(batch) + (gain ? " (gain ok)" : " (gain < 2.5)") +
              "; sweep mean: baseline " + fmt(mean(all["baseline-no-ttt"])) + ", batch " + fmt(batch_all) +
              ", online " + fmt(online_all) + (order ? "" : " (online > batch)")};
}

Outcome corruption(Acceptance& acc) {
  const auto& rows = acc.corruption_sweep().rows;
  auto at = [&](double level) {
    return accuracy_by(rows, [&](const MetricsRow& r) { return std::abs(r.corruption_level - level) < 1e-12; });
  };
  auto clean = at(0.0), heavy = at(0.6), mid = at(0.3);
  const double drop_base = mean(clean["baseline-no-ttt"]) - mean(heavy["baseline-no-ttt"]);
  const double drop_batch = mean(clean["qttt-batch"]) - mean(heavy["qttt-batch"]);
  return {drop_batch < drop_base,
          "baseline " + fmt(mean(clean["baseline-no-ttt"])) + " / " + fmt(mean(mid["baseline-no-ttt"])) + " / " +
              fmt(mean(heavy["baseline-no-ttt"])) + ", batch " + fmt(mean(clean["qttt-batch"])) + " / " +
              fmt(mean(mid["qttt-batch"])) + " / " + fmt(mean(heavy["qttt-batch"])) + "; drop baseline " +
              fmt(drop_base) + " vs batch " + fmt(drop_batch)};
}

Outcome descent(Acceptance& acc) {
  acc.noise_sweep();
  acc.corruption_sweep();
  acc.ablation();
  std::size_t runs = 0, violations = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& r : g_sweep_rows) {
    if (r.variant == "baseline-no-ttt" || r.variant == "ablation-no-ttt") continue;
    ++runs;
    worst = std::max(worst, r.ae_after - r.ae_before);
    if (r.ae_after > r.ae_before + 1e-9) ++violations;
  }
  return {runs > 0 && violations == 0, std::to_string(runs) + " adapted runs, " + std::to_string(violations) +
                                           " increases, max (after - before) " + fmt(worst, 3)};
}

Outcome complexity(const Acceptance& acc) {
  const auto out = cmd_complexity(ExperimentConfig::from_json(json::object()), acc.options());
  bool pass = out.reports.size() == 3;
  std::string detail;
  for (std::size_t i = 0; i < out.reports.size(); ++i) {
    const auto& r = out.reports[i];
    const double q = r.measured_ratio / r.asymptotic_ratio;
    pass = pass && q >= 0.5 && q <= 2.0;
    if (i > 0) pass = pass && r.measured_ratio < out.reports[i - 1].measured_ratio;
    detail += "L_M=" + std::to_string(r.layers_main) + ": measured " + fmt(r.measured_ratio) + " vs " +
              fmt(r.asymptotic_ratio) + " (x" + fmt(q, 3) + ")" + (i + 1 < out.reports.size() ? "; " : "");
  }
  return {pass, detail};
}

Outcome ablation(Acceptance& acc) {
  const auto& rows = acc.ablation().rows;
  auto all = accuracy_by(rows, [](const MetricsRow&) { return true; });
  std::set<std::string> seen;
  for (const auto& r : rows) seen.insert(r.variant);
  bool pass = seen.size() == kAblationVariants.size() && rows.size() == 2 * 3 * kNoiseLevels.size() * 8;
  const double batch = mean(all["qttt-batch"]);
  std::string detail = std::to_string(seen.size()) + " variants, " + std::to_string(rows.size()) + " rows;";
  for (const auto& v : kAblationVariants) detail += " " + v + " " + fmt(mean(all[v]));
  for (const char* v : {"ablation-no-ttt", "ablation-no-linear", "ablation-no-reuploading"}) {
    if (!(batch >= mean(all[v]))) {
      pass = false;
      detail += " (batch < " + std::string(v) + ")";
    }
  }
  return {pass, detail};
}

}  // namespace

int main(int argc, char** argv) {
  std::filesystem::path out = std::filesystem::temp_directory_path() / "qttt_acceptance";
  std::set<std::string> only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--out" && i + 1 < argc) {
      out = argv[++i];
    } else if (a == "--only" && i + 1 < argc) {
      only.insert(argv[++i]);
    } else {
      std::cerr << "usage: qttt_acceptance [--out DIR] [--only NAME]...\n";
      return 2;
    }
  }

  Acceptance acc(out);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"simulator", [] { return simulator(); }},
      {"gradient", [] { return gradients(); }},
      {"complexity", [&] { return complexity(acc); }},
      {"theorem", [&] { return theorem(acc); }},
      {"noise-trend", [&] { return noise_trend(acc); }},
      {"corruption-trend", [&] { return corruption(acc); }},
      {"ablation", [&] { return ablation(acc); }},
      {"ttt-descent", [&] { return descent(acc); }},
  };

  int failures = 0;
  for (const auto& [name, run] : criteria) {
    if (!only.empty() && !only.count(name)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
