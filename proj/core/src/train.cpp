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

#include "qttt/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>

#include "qttt/errors.hpp"
#include "qttt/model.hpp"
#include "qttt/parallel.hpp"

namespace qttt {

void optimizer_step(std::span<double> params, std::span<const double> grads, AdamState& state,
                    const AdamConfig& config, std::span<const std::uint8_t> update_mask) {
  const std::size_t n = params.size();
  if (grads.size() != n || state.m.size() != n || state.v.size() != n)
    throw InvalidArgument("optimizer_step: size mismatch");
  if (!update_mask.empty() && update_mask.size() != n)
    throw InvalidArgument("optimizer_step: mask size mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(grads[i]))
      throw DivergenceError("non-finite gradient at parameter " + std::to_string(i));
  }

  AdamState next = state;
  std::vector<double> updated(params.begin(), params.end());
  ++next.step;
  const double t = static_cast<double>(next.step);
  const double c1 = 1.0 - std::pow(config.beta1, t);
  const double c2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t i = 0; i < n; ++i) {
    if (!update_mask.empty() && update_mask[i] == 0) continue;
    const double g = grads[i];
    next.m[i] = config.beta1 * next.m[i] + (1.0 - config.beta1) * g;
    next.v[i] = config.beta2 * next.v[i] + (1.0 - config.beta2) * g * g;
    const double m_hat = next.m[i] / c1;
    const double v_hat = next.v[i] / c2;
    updated[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
    if (!std::isfinite(updated[i]))
      throw DivergenceError("non-finite update at parameter " + std::to_string(i));
  }
  std::copy(updated.begin(), updated.end(), params.begin());
  state = std::move(next);
}

std::vector<std::uint8_t> segment_mask(const ParamLayout& layout, SegmentSet segments) {
  std::vector<std::uint8_t> mask(layout.total(), 0);
  for (Segment s : kAllSegments) {
    if (!segments.contains(s)) continue;
    const auto r = layout.range(s);
    std::fill(mask.begin() + static_cast<std::ptrdiff_t>(r.offset),
              mask.begin() + static_cast<std::ptrdiff_t>(r.end()), std::uint8_t{1});
  }
  return mask;
}

NoiseModel NoiseModel::fixed(NoiseSpec spec) {
  NoiseModel m;
  m.specs_.push_back(std::move(spec));
  return m;
}

NoiseModel NoiseModel::per_sample(std::vector<NoiseSpec> specs) {
  NoiseModel m;
  m.specs_ = std::move(specs);
  m.per_sample_ = true;
  return m;
}

const NoiseSpec* NoiseModel::for_sample(std::size_t i) const {
  if (specs_.empty()) return nullptr;
  if (!per_sample_) return &specs_.front();
  if (i >= specs_.size()) throw InvalidArgument("no noise realization for sample " + std::to_string(i));
  return &specs_[i];
}

namespace {

SegmentSet usable(SegmentSet wanted, const ArchitectureConfig& arch) {
  SegmentSet out;
  for (Segment s : kAllSegments) {
    if (!wanted.contains(s)) continue;
    if (s == Segment::Linear && !arch.use_linear) continue;
    out.insert(s);
  }
  return out;
}

// Mean gradient over `rows` of the given loss. Per-sample work is spread over
// threads; the reduction runs in index order so the result does not depend on
// the worker count.
std::vector<double> mean_gradient(LossKind kind, const QtttParams& params, const FeatureMatrix& x,
                                  const std::vector<std::vector<double>>* y,
                                  std::span<const std::size_t> rows, const NoiseModel& noise,
                                  SegmentSet mask) {
  std::vector<std::vector<double>> per(rows.size());
  parallel_for(rows.size(), [&](std::size_t k) {
    const std::size_t i = rows[k];
    Datum d{x.row(i), y ? std::span<const double>((*y)[i]) : std::span<const double>{}};
    per[k] = loss_gradient(kind, d, params, noise.for_sample(i), mask);
  });
  std::vector<double> g(params.values().size(), 0.0);
  for (const auto& p : per)
    for (std::size_t j = 0; j < g.size(); ++j) g[j] += p[j];
  const double inv = rows.empty() ? 0.0 : 1.0 / static_cast<double>(rows.size());
  for (double& v : g) v *= inv;
  return g;
}

struct SetMetrics {
  double l_mt = 0.0;
  double l_ae = 0.0;
  double acc = 0.0;
};

SetMetrics evaluate_set(const QtttParams& params, const FeatureMatrix& x,
                        std::span<const int> labels) {
  const std::size_t n = x.rows();
  std::vector<double> mt(n), ae(n);
  std::vector<int> hit(n);
  const int C = params.arch().n_classes;
  parallel_for(n, [&](std::size_t i) {
    const auto y = one_hot(labels[i], C);
    const auto f = class_fidelities(x.row(i), params);
    mt[i] = main_task_loss_from(f, params.segment(Segment::Alpha), y, params.arch().n_qubits);
    const auto scores = class_scores(f, params.segment(Segment::Alpha), C, params.arch().n_qubits);
    hit[i] = argmax_lowest(scores) == labels[i] ? 1 : 0;
    ae[i] = qae_loss(x.row(i), params);
  });
  SetMetrics m;
  if (n == 0) return m;
  m.l_mt = std::accumulate(mt.begin(), mt.end(), 0.0) / static_cast<double>(n);
  m.l_ae = std::accumulate(ae.begin(), ae.end(), 0.0) / static_cast<double>(n);
  m.acc = 100.0 * std::accumulate(hit.begin(), hit.end(), 0.0) / static_cast<double>(n);
  return m;
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw DivergenceError(std::string("non-finite ") + what);
}

}  // namespace

FitResult fit(const Dataset& dataset, const ArchitectureConfig& arch, const TrainConfig& config) {
  arch.validate();
  if (dataset.d_x != arch.d_x) throw InvalidArgument("dataset d_x does not match architecture");
  if (dataset.n_classes != arch.n_classes)
    throw InvalidArgument("dataset class count does not match architecture");
  if (config.epochs < 0) throw InvalidArgument("epochs must be >= 0");
  if (config.batch_size < 1) throw InvalidArgument("batch_size must be >= 1");

  FitResult result{QtttParams::initial(arch, config.seed), {}};
  QtttParams& params = result.params;
  const auto& layout = params.layout();

  const FeatureMatrix train_x = dataset.train_features();
  const auto train_labels = dataset.labels_of(dataset.train);
  const FeatureMatrix test_x = dataset.test_features();
  const auto test_labels = dataset.labels_of(dataset.test);
  std::vector<std::vector<double>> train_y(train_x.rows());
  for (std::size_t i = 0; i < train_y.size(); ++i) train_y[i] = one_hot(train_labels[i], arch.n_classes);

  struct Phase {
    LossKind kind;
    SegmentSet segments;
  };
  std::vector<Phase> phases;
  if (config.objective == TrainObjective::MultiTask) {
    phases.push_back({LossKind::Total, usable(SegmentSet::all(), arch)});
  } else {
    phases.push_back({LossKind::MainTask,
                      usable(SegmentSet{Segment::Linear, Segment::Encoder, Segment::Main, Segment::Alpha}, arch)});
    phases.push_back({LossKind::AutoEncoder, SegmentSet{Segment::Decoder}});
  }

  std::mt19937_64 rng(config.seed ^ 0x5bd1e995ULL);
  std::vector<std::size_t> order(train_x.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const NoiseModel clean;
  int epoch_counter = 0;

  for (const Phase& phase : phases) {
    AdamState adam = AdamState::zeros(layout.total());
    const auto mask = segment_mask(layout, phase.segments);
    double previous = std::numeric_limits<double>::quiet_NaN();
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
      std::shuffle(order.begin(), order.end(), rng);
      for (std::size_t start = 0; start < order.size();
           start += static_cast<std::size_t>(config.batch_size)) {
        const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
        const std::span<const std::size_t> batch(order.data() + start, stop - start);
        const auto g = mean_gradient(phase.kind, params, train_x, &train_y, batch, clean, phase.segments);
        optimizer_step(params.values(), g, adam, config.adam, mask);
      }

      const SetMetrics tr = evaluate_set(params, train_x, train_labels);
      const SetMetrics te = evaluate_set(params, test_x, test_labels);
      const auto parts = combine_losses(tr.l_mt, tr.l_ae, params[layout.log_sigma_mt()],
                                        params[layout.log_sigma_ae()]);
      require_finite(parts.l_total, "training loss");
      result.history.push_back({++epoch_counter, parts.l_total, tr.l_mt, tr.l_ae, parts.sigma_mt,
                                parts.sigma_ae, tr.acc, te.acc});
      if (config.tolerance > 0.0 && std::isfinite(previous) &&
          std::abs(parts.l_total - previous) < config.tolerance)
        break;
      previous = parts.l_total;
    }
  }
  return result;
}

void write_history_csv(std::ostream& out, std::span<const EpochRecord> history) {
  out << "epoch,l_total,l_mt,l_ae,sigma_mt,sigma_ae,train_acc,test_acc\n";
  const auto old = out.precision(17);
  for (const auto& r : history) {
    out << r.epoch << ',' << r.l_total << ',' << r.l_mt << ',' << r.l_ae << ',' << r.sigma_mt << ','
        << r.sigma_ae << ',' << r.train_acc << ',' << r.test_acc << '\n';
  }
  out.precision(old);
}

std::vector<int> predict_all(const QtttParams& params, const FeatureMatrix& features,
                             const NoiseModel& noise) {
  std::vector<int> out(features.rows());
  parallel_for(features.rows(),
               [&](std::size_t i) { out[i] = predict(features.row(i), params, noise.for_sample(i)); });
  return out;
}

double accuracy(const QtttParams& params, const FeatureMatrix& features,
                std::span<const int> labels, const NoiseModel& noise) {
  if (labels.size() != features.rows()) throw InvalidArgument("accuracy: label count mismatch");
  if (labels.empty()) return 0.0;
  const auto pred = predict_all(params, features, noise);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == labels[i] ? 1 : 0;
  return 100.0 * static_cast<double>(hits) / static_cast<double>(labels.size());
}

double mean_qae_loss(const QtttParams& params, const FeatureMatrix& features,
                     const NoiseModel& noise) {
  if (features.rows() == 0) return 0.0;
  std::vector<double> l(features.rows());
  parallel_for(features.rows(),
               [&](std::size_t i) { l[i] = qae_loss(features.row(i), params, noise.for_sample(i)); });
  return std::accumulate(l.begin(), l.end(), 0.0) / static_cast<double>(l.size());
}

namespace {

void check_ttt_config(const TttConfig& config) {
  if (config.epochs < 0) throw InvalidArgument("ttt epochs must be >= 0");
  if (config.batch_size < 0) throw InvalidArgument("ttt batch_size must be >= 0");
}

// Adapts on the rows `rows` of `x`; the trace is evaluated on the same rows.
TttResult adapt(const QtttParams& trained, const FeatureMatrix& x, std::span<const std::size_t> rows,
                const NoiseModel& noise, const TttConfig& config) {
  check_ttt_config(config);
  const auto segments = usable(kTttSegments, trained.arch());
  const auto mask = segment_mask(trained.layout(), segments);

  auto trace_loss = [&](const QtttParams& p) {
    if (rows.empty()) return 0.0;
    std::vector<double> l(rows.size());
    parallel_for(rows.size(), [&](std::size_t k) {
      l[k] = qae_loss(x.row(rows[k]), p, noise.for_sample(rows[k]));
    });
    return std::accumulate(l.begin(), l.end(), 0.0) / static_cast<double>(rows.size());
  };

  TttResult out{trained, {}, 0.0, 0.0, 0, false};
  QtttParams current = trained;
  AdamState adam = AdamState::zeros(trained.layout().total());
  out.ae_before = trace_loss(trained);
  out.ae_trace.push_back(out.ae_before);
  out.ae_after = out.ae_before;

  std::vector<std::size_t> order(rows.begin(), rows.end());
  std::mt19937_64 rng(0x7777ULL);
  const std::size_t batch = config.batch_size == 0 ? std::max<std::size_t>(order.size(), 1)
                                                   : static_cast<std::size_t>(config.batch_size);

  for (int epoch = 1; epoch <= config.epochs && !rows.empty(); ++epoch) {
    try {
      if (batch < order.size()) std::shuffle(order.begin(), order.end(), rng);
      for (std::size_t start = 0; start < order.size(); start += batch) {
        const std::size_t stop = std::min(order.size(), start + batch);
        const std::span<const std::size_t> b(order.data() + start, stop - start);
        const auto g = mean_gradient(LossKind::AutoEncoder, current, x, nullptr, b, noise, segments);
        optimizer_step(current.values(), g, adam, config.adam, mask);
      }
    } catch (const DivergenceError&) {
      out.reverted = true;
      break;
    }
    const double l = trace_loss(current);
    if (!std::isfinite(l)) {
      out.reverted = true;
      break;
    }
    out.ae_trace.push_back(l);
    if (l < out.ae_after) {
      out.ae_after = l;
      out.params = current;
      out.best_epoch = epoch;
    }
  }
  return out;
}

}  // namespace

TttResult ttt_batch(const QtttParams& trained, const FeatureMatrix& test_features,
                    const NoiseModel& noise, const TttConfig& config) {
  std::vector<std::size_t> rows(test_features.rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return adapt(trained, test_features, rows, noise, config);
}

OnlineResult ttt_online(const QtttParams& trained, const FeatureMatrix& stream,
                        const NoiseModel& noise, const TttConfig& config) {
  check_ttt_config(config);
  OnlineResult out;
  out.predictions.reserve(stream.rows());
  for (std::size_t i = 0; i < stream.rows(); ++i) {
    const std::size_t row[] = {i};
    const TttResult r = adapt(trained, stream, row, noise, config);
    out.predictions.push_back(predict(stream.row(i), r.params, noise.for_sample(i)));
    out.ae_before += r.ae_before;
    out.ae_after += r.ae_after;
    out.reverted += r.reverted ? 1 : 0;
  }
  if (stream.rows() > 0) {
    out.ae_before /= static_cast<double>(stream.rows());
    out.ae_after /= static_cast<double>(stream.rows());
  }
  return out;
}

TheoremProbeReport theorem_probe(const QtttParams& params, std::span<const double> x,
                                 std::span<const double> y_one_hot, const NoiseSpec* noise,
                                 std::span<const double> etas) {
  if (etas.empty()) throw InvalidArgument("theorem_probe: no step sizes");
  for (double eta : etas)
    if (!(eta > 0.0)) throw InvalidArgument("theorem_probe: step sizes must be positive");

  const auto shared = usable(SegmentSet{Segment::Linear, Segment::Encoder}, params.arch());
  const auto g_mt = loss_gradient(LossKind::MainTask, {x, y_one_hot}, params, noise, shared);
  const auto g_ae = loss_gradient(LossKind::AutoEncoder, {x, {}}, params, noise, shared);

  TheoremProbeReport rep;
  for (std::size_t i = 0; i < g_mt.size(); ++i) {
    rep.inner_product += g_mt[i] * g_ae[i];
    rep.norm_mt += g_mt[i] * g_mt[i];
    rep.norm_ae += g_ae[i] * g_ae[i];
  }
  rep.norm_mt = std::sqrt(rep.norm_mt);
  rep.norm_ae = std::sqrt(rep.norm_ae);
  rep.l_mt = main_task_loss(x, y_one_hot, params, noise);

  for (double eta : etas) {
    QtttParams stepped = params;
    auto v = stepped.values();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= eta * g_ae[i];
    const double delta = main_task_loss(x, y_one_hot, stepped, noise) - rep.l_mt;
    rep.steps.push_back({eta, delta, delta / eta});
  }

  std::vector<ProbeStep> sorted = rep.steps;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.eta < b.eta; });
  if (sorted.size() == 1) {
    rep.directional_estimate = sorted.front().slope;
  } else {
    const auto& small = sorted[0];
    const auto& large = sorted[1];
    rep.directional_estimate =
        (large.eta * small.slope - small.eta * large.slope) / (large.eta - small.eta);
  }
  return rep;
}

}  // namespace qttt
