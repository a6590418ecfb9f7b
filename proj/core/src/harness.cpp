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

#include "qttt/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "qttt/circuits.hpp"
#include "qttt/errors.hpp"
#include "qttt/model.hpp"
#include "qttt/parallel.hpp"

namespace qttt {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kHarnessVersion = 1;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void check_keys(const json& j, std::initializer_list<std::string_view> allowed,
                std::string_view section) {
  if (!j.is_object()) throw ConfigError(std::string(section) + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError(std::string(section) + ": unknown key '" + key + "'");
  }
}

template <class T>
void read_opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void write_file(const fs::path& path, std::string_view body) {
  fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write " + tmp.string());
    f.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!f) throw Error("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

void log_line(const RunOptions& opts, const std::string& line) {
  if (opts.log) *opts.log << line << '\n' << std::flush;
}

bool is_known_variant(std::string_view v) {
  return v == "baseline-no-ttt" ||
         std::find(kAblationVariants.begin(), kAblationVariants.end(), v) != kAblationVariants.end();
}

}  // namespace

std::string DatasetSpec::name() const {
  return std::string(to_string(family)) + "-d" + std::to_string(d_x);
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig c;
  try {
    check_keys(j, {"datasets", "seeds", "architecture", "train", "ttt", "sweep", "ablation", "theorem",
                   "complexity"},
               "config");

    if (j.contains("datasets")) {
      c.datasets.clear();
      for (const auto& d : j.at("datasets")) {
        check_keys(d, {"family", "d_x", "n_samples"}, "datasets[]");
        DatasetSpec s;
        s.family = parse_family(d.at("family").get<std::string>());
        read_opt(d, "d_x", s.d_x);
        read_opt(d, "n_samples", s.n_samples);
        c.datasets.push_back(s);
      }
      if (c.datasets.empty()) throw ConfigError("datasets: at least one entry required");
    }
    read_opt(j, "seeds", c.seeds);
    if (c.seeds.empty()) throw ConfigError("seeds: at least one seed required");

    if (j.contains("architecture")) {
      const auto& a = j.at("architecture");
      check_keys(a, {"n_qubits", "n_trash", "layers_encoder", "layers_decoder", "layers_main",
                     "use_linear", "reuploading"},
                 "architecture");
      if (a.contains("n_qubits")) c.n_qubits = a.at("n_qubits").get<int>();
      read_opt(a, "n_trash", c.n_trash);
      read_opt(a, "layers_encoder", c.layers_encoder);
      read_opt(a, "layers_decoder", c.layers_decoder);
      read_opt(a, "layers_main", c.layers_main);
      read_opt(a, "use_linear", c.use_linear);
      read_opt(a, "reuploading", c.reuploading);
    }

    if (j.contains("train")) {
      const auto& t = j.at("train");
      check_keys(t, {"epochs", "batch_size", "learning_rate", "beta1", "beta2", "epsilon", "tolerance"},
                 "train");
      read_opt(t, "epochs", c.train.epochs);
      read_opt(t, "batch_size", c.train.batch_size);
      read_opt(t, "learning_rate", c.train.adam.learning_rate);
      read_opt(t, "beta1", c.train.adam.beta1);
      read_opt(t, "beta2", c.train.adam.beta2);
      read_opt(t, "epsilon", c.train.adam.epsilon);
      read_opt(t, "tolerance", c.train.tolerance);
    }

    if (j.contains("ttt")) {
      const auto& t = j.at("ttt");
      check_keys(t, {"epochs", "learning_rate", "batch_size", "online_epochs", "beta1", "beta2", "epsilon"},
                 "ttt");
      read_opt(t, "epochs", c.ttt.epochs);
      read_opt(t, "learning_rate", c.ttt.adam.learning_rate);
      read_opt(t, "batch_size", c.ttt.batch_size);
      read_opt(t, "online_epochs", c.online_epochs);
      read_opt(t, "beta1", c.ttt.adam.beta1);
      read_opt(t, "beta2", c.ttt.adam.beta2);
      read_opt(t, "epsilon", c.ttt.adam.epsilon);
    }

    if (j.contains("sweep")) {
      const auto& s = j.at("sweep");
      check_keys(s, {"corruption", "epsilons", "variants"}, "sweep");
      if (s.contains("corruption")) {
        const auto& k = s.at("corruption");
        check_keys(k, {"kind", "levels", "snow_low", "snow_high"}, "sweep.corruption");
        CorruptionSweep cs;
        cs.kind = parse_corruption(k.at("kind").get<std::string>());
        cs.levels = k.at("levels").get<std::vector<double>>();
        read_opt(k, "snow_low", cs.snow_low);
        read_opt(k, "snow_high", cs.snow_high);
        if (cs.levels.empty()) throw ConfigError("sweep.corruption.levels: empty");
        c.corruption = cs;
      }
      read_opt(s, "epsilons", c.epsilons);
      read_opt(s, "variants", c.sweep_variants);
      if (c.epsilons.empty()) throw ConfigError("sweep.epsilons: empty");
    }

    if (j.contains("ablation")) {
      const auto& a = j.at("ablation");
      check_keys(a, {"variants"}, "ablation");
      read_opt(a, "variants", c.ablation_variants);
    }

    if (j.contains("theorem")) {
      const auto& t = j.at("theorem");
      check_keys(t, {"train_epochs", "probes_per_model", "etas", "alignment_threshold"}, "theorem");
      read_opt(t, "train_epochs", c.theorem_train_epochs);
      read_opt(t, "probes_per_model", c.theorem_probes_per_model);
      read_opt(t, "etas", c.theorem_etas);
      read_opt(t, "alignment_threshold", c.alignment_threshold);
    }

    if (j.contains("complexity")) {
      const auto& t = j.at("complexity");
      check_keys(t, {"layers_main", "shots"}, "complexity");
      read_opt(t, "layers_main", c.complexity_layers_main);
      read_opt(t, "shots", c.complexity_shots);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }

  // Semantic validation before any compute.
  if (c.train.epochs < 0) throw ConfigError("train.epochs must be >= 0");
  if (c.train.batch_size < 1) throw ConfigError("train.batch_size must be >= 1");
  if (!(c.train.adam.learning_rate > 0.0)) throw ConfigError("train.learning_rate must be > 0");
  if (c.ttt.epochs < 0 || c.online_epochs < 0) throw ConfigError("ttt epochs must be >= 0");
  if (c.ttt.batch_size < 0) throw ConfigError("ttt.batch_size must be >= 0");
  if (!(c.ttt.adam.learning_rate > 0.0)) throw ConfigError("ttt.learning_rate must be > 0");
  for (double e : c.epsilons)
    if (!(e >= 0.0)) throw ConfigError("sweep.epsilons must be >= 0");
  for (const auto& v : c.sweep_variants)
    if (!is_known_variant(v)) throw ConfigError("sweep.variants: unknown variant '" + v + "'");
  for (const auto& v : c.ablation_variants)
    if (std::find(kAblationVariants.begin(), kAblationVariants.end(), v) == kAblationVariants.end())
      throw ConfigError("ablation.variants: unknown variant '" + v + "'");
  if (c.corruption) {
    for (double level : c.corruption->levels) {
      CorruptionSpec spec{c.corruption->kind, level, 0, c.corruption->snow_low, c.corruption->snow_high};
      try {
        spec.validate();
      } catch (const Error& e) {
        throw ConfigError(std::string("sweep.corruption: ") + e.what());
      }
    }
  }
  if (c.theorem_etas.empty()) throw ConfigError("theorem.etas: empty");
  for (double e : c.theorem_etas)
    if (!(e > 0.0)) throw ConfigError("theorem.etas must be > 0");
  if (c.theorem_probes_per_model < 0) throw ConfigError("theorem.probes_per_model must be >= 0");
  for (int l : c.complexity_layers_main)
    if (l < 1) throw ConfigError("complexity.layers_main must be >= 1");
  for (const auto& ds : c.datasets) {
    try {
      c.architecture_for(ds).validate();
      if (ds.family == DatasetFamily::BarsAndStripes && ds.d_x < 4)
        throw InvalidArgument("bars-and-stripes needs d_x >= 4");
      if (ds.n_samples < 5) throw InvalidArgument("n_samples must be >= 5");
    } catch (const InvalidArgument& e) {
      throw ConfigError(ds.name() + ": " + e.what());
    }
  }
  return c;
}

ExperimentConfig ExperimentConfig::load(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return from_json(j);
}

json ExperimentConfig::to_json() const {
  json ds = json::array();
  for (const auto& d : datasets)
    ds.push_back({{"family", std::string(to_string(d.family))}, {"d_x", d.d_x}, {"n_samples", d.n_samples}});
  json arch{{"n_trash", n_trash},           {"layers_encoder", layers_encoder},
            {"layers_decoder", layers_decoder}, {"layers_main", layers_main},
            {"use_linear", use_linear},     {"reuploading", reuploading}};
  if (n_qubits) arch["n_qubits"] = *n_qubits;
  json sweep{{"epsilons", epsilons}, {"variants", sweep_variants}};
  if (corruption) {
    sweep["corruption"] = {{"kind", std::string(qttt::to_string(corruption->kind))},
                           {"levels", corruption->levels},
                           {"snow_low", corruption->snow_low},
                           {"snow_high", corruption->snow_high}};
  }
  return json{
      {"datasets", ds},
      {"seeds", seeds},
      {"architecture", arch},
      {"train",
       {{"epochs", train.epochs},
        {"batch_size", train.batch_size},
        {"learning_rate", train.adam.learning_rate},
        {"beta1", train.adam.beta1},
        {"beta2", train.adam.beta2},
        {"epsilon", train.adam.epsilon},
        {"tolerance", train.tolerance}}},
      {"ttt",
       {{"epochs", ttt.epochs},
        {"learning_rate", ttt.adam.learning_rate},
        {"batch_size", ttt.batch_size},
        {"online_epochs", online_epochs},
        {"beta1", ttt.adam.beta1},
        {"beta2", ttt.adam.beta2},
        {"epsilon", ttt.adam.epsilon}}},
      {"sweep", sweep},
      {"ablation", {{"variants", ablation_variants}}},
      {"theorem",
       {{"train_epochs", theorem_train_epochs},
        {"probes_per_model", theorem_probes_per_model},
        {"etas", theorem_etas},
        {"alignment_threshold", alignment_threshold}}},
      {"complexity", {{"layers_main", complexity_layers_main}, {"shots", complexity_shots}}},
  };
}

ArchitectureConfig ExperimentConfig::architecture_for(const DatasetSpec& ds) const {
  ArchitectureConfig a = ArchitectureConfig::for_features(ds.d_x, 2, n_trash);
  if (n_qubits) a.n_qubits = *n_qubits;
  a.layers_encoder = layers_encoder;
  a.layers_decoder = layers_decoder;
  a.layers_main = layers_main;
  a.use_linear = use_linear;
  a.reuploading = reuploading;
  return a;
}

std::vector<SweepPoint> ExperimentConfig::sweep_points() const {
  std::vector<SweepPoint> out;
  if (corruption) {
    for (double level : corruption->levels)
      for (double eps : epsilons) out.push_back({corruption->kind, level, eps});
  } else {
    for (double eps : epsilons) out.push_back({std::nullopt, 0.0, eps});
  }
  return out;
}

void write_metrics_csv(std::ostream& out, std::span<const MetricsRow> rows) {
  out << "dataset,seed,variant,corruption_kind,corruption_level,epsilon,accuracy,ae_before,ae_after\n";
  for (const auto& r : rows) {
    out << r.dataset << ',' << r.seed << ',' << r.variant << ',' << r.corruption_kind << ','
        << format_double(r.corruption_level) << ',' << format_double(r.epsilon) << ','
        << format_double(r.accuracy) << ',' << format_double(r.ae_before) << ','
        << format_double(r.ae_after) << '\n';
  }
}

std::vector<MetricsRow> read_metrics_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) ||
      line != "dataset,seed,variant,corruption_kind,corruption_level,epsilon,accuracy,ae_before,ae_after")
    throw SchemaError("metrics csv: unexpected header");
  std::vector<MetricsRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 9) throw SchemaError("metrics csv: expected 9 fields in '" + line + "'");
    try {
      rows.push_back({f[0], std::stoull(f[1]), f[2], f[3], std::stod(f[4]), std::stod(f[5]),
                      std::stod(f[6]), std::stod(f[7]), std::stod(f[8])});
    } catch (const std::exception&) {
      throw SchemaError("metrics csv: malformed number in '" + line + "'");
    }
  }
  return rows;
}

std::string config_hash(const ExperimentConfig& cfg, std::string_view command, const RunOptions& opts) {
  const json key{{"command", command},
                 {"config", cfg.to_json()},
                 {"noise_resample", opts.noise_resample},
                 {"version", kHarnessVersion}};
  return to_hex(fnv1a64(key.dump()));
}

std::uint64_t derive_seed(std::uint64_t base, std::string_view tag) {
  return fnv1a64(std::to_string(base) + ":" + std::string(tag));
}

namespace {

fs::path command_dir(const ExperimentConfig& cfg, std::string_view command, const RunOptions& opts) {
  const fs::path dir = opts.out_dir / (std::string(command) + "-" + config_hash(cfg, command, opts));
  fs::create_directories(dir);
  const json provenance{{"command", command},
                        {"config", cfg.to_json()},
                        {"noise_resample", opts.noise_resample},
                        {"hash", config_hash(cfg, command, opts)},
                        {"harness_version", kHarnessVersion}};
  write_file(dir / "config.json", provenance.dump(2) + "\n");
  return dir;
}

Dataset make_dataset(const DatasetSpec& ds, std::uint64_t seed) {
  Dataset d = generate(ds.family, ds.d_x, seed, ds.n_samples);
  d.name = ds.name();
  return d;
}

json train_to_json(const TrainConfig& t) {
  return {{"epochs", t.epochs},
          {"batch_size", t.batch_size},
          {"learning_rate", t.adam.learning_rate},
          {"beta1", t.adam.beta1},
          {"beta2", t.adam.beta2},
          {"epsilon", t.adam.epsilon},
          {"tolerance", t.tolerance},
          {"seed", t.seed},
          {"objective", t.objective == TrainObjective::MultiTask ? "multi-task" : "sequential"}};
}

struct VariantModel {
  ArchitectureConfig arch;
  TrainConfig train;
};

VariantModel model_for_variant(const std::string& variant, const ExperimentConfig& cfg,
                               const DatasetSpec& ds, std::uint64_t seed) {
  VariantModel m{cfg.architecture_for(ds), cfg.train};
  m.train.seed = seed;
  if (variant == "ablation-nt1") m.arch.n_trash = 1;
  else if (variant == "ablation-nt2") m.arch.n_trash = 2;
  else if (variant == "ablation-no-linear") m.arch.use_linear = false;
  else if (variant == "ablation-no-reuploading") m.arch.reuploading = false;
  else if (variant == "ablation-no-multitask") m.train.objective = TrainObjective::Sequential;
  else if (!is_known_variant(variant)) throw ConfigError("unknown variant '" + variant + "'");
  try {
    m.arch.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(variant + ": " + e.what());
  }
  return m;
}

std::string model_key(const DatasetSpec& ds, std::uint64_t seed, const ArchitectureConfig& arch,
                      const TrainConfig& train) {
  const json key{{"dataset", ds.name()},
                 {"n_samples", ds.n_samples},
                 {"seed", seed},
                 {"architecture", arch},
                 {"train", train_to_json(train)}};
  return to_hex(fnv1a64(key.dump()));
}

NoiseModel noise_for(const ArchitectureConfig& arch, std::uint64_t seed, double epsilon,
                     std::size_t n_samples, bool resample) {
  if (epsilon == 0.0) return {};
  const std::string tag = "noise:" + format_double(epsilon);
  if (!resample) return NoiseModel::fixed(realize_noise(arch, epsilon, derive_seed(seed, tag)));
  std::vector<NoiseSpec> specs;
  specs.reserve(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i)
    specs.push_back(realize_noise(arch, epsilon, derive_seed(seed, tag + ":" + std::to_string(i))));
  return NoiseModel::per_sample(std::move(specs));
}

}  // namespace

QtttParams trained_model(const ExperimentConfig& cfg, const DatasetSpec& ds, std::uint64_t seed,
                         const ArchitectureConfig& arch, const TrainConfig& train,
                         const RunOptions& opts) {
  (void)cfg;
  const std::string key = model_key(ds, seed, arch, train);
  const fs::path path = opts.out_dir / "models" / (ds.name() + "-s" + std::to_string(seed) + "-" + key + ".json");
  if (fs::exists(path)) {
    QtttParams p = load_checkpoint(path.string());
    if (p.arch() == arch) return p;
  }
  log_line(opts, "train " + ds.name() + " seed " + std::to_string(seed) + " -> " + path.filename().string());
  const Dataset data = make_dataset(ds, seed);
  FitResult r = fit(data, arch, train);
  write_file(path, checkpoint_to_json(r.params).dump() + "\n");
  return std::move(r.params);
}

MetricsRow evaluate_variant(const std::string& variant, const QtttParams& model,
                            const Dataset& dataset, std::uint64_t seed, const SweepPoint& point,
                            const ExperimentConfig& cfg, const RunOptions& opts) {
  MetricsRow row;
  row.dataset = dataset.name;
  row.seed = seed;
  row.variant = variant;
  row.epsilon = point.epsilon;

  FeatureMatrix x = dataset.test_features();
  const auto y = dataset.labels_of(dataset.test);
  if (point.corruption) {
    row.corruption_kind = std::string(to_string(*point.corruption));
    row.corruption_level = point.level;
    CorruptionSpec spec{*point.corruption, point.level,
                        derive_seed(seed, "corrupt:" + row.corruption_kind + ":" + format_double(point.level)),
                        cfg.corruption ? cfg.corruption->snow_low : 0.0,
                        cfg.corruption ? cfg.corruption->snow_high : 1.0};
    x = corrupt(x, spec);
  }
  const NoiseModel noise = noise_for(model.arch(), seed, point.epsilon, x.rows(), opts.noise_resample);

  if (variant == "baseline-no-ttt" || variant == "ablation-no-ttt") {
    row.accuracy = accuracy(model, x, y, noise);
    row.ae_before = row.ae_after = mean_qae_loss(model, x, noise);
  } else if (variant == "qttt-online") {
    TttConfig t = cfg.ttt;
    t.mode = TttMode::Online;
    t.epochs = cfg.online_epochs;
    const OnlineResult r = ttt_online(model, x, noise, t);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < y.size(); ++i) hits += r.predictions[i] == y[i] ? 1 : 0;
    row.accuracy = y.empty() ? 0.0 : 100.0 * static_cast<double>(hits) / static_cast<double>(y.size());
    row.ae_before = r.ae_before;
    row.ae_after = r.ae_after;
  } else if (is_known_variant(variant)) {
    TttConfig t = cfg.ttt;
    t.mode = TttMode::Batch;
    const TttResult r = ttt_batch(model, x, noise, t);
    row.accuracy = accuracy(r.params, x, y, noise);
    row.ae_before = r.ae_before;
    row.ae_after = r.ae_after;
  } else {
    throw ConfigError("unknown variant '" + variant + "'");
  }
  return row;
}

CommandOutput cmd_generate(const ExperimentConfig& cfg, const RunOptions& opts) {
  CommandOutput out{command_dir(cfg, "generate", opts), {}};
  for (const auto& ds : cfg.datasets) {
    for (std::uint64_t seed : cfg.seeds) {
      const Dataset d = make_dataset(ds, seed);
      const fs::path stem = out.dir / (ds.name() + "-s" + std::to_string(seed));
      save_dataset(d, stem);
      out.files.push_back(stem.string() + ".csv");
      out.files.push_back(stem.string() + ".json");
      log_line(opts, "wrote " + stem.string());
    }
  }
  return out;
}

CommandOutput cmd_train(const ExperimentConfig& cfg, const RunOptions& opts) {
  CommandOutput out{command_dir(cfg, "train", opts), {}};
  for (const auto& ds : cfg.datasets) {
    for (std::uint64_t seed : cfg.seeds) {
      const Dataset d = make_dataset(ds, seed);
      TrainConfig train = cfg.train;
      train.seed = seed;
      const ArchitectureConfig arch = cfg.architecture_for(ds);
      log_line(opts, "train " + ds.name() + " seed " + std::to_string(seed));
      const FitResult r = fit(d, arch, train);
      const std::string stem = ds.name() + "-s" + std::to_string(seed);
      const fs::path ck = out.dir / (stem + ".checkpoint.json");
      const fs::path hist = out.dir / (stem + ".history.csv");
      write_file(ck, checkpoint_to_json(r.params).dump() + "\n");
      std::ostringstream h;
      write_history_csv(h, r.history);
      write_file(hist, h.str());
      const fs::path cached = opts.out_dir / "models" /
                              (stem + "-" + model_key(ds, seed, arch, train) + ".json");
      if (!fs::exists(cached)) write_file(cached, checkpoint_to_json(r.params).dump() + "\n");
      out.files.push_back(ck);
      out.files.push_back(hist);
    }
  }
  return out;
}

namespace {

SweepOutput run_grid(const ExperimentConfig& cfg, const RunOptions& opts, std::string_view command,
                     const std::vector<std::string>& variants) {
  SweepOutput result{{command_dir(cfg, command, opts), {}}, {}};
  const auto points = cfg.sweep_points();

  for (const auto& ds : cfg.datasets) {
    for (std::uint64_t seed : cfg.seeds) {
      const Dataset data = make_dataset(ds, seed);
      std::map<std::string, QtttParams> models;
      std::vector<const QtttParams*> model_of(variants.size());
      for (std::size_t v = 0; v < variants.size(); ++v) {
        const VariantModel vm = model_for_variant(variants[v], cfg, ds, seed);
        const std::string key = model_key(ds, seed, vm.arch, vm.train);
        auto it = models.find(key);
        if (it == models.end())
          it = models.emplace(key, trained_model(cfg, ds, seed, vm.arch, vm.train, opts)).first;
        model_of[v] = &it->second;
      }

      std::vector<MetricsRow> rows(points.size() * variants.size());
      parallel_for(rows.size(), [&](std::size_t k) {
        const std::size_t p = k / variants.size();
        const std::size_t v = k % variants.size();
        rows[k] = evaluate_variant(variants[v], *model_of[v], data, seed, points[p], cfg, opts);
      });
      for (const auto& r : rows) {
        log_line(opts, r.dataset + " seed " + std::to_string(r.seed) + " " + r.variant + " " +
                           r.corruption_kind + "=" + format_double(r.corruption_level) +
                           " eps=" + format_double(r.epsilon) + " acc=" + format_double(r.accuracy));
      }
      result.rows.insert(result.rows.end(), rows.begin(), rows.end());
    }
  }

  std::ostringstream csv;
  write_metrics_csv(csv, result.rows);
  const fs::path path = result.output.dir / "metrics.csv";
  write_file(path, csv.str());
  result.output.files.push_back(path);
  return result;
}

}  // namespace

SweepOutput cmd_sweep(const ExperimentConfig& cfg, const RunOptions& opts) {
  return run_grid(cfg, opts, "sweep", cfg.sweep_variants);
}

SweepOutput cmd_ablation(const ExperimentConfig& cfg, const RunOptions& opts) {
  const auto& variants = cfg.ablation_variants.empty() ? kAblationVariants : cfg.ablation_variants;
  for (const auto& v : variants)
    if (std::find(kAblationVariants.begin(), kAblationVariants.end(), v) == kAblationVariants.end())
      throw ConfigError("unknown ablation variant '" + v + "'");
  return run_grid(cfg, opts, "ablation", variants);
}

ComplexityOutput cmd_complexity(const ExperimentConfig& cfg, const RunOptions& opts) {
  ComplexityOutput out{{command_dir(cfg, "complexity", opts), {}}, {}};
  const DatasetSpec& ds = cfg.datasets.front();
  const std::uint64_t n_test = ds.n_samples / 5;
  const std::uint64_t n_train = ds.n_samples - n_test;
  json reports = json::array();
  for (int lm : cfg.complexity_layers_main) {
    ArchitectureConfig arch = cfg.architecture_for(ds);
    arch.layers_main = lm;
    out.reports.push_back(count_gates(arch, n_train, n_test, cfg.complexity_shots));
    reports.push_back(to_json(out.reports.back()));
    log_line(opts, "L_M=" + std::to_string(lm) + " measured " + format_double(out.reports.back().measured_ratio) +
                       " asymptotic " + format_double(out.reports.back().asymptotic_ratio));
  }
  const fs::path path = out.output.dir / "complexity.json";
  write_file(path, json{{"dataset", ds.name()}, {"reports", reports}}.dump(2) + "\n");
  out.output.files.push_back(path);
  return out;
}

TheoremOutput cmd_theorem(const ExperimentConfig& cfg, const RunOptions& opts) {
  TheoremOutput out{{command_dir(cfg, "theorem", opts), {}}, {}, 0, 0.0, 0.0};
  for (const auto& ds : cfg.datasets) {
    for (std::uint64_t seed : cfg.seeds) {
      const Dataset data = make_dataset(ds, seed);
      const ArchitectureConfig arch = cfg.architecture_for(ds);
      TrainConfig train = cfg.train;
      train.seed = seed;
      train.epochs = cfg.theorem_train_epochs;
      const QtttParams model = trained_model(cfg, ds, seed, arch, train, opts);

      const std::size_t n =
          std::min(data.train.size(), static_cast<std::size_t>(cfg.theorem_probes_per_model));
      std::vector<ProbeRecord> probes(n);
      parallel_for(n, [&](std::size_t k) {
        const std::size_t idx = data.train[k];
        const auto y = data.one_hot(idx);
        probes[k] = {data.name, seed, idx,
                     theorem_probe(model, data.features.row(idx), y, nullptr, cfg.theorem_etas)};
      });
      out.probes.insert(out.probes.end(), probes.begin(), probes.end());
    }
  }

  std::size_t descents = 0;
  std::size_t matches = 0;
  json probes = json::array();
  for (const auto& p : out.probes) {
    const auto& r = p.report;
    const auto smallest = std::min_element(r.steps.begin(), r.steps.end(),
                                           [](const auto& a, const auto& b) { return a.eta < b.eta; });
    json steps = json::array();
    for (const auto& s : r.steps) steps.push_back({{"eta", s.eta}, {"delta_mt", s.delta_mt}, {"slope", s.slope}});
    probes.push_back({{"dataset", p.dataset},
                      {"seed", p.seed},
                      {"sample", p.sample},
                      {"inner_product", r.inner_product},
                      {"norm_mt", r.norm_mt},
                      {"norm_ae", r.norm_ae},
                      {"l_mt", r.l_mt},
                      {"directional_estimate", r.directional_estimate},
                      {"steps", steps}});
    if (r.inner_product <= cfg.alignment_threshold) continue;
    ++out.aligned;
    if (smallest->delta_mt < 0.0) ++descents;
    if (std::abs(r.directional_estimate + r.inner_product) <= 0.05 * std::abs(r.inner_product)) ++matches;
  }
  if (out.aligned > 0) {
    out.descent_rate = static_cast<double>(descents) / static_cast<double>(out.aligned);
    out.match_rate = static_cast<double>(matches) / static_cast<double>(out.aligned);
  }
  const json summary{{"probes", out.probes.size()},
                     {"aligned", out.aligned},
                     {"alignment_threshold", cfg.alignment_threshold},
                     {"alignment_rate", out.probes.empty() ? 0.0
                                                           : static_cast<double>(out.aligned) /
                                                                 static_cast<double>(out.probes.size())},
                     {"descent_rate", out.descent_rate},
                     {"match_rate", out.match_rate}};
  const fs::path path = out.output.dir / "theorem.json";
  write_file(path, json{{"summary", summary}, {"probes", probes}}.dump(2) + "\n");
  out.output.files.push_back(path);
  log_line(opts, "aligned " + std::to_string(out.aligned) + "/" + std::to_string(out.probes.size()) +
                     " descent " + format_double(out.descent_rate) + " match " + format_double(out.match_rate));
  return out;
}

}  // namespace qttt
