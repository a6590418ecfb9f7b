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

#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qttt/errors.hpp"
#include "qttt/harness.hpp"

namespace {

enum ExitCode { kOk = 0, kConfigError = 1, kRuntimeError = 2 };

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum test-time training experiment harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "runs";
  bool noise_resample = false;
  bool quiet = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
    sub->add_flag("--noise-resample", noise_resample,
                  "Draw a fresh circuit-noise realization for every test sample");
    sub->add_flag("-q,--quiet", quiet, "Suppress progress output");
  };
  add_common(app.add_subcommand("generate", "Write synthetic datasets for every (family, seed)"));
  add_common(app.add_subcommand("train", "Train one model per (dataset, seed); write checkpoint and history"));
  add_common(app.add_subcommand("sweep", "Evaluate baseline and TTT variants over corruption/noise points"));
  add_common(app.add_subcommand("ablation", "Run the component ablation grid"));
  add_common(app.add_subcommand("complexity", "Report gradient gate counts for training and TTT"));
  add_common(app.add_subcommand("theorem", "Probe one-step TTT against the main-task loss"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const qttt::ExperimentConfig cfg = qttt::ExperimentConfig::load(config_path);
    qttt::RunOptions opts;
    opts.out_dir = out_dir;
    opts.noise_resample = noise_resample;
    opts.log = quiet ? nullptr : &std::cerr;

    std::filesystem::path dir;
    if (command == "generate") {
      dir = qttt::cmd_generate(cfg, opts).dir;
    } else if (command == "train") {
      dir = qttt::cmd_train(cfg, opts).dir;
    } else if (command == "sweep") {
      dir = qttt::cmd_sweep(cfg, opts).output.dir;
    } else if (command == "ablation") {
      dir = qttt::cmd_ablation(cfg, opts).output.dir;
    } else if (command == "complexity") {
      dir = qttt::cmd_complexity(cfg, opts).output.dir;
    } else {
      dir = qttt::cmd_theorem(cfg, opts).output.dir;
    }
    std::cout << dir.string() << '\n';
    return kOk;
  } catch (const qttt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}
