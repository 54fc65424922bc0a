// mmpgp - link-level simulator for mmWave massive-MIMO downlink per-group precoding
// Copyright (C) 2026 the mmpgp authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "mmpgp/harness.hpp"

namespace {

mmpgp::ScenarioConfig resolve_config(const std::string& path) {
  if (path == "scenario1") return mmpgp::scenario1();
  if (path == "scenario2") return mmpgp::scenario2();
  return mmpgp::load_config(path);
}

int cmd_run(const std::string& config, std::optional<std::uint64_t> seed,
            std::optional<unsigned> trials, std::string out_dir) {
  mmpgp::ScenarioConfig cfg = resolve_config(config);
  if (seed) cfg.seed = *seed;
  if (trials) cfg.trials = *trials;
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  cfg.validate();

  std::cout << "running " << cfg.name << ": " << cfg.trials << " trial(s), "
            << cfg.n_ue << " UEs, M=" << cfg.modulation << ", mode "
            << mmpgp::to_string(cfg.mode) << "\n";
  const mmpgp::ScenarioOutcome outcome = mmpgp::run_scenario(cfg);
  if (outcome.records.empty()) {
    std::cerr << "no records produced; see notes below\n";
    for (const auto& n : outcome.notes) std::cerr << "  " << n << "\n";
    return 1;
  }
  const mmpgp::Summary summary = mmpgp::aggregate(outcome.records, cfg);
  mmpgp::emit(outcome, summary, cfg, cfg.out_dir);
  std::cout << "completed " << outcome.completed_trials << "/" << cfg.trials
            << " trials; SE(mean) = " << summary.se_mean
            << " bps/Hz, SEUA = " << summary.seua_mean
            << " bps/Hz/m^2 at " << cfg.operating_snr_db << " dB\n";
  std::cout << "outputs in " << cfg.out_dir << "\n";
  return 0;
}

int cmd_sweep_opgpa(const std::string& config, const std::string& is_grid,
                    std::optional<std::uint64_t> seed,
                    std::optional<unsigned> trials, std::string out_dir) {
  mmpgp::ScenarioConfig cfg = resolve_config(config);
  if (seed) cfg.seed = *seed;
  if (trials) cfg.trials = *trials;
  if (!out_dir.empty()) cfg.out_dir = out_dir;

  std::vector<double> grid;
  std::stringstream ss(is_grid);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) grid.push_back(std::stod(item));
  }
  const auto records = mmpgp::sweep_opgpa(cfg, grid);
  std::filesystem::create_directories(cfg.out_dir);
  const std::string path =
      (std::filesystem::path(cfg.out_dir) / "fig_opgpa.csv").string();
  mmpgp::write_opgpa_csv(records, path);
  std::cout << records.size() << " allocation points written to " << path
            << "\n";
  return 0;
}

int cmd_report(const std::string& in_dir) {
  const auto path = std::filesystem::path(in_dir) / "run.csv";
  std::ifstream csv(path);
  if (!csv) {
    std::cerr << "cannot open " << path << "\n";
    return 1;
  }
  std::string line;
  std::getline(csv, line);  // header
  // median MI per (group, precoder, snr)
  std::map<std::tuple<int, std::string, double>, std::vector<double>> cells;
  while (std::getline(csv, line)) {
    std::stringstream ss(line);
    std::string f[9];
    for (int i = 0; i < 9; ++i) std::getline(ss, f[i], ',');
    cells[{std::stoi(f[1]), f[5], std::stod(f[4])}].push_back(std::stod(f[6]));
  }
  std::cout << "group precoder snr0_db median_mi_bits records\n";
  for (auto& [key, vals] : cells) {
    std::sort(vals.begin(), vals.end());
    std::cout << std::get<0>(key) << " " << std::get<1>(key) << " "
              << std::get<2>(key) << " " << vals[vals.size() / 2] << " "
              << vals.size() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mmWave massive-MIMO downlink per-group precoding simulator"};
  app.require_subcommand(1);

  std::string config, out_dir, in_dir, is_grid = "1,2,3,4,5,6,7";
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> trials;

  CLI::App* run = app.add_subcommand("run", "run a scenario sweep");
  run->add_option("--config", config,
                  "config file path, or a preset name (scenario1, scenario2)")
      ->required();
  run->add_option("--seed", seed, "master seed override");
  run->add_option("--trials", trials, "trial count override");
  run->add_option("--out", out_dir, "output directory override");

  CLI::App* sweep = app.add_subcommand(
      "sweep-opgpa", "sweep per-group power allocation over QoS targets");
  sweep->add_option("--config", config, "config file path or preset name")
      ->required();
  sweep->add_option("--is-grid", is_grid,
                    "comma-separated per-UE targets in bits");
  sweep->add_option("--seed", seed, "master seed override");
  sweep->add_option("--trials", trials, "trial count override");
  sweep->add_option("--out", out_dir, "output directory override");

  CLI::App* report = app.add_subcommand("report", "summarize an output directory");
  report->add_option("--in", in_dir, "directory containing run.csv")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config, seed, trials, out_dir);
    if (sweep->parsed())
      return cmd_sweep_opgpa(config, is_grid, seed, trials, out_dir);
    if (report->parsed()) return cmd_report(in_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
