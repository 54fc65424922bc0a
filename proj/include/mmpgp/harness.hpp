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
//
// Monte-Carlo orchestration over scenario trials, metric aggregation, and
// file emission. Deterministic given the master seed: trial t draws from
// the stream (seed, t) and results are reduced in a fixed order.

#pragma once

#include <string>
#include <vector>

#include "mmpgp/opgpa.hpp"
#include "mmpgp/scenario.hpp"

namespace mmpgp {

// One evaluated (trial, UE, SNR point, precoder) tuple.
struct RunRecord {
  std::uint64_t trial = 0;     // per-trial stream index under the master seed
  int group = 0;               // 1-based CFSDM group id
  int subgroup = 0;            // 1-based within the group
  int ue = 0;                  // global UE id
  double snr0_db = 0.0;        // swept cell SNR, before the group boost
  std::string precoder;
  double mi_bits = 0.0;
  double gauss_bits = 0.0;     // Gaussian-input capacity on the same scalars
  double mai_power = 0.0;      // total leaked power (JSDM-FA only)
  double opgpa_gain = 1.0;     // k_m when the OPGPA pass produced the record
  double se_contrib = 0.0;     // mi_bits / N_G of the trial
  double group_boost_db = 0.0; // subcarrier power boost of the record's group
};

struct TraceAudit {
  double budget = 0.0;
  double actual = 0.0;
};

struct OpgpaRecord {
  std::uint64_t trial = 0;
  int group = 0;
  int subgroup = 0;
  double i_s_bits = 0.0;
  double snr_opgpa_db = 0.0;
  double snr_nopgpa_db = 0.0;
  bool feasible = true;
};

struct ScenarioOutcome {
  std::vector<RunRecord> records;
  std::vector<OpgpaRecord> opgpa;
  std::vector<std::string> plan_lines;  // serialized group plans per trial
  std::vector<std::string> notes;       // diagnostics, fallbacks, skips
  std::vector<TraceAudit> audits;       // every precoder trace constraint
  arma::uword completed_trials = 0;
};

struct GroupCurvePoint {
  int group = 0;
  std::string precoder;
  double snr0_db = 0.0;
  double mi_sum_bits = 0.0;     // group sum MI, mean over trials
  double gauss_sum_bits = 0.0;
};

struct Summary {
  std::vector<GroupCurvePoint> curves;
  double se_mean = 0.0;    // cell SE at the operating point
  double se_median = 0.0;
  double seua_mean = 0.0;  // SE per unit cell area
  double cell_area = 0.0;
  std::string se_precoder;
};

ScenarioOutcome run_scenario(const ScenarioConfig& cfg);

Summary aggregate(const std::vector<RunRecord>& records,
                  const ScenarioConfig& cfg);

// run.csv, per-figure files, fig_opgpa.csv, summary.txt, report.txt.
// Re-audits every recorded trace constraint and the Gaussian bound before
// writing anything.
void emit(const ScenarioOutcome& outcome, const Summary& summary,
          const ScenarioConfig& cfg, const std::string& out_dir);

// OPGPA sweep over a target grid, appending one OpgpaRecord per
// (trial, group, sub-group, target).
std::vector<OpgpaRecord> sweep_opgpa(const ScenarioConfig& cfg,
                                     const std::vector<double>& is_grid);

void write_opgpa_csv(const std::vector<OpgpaRecord>& records,
                     const std::string& path);

}  // namespace mmpgp
