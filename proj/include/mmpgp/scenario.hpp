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
// Scenario configuration: a flat key = value text format plus the two
// bundled deployment presets. Unknown keys are rejected.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mmpgp/channel.hpp"
#include "mmpgp/grouping.hpp"
#include "mmpgp/interference.hpp"
#include "mmpgp/precoding.hpp"

namespace mmpgp {

struct ScenarioConfig {
  std::string name = "scenario";
  arma::uword n_ue = 10;
  CellGeometry geometry;
  PropagationParams propagation;  // snr0 ignored: the sweep drives it

  // beam selection: fixed count, or smallest count reaching a fraction
  arma::uword n_beams = 20;
  std::optional<double> capture_fraction;

  GroupingConfig grouping;
  SubgroupMode mode = SubgroupMode::kSimple;
  std::optional<SubgroupMode> nlos_mode;  // override for the blocked group

  arma::uword modulation = 16;
  arma::uword gh_order = 10;
  std::vector<double> snr_sweep_db = {0, 5, 10, 15, 20, 25, 30};
  double operating_snr_db = 30.0;
  std::vector<PrecoderKind> precoders = {PrecoderKind::kZfp,
                                         PrecoderKind::kZfPgp,
                                         PrecoderKind::kVaacPgp};

  arma::uword trials = 20;
  std::uint64_t seed = 1;

  std::optional<double> opgpa_is_bits;  // per-UE target enabling the OPGPA pass
  std::optional<double> snr1_db;        // optional cap for feasibility
  SnrConvention mai_convention = SnrConvention::kPrinted;
  bool dump_mai = false;

  // reference operating points for the bundled presets (reported alongside
  // the simulated numbers, never forced)
  std::optional<double> ref_se;
  std::optional<double> ref_seua;
  std::optional<double> ref_snr_db;

  std::string out_dir = "out";

  void validate() const;
};

ScenarioConfig scenario1();  // short-range cell, 10 UEs
ScenarioConfig scenario2();  // long-range cell, 20 UEs

ScenarioConfig load_config(const std::string& path);
void save_config(const ScenarioConfig& cfg, const std::string& path);

}  // namespace mmpgp
