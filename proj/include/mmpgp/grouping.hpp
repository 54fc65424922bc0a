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
// UE partitioning: blocked UEs aggregate into the first frequency group,
// the remaining UEs split into decorrelated groups, and each group forms
// sub-groups with an explicit retained-beam set.

#pragma once

#include <string>
#include <vector>

#include "mmpgp/channel.hpp"
#include "mmpgp/virtual_domain.hpp"

namespace mmpgp {

enum class SubgroupMode { kTotal, kSimple, kJsdmFa };

const char* to_string(SubgroupMode mode);
SubgroupMode subgroup_mode_from(const std::string& name);

struct SubGroup {
  arma::uvec ue_indices;   // global UE ids
  arma::uvec beams;        // retained beam indices (may overlap across
                           // sub-groups under JSDM-FA)
  VirtualChannel channel;
};

struct Group {
  arma::uvec ue_indices;
  double snr0_boost_db = 0.0;
  bool nlos = false;
  SubgroupMode mode = SubgroupMode::kTotal;
  std::vector<SubGroup> subgroups;
};

struct GroupPlan {
  std::vector<Group> groups;
  std::vector<std::string> notes;  // degenerate cases, fallbacks, splits
};

struct GroupingConfig {
  arma::uword n_groups = 2;       // initial count: blocked group + LOS splits
  double nlos_boost_db = 13.0;
  double split_threshold = 0.5;   // mean pairwise correlation that forces a split
  bool auto_split = true;
  arma::uword jsdm_subgroups = 2;
};

// |<h_i, h_j>| / (|h_i| |h_j|); zero rows rejected.
double correlation(const arma::cx_rowvec& a, const arma::cx_rowvec& b);

// Frequency partition: all blocked UEs form the first group; the rest split
// greedily so that each group minimizes its worst intra-group correlation.
// Groups whose mean pairwise correlation stays above the threshold keep
// splitting while auto_split is set.
GroupPlan partition_cfsdm(const CellChannel& cell, const arma::cx_mat& hv,
                          const PreselectionResult& ps,
                          const GroupingConfig& cfg);

// Sub-group formation within one group. TG keeps every pre-selected beam
// that carries group power; SG keeps the N_g strongest (falling back to TG
// when the power concentrates on fewer beams than UEs); JSDM-FA clusters
// UEs by their strongest beam into cfg.jsdm_subgroups co-scheduled
// sub-groups, each retaining its members' strongest beams.
std::vector<SubGroup> subgroup(const arma::cx_mat& hv, const Group& group,
                               const PreselectionResult& ps, SubgroupMode mode,
                               const GroupingConfig& cfg,
                               std::vector<std::string>* notes = nullptr);

}  // namespace mmpgp
