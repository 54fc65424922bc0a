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

#include "mmpgp/grouping.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace mmpgp {

namespace {

// beam-space signatures restricted to the pre-selected beams
arma::cx_mat signatures(const arma::cx_mat& hv, const PreselectionResult& ps) {
  return hv.cols(ps.beams);
}

arma::mat correlation_matrix(const arma::cx_mat& sig,
                             const std::vector<arma::uword>& ues) {
  const std::size_t n = ues.size();
  arma::mat c(n, n, arma::fill::eye);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      c(i, j) = c(j, i) =
          correlation(sig.row(ues[i]), sig.row(ues[j]));
  return c;
}

double mean_pairwise(const arma::mat& c) {
  const arma::uword n = c.n_rows;
  if (n < 2) return 0.0;
  double acc = 0.0;
  for (arma::uword i = 0; i < n; ++i)
    for (arma::uword j = i + 1; j < n; ++j) acc += c(i, j);
  return acc / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1));
}

// Greedy decorrelation split: the most mutually correlated UEs seed
// different groups, each further seed is the UE most correlated to the
// existing seeds, and every remaining UE joins the group that minimizes its
// worst correlation to current members.
std::vector<std::vector<arma::uword>> decorrelation_split(
    const arma::cx_mat& sig, const std::vector<arma::uword>& ues,
    arma::uword n_target) {
  n_target = std::max<arma::uword>(1, std::min<arma::uword>(n_target, ues.size()));
  std::vector<std::vector<arma::uword>> out(n_target);
  if (n_target == 1 || ues.size() <= n_target) {
    for (std::size_t i = 0; i < ues.size(); ++i)
      out[i % n_target].push_back(ues[i]);
    for (auto& g : out) std::sort(g.begin(), g.end());
    out.erase(std::remove_if(out.begin(), out.end(),
                             [](const auto& g) { return g.empty(); }),
              out.end());
    return out;
  }

  const arma::mat c = correlation_matrix(sig, ues);
  const std::size_t n = ues.size();

  std::vector<std::size_t> seeds;
  {
    std::size_t bi = 0, bj = 1;
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (c(i, j) > best) {
          best = c(i, j);
          bi = i;
          bj = j;
        }
    seeds.push_back(bi);
    seeds.push_back(bj);
  }
  while (seeds.size() < n_target) {
    std::size_t pick = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (std::find(seeds.begin(), seeds.end(), i) != seeds.end()) continue;
      double worst = 0.0;
      for (const std::size_t s : seeds) worst = std::max(worst, c(i, s));
      if (worst > best) {
        best = worst;
        pick = i;
      }
    }
    seeds.push_back(pick);
  }

  std::vector<std::vector<std::size_t>> local(n_target);
  for (std::size_t g = 0; g < n_target; ++g) local[g].push_back(seeds[g]);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::find(seeds.begin(), seeds.end(), i) != seeds.end()) continue;
    std::size_t pick = 0;
    double best = 2.0;
    for (std::size_t g = 0; g < n_target; ++g) {
      double worst = 0.0;
      for (const std::size_t m : local[g]) worst = std::max(worst, c(i, m));
      if (worst < best) {
        best = worst;
        pick = g;
      }
    }
    local[pick].push_back(i);
  }
  for (std::size_t g = 0; g < n_target; ++g) {
    for (const std::size_t i : local[g]) out[g].push_back(ues[i]);
    std::sort(out[g].begin(), out[g].end());
  }
  return out;
}

arma::uvec to_uvec(const std::vector<arma::uword>& v) {
  return arma::uvec(const_cast<arma::uword*>(v.data()), v.size(), true);
}

// beam order: descending group power, ties toward the lower beam index
std::vector<arma::uword> beam_rank(const arma::vec& power,
                                   const arma::uvec& beams) {
  std::vector<arma::uword> idx(power.n_elem);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](arma::uword a, arma::uword b) {
    if (power[a] != power[b]) return power[a] > power[b];
    return beams[a] < beams[b];
  });
  return idx;
}

SubGroup make_subgroup(const arma::cx_mat& hv, arma::uvec ues,
                       arma::uvec beams) {
  SubGroup sg;
  sg.ue_indices = std::move(ues);
  sg.beams = std::move(beams);
  sg.channel = VirtualChannel::from_matrix(hv(sg.ue_indices, sg.beams), sg.beams);
  return sg;
}

}  // namespace

const char* to_string(SubgroupMode mode) {
  switch (mode) {
    case SubgroupMode::kTotal: return "TG";
    case SubgroupMode::kSimple: return "SG";
    case SubgroupMode::kJsdmFa: return "JSDM_FA";
  }
  return "?";
}

SubgroupMode subgroup_mode_from(const std::string& name) {
  if (name == "TG") return SubgroupMode::kTotal;
  if (name == "SG") return SubgroupMode::kSimple;
  if (name == "JSDM_FA") return SubgroupMode::kJsdmFa;
  throw std::invalid_argument("unknown sub-grouping mode: " + name);
}

double correlation(const arma::cx_rowvec& a, const arma::cx_rowvec& b) {
  if (a.n_elem != b.n_elem)
    throw std::invalid_argument("correlation: length mismatch");
  const double na = arma::norm(a, 2), nb = arma::norm(b, 2);
  if (na == 0.0 || nb == 0.0)
    throw std::invalid_argument("correlation: zero row");
  return std::abs(arma::cdot(a, b)) / (na * nb);
}

GroupPlan partition_cfsdm(const CellChannel& cell, const arma::cx_mat& hv,
                          const PreselectionResult& ps,
                          const GroupingConfig& cfg) {
  if (cfg.n_groups < 2 || cfg.n_groups > 4)
    throw std::invalid_argument("partition_cfsdm: n_groups must be 2, 3 or 4");
  if (cell.ues.empty())
    throw std::invalid_argument("partition_cfsdm: empty cell");

  const arma::cx_mat sig = signatures(hv, ps);

  std::vector<arma::uword> blocked, open;
  for (const auto& ue : cell.ues)
    (ue.blocked ? blocked : open).push_back(ue.index);

  GroupPlan plan;
  if (blocked.empty())
    plan.notes.push_back(
        "no blocked UEs: blocked group omitted, group count reduced");
  if (open.empty())
    plan.notes.push_back("no line-of-sight UEs: only the blocked group formed");

  if (!blocked.empty()) {
    Group g1;
    g1.ue_indices = to_uvec(blocked);
    g1.snr0_boost_db = cfg.nlos_boost_db;
    g1.nlos = true;
    plan.groups.push_back(std::move(g1));
  }

  if (!open.empty()) {
    auto los_groups = decorrelation_split(sig, open, cfg.n_groups - 1);
    if (cfg.auto_split) {
      bool changed = true;
      while (changed && plan.groups.size() + los_groups.size() < 8) {
        changed = false;
        for (std::size_t g = 0; g < los_groups.size(); ++g) {
          if (los_groups[g].size() < 2) continue;
          const arma::mat c = correlation_matrix(sig, los_groups[g]);
          const double mean_corr = mean_pairwise(c);
          if (mean_corr > cfg.split_threshold) {
            auto halves = decorrelation_split(sig, los_groups[g], 2);
            if (halves.size() == 2) {
              plan.notes.push_back(
                  "split a correlated group (mean pairwise correlation " +
                  std::to_string(mean_corr) + ")");
              los_groups[g] = halves[0];
              los_groups.insert(los_groups.begin() + g + 1, halves[1]);
              changed = true;
              break;
            }
          }
        }
      }
    }
    for (auto& ues : los_groups) {
      Group g;
      g.ue_indices = to_uvec(ues);
      plan.groups.push_back(std::move(g));
    }
  }
  return plan;
}

std::vector<SubGroup> subgroup(const arma::cx_mat& hv, const Group& group,
                               const PreselectionResult& ps, SubgroupMode mode,
                               const GroupingConfig& cfg,
                               std::vector<std::string>* notes) {
  if (group.ue_indices.is_empty())
    throw std::invalid_argument("subgroup: empty group");
  auto note = [&](const std::string& s) {
    if (notes != nullptr) notes->push_back(s);
  };

  const arma::uword n_ue = group.ue_indices.n_elem;
  arma::vec power(ps.beams.n_elem, arma::fill::zeros);
  for (arma::uword i = 0; i < ps.beams.n_elem; ++i)
    for (const arma::uword u : group.ue_indices)
      power[i] += std::norm(hv(u, ps.beams[i]));
  const double total = arma::accu(power);
  const auto rank = beam_rank(power, ps.beams);

  if (mode == SubgroupMode::kSimple) {
    arma::uword live = 0;
    for (arma::uword i = 0; i < power.n_elem; ++i)
      if (power[i] > 1e-12 * total) ++live;
    if (live < n_ue) {
      note("group power concentrates on fewer beams than UEs; fell back to TG");
      mode = SubgroupMode::kTotal;
    }
  }

  std::vector<SubGroup> subs;
  if (mode == SubgroupMode::kTotal) {
    std::vector<arma::uword> keep;
    for (const arma::uword i : rank)
      if (power[i] > 1e-12 * total) keep.push_back(ps.beams[i]);
    subs.push_back(make_subgroup(hv, group.ue_indices, to_uvec(keep)));
    return subs;
  }

  if (mode == SubgroupMode::kSimple) {
    std::vector<arma::uword> keep;
    for (arma::uword r = 0; r < n_ue; ++r) keep.push_back(ps.beams[rank[r]]);
    subs.push_back(make_subgroup(hv, group.ue_indices, to_uvec(keep)));
    return subs;
  }

  // JSDM-FA: cluster UEs by their strongest beam, spread the clusters over
  // the co-scheduled sub-groups, strongest cluster first.
  std::map<arma::uword, std::vector<arma::uword>> clusters;
  for (const arma::uword u : group.ue_indices)
    clusters[ps.per_ue_order(u, 0)].push_back(u);

  std::vector<std::pair<arma::uword, std::vector<arma::uword>>> ordered(
      clusters.begin(), clusters.end());
  std::stable_sort(ordered.begin(), ordered.end(),
                   [&](const auto& a, const auto& b) {
                     const arma::uvec ia = arma::find(ps.beams == a.first);
                     const arma::uvec ib = arma::find(ps.beams == b.first);
                     const double pa = ia.is_empty() ? 0.0 : power[ia[0]];
                     const double pb = ib.is_empty() ? 0.0 : power[ib[0]];
                     if (pa != pb) return pa > pb;
                     return a.first < b.first;
                   });

  const arma::uword n_sub =
      std::max<arma::uword>(1, std::min<arma::uword>(cfg.jsdm_subgroups,
                                                     ordered.size()));
  if (n_sub < cfg.jsdm_subgroups)
    note("fewer strongest-beam clusters than requested sub-groups");

  std::vector<std::vector<arma::uword>> members(n_sub);
  for (const auto& [beam, ues] : ordered) {
    std::size_t pick = 0;
    for (std::size_t s = 1; s < n_sub; ++s)
      if (members[s].size() < members[pick].size()) pick = s;
    members[pick].insert(members[pick].end(), ues.begin(), ues.end());
  }

  for (auto& ues : members) {
    if (ues.empty()) continue;
    std::sort(ues.begin(), ues.end());
    // members' strongest beams, taken in per-UE rank rounds, until the
    // retained set matches the sub-group size (square effective channel)
    std::vector<arma::uword> beams;
    for (arma::uword r = 0; r < ps.per_ue_order.n_cols && beams.size() < ues.size(); ++r) {
      for (const arma::uword u : ues) {
        const arma::uword b = ps.per_ue_order(u, r);
        if (std::find(beams.begin(), beams.end(), b) == beams.end())
          beams.push_back(b);
        if (beams.size() == ues.size()) break;
      }
    }
    if (beams.size() < ues.size())
      note("pre-selected beam pool exhausted while forming a sub-group");
    subs.push_back(make_subgroup(hv, to_uvec(ues), to_uvec(beams)));
  }
  return subs;
}

}  // namespace mmpgp
