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

#include "mmpgp/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "mmpgp/rng.hpp"

namespace mmpgp {

namespace {

constexpr const char* kOpgpaLabel = "ZF_PGP_OPGPA";

std::string fmt6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string uvec_str(const arma::uvec& v) {
  std::ostringstream os;
  os << "[";
  for (arma::uword i = 0; i < v.n_elem; ++i)
    os << (i ? " " : "") << v[i];
  os << "]";
  return os.str();
}

// ZF-PGP precoder in factored form with placeholder block rows; the
// covariance P P^H does not depend on the unit-norm rows, so this is the
// exact interferer model without running the block optimizer.
PrecoderFactors zf_pgp_factors(const VirtualChannel& hv) {
  PrecoderFactors f = zfp(hv);  // validates rank, left = pseudo-inverse
  const EffectiveChannel eff = effective_singular_values(hv);
  f.kind = PrecoderKind::kZfPgp;
  f.sv = std::sqrt(2.0) * eff.s_eff;
  f.zf_gain = 0.0;
  f.power_budget = 2.0 * static_cast<double>(hv.h.n_rows);
  f.blocks.assign(hv.h.n_rows, arma::cx_rowvec{cx(1.0, 0.0), cx(0.0, 0.0)});
  return f;
}

struct TrialData {
  CellChannel cell;
  arma::cx_mat hv;
  PreselectionResult ps;
  GroupPlan plan;
};

TrialData prepare_trial(const ScenarioConfig& cfg, const VcmBasis& basis,
                        std::uint64_t trial) {
  TrialData t;
  auto rng = make_stream(cfg.seed, trial);
  t.cell = sample_cell(cfg.n_ue, cfg.geometry, cfg.propagation, rng);
  t.hv = project(t.cell.rows, basis);
  arma::uword nb = cfg.capture_fraction
                       ? beams_for_fraction(t.hv, *cfg.capture_fraction)
                       : cfg.n_beams;
  nb = std::clamp<arma::uword>(nb, 1, t.hv.n_cols);
  t.ps = preselect(t.hv, nb);
  t.plan = partition_cfsdm(t.cell, t.hv, t.ps, cfg.grouping);
  for (auto& group : t.plan.groups) {
    group.mode = (group.nlos && cfg.nlos_mode) ? *cfg.nlos_mode : cfg.mode;
    group.subgroups =
        subgroup(t.hv, group, t.ps, group.mode, cfg.grouping, &t.plan.notes);
  }
  return t;
}

std::string plan_to_string(const TrialData& t, std::uint64_t trial) {
  std::ostringstream os;
  for (std::size_t gi = 0; gi < t.plan.groups.size(); ++gi) {
    const Group& g = t.plan.groups[gi];
    os << "trial " << trial << " group " << gi + 1
       << (g.nlos ? " (blocked)" : "") << " boost_db=" << g.snr0_boost_db
       << " mode=" << to_string(g.mode) << " ues=" << uvec_str(g.ue_indices)
       << "\n";
    for (std::size_t si = 0; si < g.subgroups.size(); ++si) {
      const SubGroup& s = g.subgroups[si];
      os << "  sub " << si + 1 << " ues=" << uvec_str(s.ue_indices)
         << " beams=" << uvec_str(s.beams) << "\n";
    }
  }
  return os.str();
}

// per-kind interferer powers for the co-scheduled sub-groups of one group
struct GroupMai {
  bool active = false;
  std::map<std::string, std::vector<arma::vec>> per_ue_total;  // kind -> [sub](ue)
};

GroupMai group_mai(const Group& group, const arma::cx_mat& hv,
                   const ScenarioConfig& cfg, ScenarioOutcome& out) {
  GroupMai mai;
  if (group.mode != SubgroupMode::kJsdmFa || group.subgroups.size() < 2)
    return mai;
  mai.active = true;
  const std::size_t n_sub = group.subgroups.size();

  std::vector<std::vector<arma::cx_mat>> cross(
      n_sub, std::vector<arma::cx_mat>(n_sub));
  for (std::size_t l = 0; l < n_sub; ++l)
    for (std::size_t lp = 0; lp < n_sub; ++lp)
      cross[l][lp] =
          hv(group.subgroups[l].ue_indices, group.subgroups[lp].beams);

  for (const PrecoderKind kind : cfg.precoders) {
    if (kind == PrecoderKind::kVaacPgp) continue;
    std::vector<PrecoderFactors> precs;
    precs.reserve(n_sub);
    for (const SubGroup& s : group.subgroups) {
      precs.push_back(kind == PrecoderKind::kZfp ? zfp(s.channel)
                                                 : zf_pgp_factors(s.channel));
      out.audits.push_back({precs.back().power_budget, precs.back().power()});
    }
    const MaiReport rep = mai_report(cross, precs, 1.0, cfg.mai_convention);
    mai.per_ue_total[to_string(kind)] = rep.per_ue_total;
    if (cfg.dump_mai) {
      std::ostringstream os;
      for (std::size_t l = 0; l < n_sub; ++l) {
        os << "mai " << to_string(kind) << " victim sub " << l + 1 << ":";
        for (const double p : rep.per_ue_total[l]) os << " " << fmt6(p);
        os << "\n";
      }
      out.plan_lines.push_back(os.str());
    }
  }
  return mai;
}

void run_trial(const ScenarioConfig& cfg, const VcmBasis& basis,
               std::uint64_t trial, const Constellation& c, BlockCache& cache,
               ScenarioOutcome& out) {
  const TrialData t = prepare_trial(cfg, basis, trial);
  out.plan_lines.push_back(plan_to_string(t, trial));
  for (const auto& n : t.plan.notes)
    out.notes.push_back("trial " + std::to_string(trial) + ": " + n);

  const double n_groups = static_cast<double>(t.plan.groups.size());
  std::vector<RunRecord> trial_records;

  for (std::size_t gi = 0; gi < t.plan.groups.size(); ++gi) {
    const Group& group = t.plan.groups[gi];
    const GroupMai mai = group_mai(group, t.hv, cfg, out);

    for (std::size_t si = 0; si < group.subgroups.size(); ++si) {
      const SubGroup& sub = group.subgroups[si];
      const arma::uword n_ue = sub.ue_indices.n_elem;
      const bool square = sub.channel.h.n_rows == sub.channel.h.n_cols;

      // snr-independent pieces, built once per sub-group
      const PrecoderFactors zf = zfp(sub.channel);
      out.audits.push_back({zf.power_budget, zf.power()});
      const EffectiveChannel eff = effective_singular_values(sub.channel);
      out.audits.push_back(
          {2.0 * static_cast<double>(n_ue), zf_pgp_factors(sub.channel).power()});

      for (const PrecoderKind kind : cfg.precoders) {
        if (kind == PrecoderKind::kVaacPgp && (mai.active || !square)) {
          out.notes.push_back("trial " + std::to_string(trial) +
                              ": VAAC_PGP skipped for group " +
                              std::to_string(gi + 1) +
                              (mai.active ? " (co-scheduled sub-groups)"
                                          : " (non-square channel)"));
          continue;
        }
        const arma::vec* p_mai = nullptr;
        if (mai.active && kind != PrecoderKind::kVaacPgp)
          p_mai = &mai.per_ue_total.at(to_string(kind))[si];

        for (const double snr_db : cfg.snr_sweep_db) {
          const double snr_cell = db_to_lin(snr_db + group.snr0_boost_db);
          for (arma::uword m = 0; m < n_ue; ++m) {
            const double p_total = p_mai != nullptr ? (*p_mai)[m] : 0.0;
            const double snr_ue =
                p_mai != nullptr
                    ? effective_snr_jsdm(snr_cell, p_total, cfg.mai_convention)
                    : snr_cell;

            RunRecord rec;
            rec.trial = trial;
            rec.group = static_cast<int>(gi + 1);
            rec.subgroup = static_cast<int>(si + 1);
            rec.ue = static_cast<int>(sub.ue_indices[m]);
            rec.snr0_db = snr_db;
            rec.precoder = to_string(kind);
            rec.mai_power = p_total;
            rec.group_boost_db = group.snr0_boost_db;

            if (kind == PrecoderKind::kZfp) {
              arma::cx_mat ch(1, 1);
              ch(0, 0) = cx(std::sqrt(snr_ue) * zf.zf_gain, 0.0);
              rec.mi_bits =
                  mi_gh(ch, arma::cx_mat(1, 1, arma::fill::ones), 1.0, c,
                        cfg.gh_order)
                      .bits;
              rec.gauss_bits =
                  std::log2(1.0 + snr_ue * zf.zf_gain * zf.zf_gain);
            } else {
              const double s = kind == PrecoderKind::kZfPgp
                                   ? eff.s_eff[m]
                                   : sub.channel.s[m];
              const double snr_eff = 2.0 * snr_ue * s * s;
              const PgpBlock blk = cache.at(snr_eff, c, cfg.gh_order);
              rec.mi_bits = pgp_stream_mi(snr_eff, blk, c, cfg.gh_order);
              rec.gauss_bits = std::log2(1.0 + snr_eff);
            }
            rec.se_contrib = rec.mi_bits / n_groups;
            trial_records.push_back(std::move(rec));
          }
        }
      }

      // optional OPGPA pass at the operating point
      if (cfg.opgpa_is_bits && square) {
        const double snr_op =
            db_to_lin(cfg.operating_snr_db + group.snr0_boost_db);
        EffectiveChannel scaled = eff;
        scaled.s_eff *= std::sqrt(snr_op);
        scaled.zf_weights = 1.0 / scaled.s_eff;
        QosTarget target;
        target.i_s_bits = *cfg.opgpa_is_bits;
        target.snr0 = snr_op;
        if (cfg.snr1_db) {
          const double cap = db_to_lin(*cfg.snr1_db);
          if (cap > snr_op) target.snr1 = cap;
        }
        const OpgpaResult r =
            opgpa_gains(scaled, target, c, cfg.gh_order, &cache);
        for (arma::uword m = 0; m < n_ue; ++m) {
          const double snr_eff =
              2.0 * r.gains[m] * scaled.s_eff[m] * scaled.s_eff[m];
          const PgpBlock blk = cache.at(snr_eff, c, cfg.gh_order);
          RunRecord rec;
          rec.trial = trial;
          rec.group = static_cast<int>(gi + 1);
          rec.subgroup = static_cast<int>(si + 1);
          rec.ue = static_cast<int>(sub.ue_indices[m]);
          rec.snr0_db = cfg.operating_snr_db;
          rec.precoder = kOpgpaLabel;
          rec.group_boost_db = group.snr0_boost_db;
          rec.mi_bits = pgp_stream_mi(snr_eff, blk, c, cfg.gh_order);
          rec.gauss_bits = std::log2(1.0 + snr_eff);
          rec.opgpa_gain = r.gains[m];
          rec.se_contrib = rec.mi_bits / n_groups;
          trial_records.push_back(std::move(rec));
        }
        out.opgpa.push_back({trial, static_cast<int>(gi + 1),
                             static_cast<int>(si + 1), target.i_s_bits,
                             lin_to_db(r.snr_opgpa), lin_to_db(r.snr_nopgpa),
                             r.feasible});
      }
    }
  }
  out.records.insert(out.records.end(), trial_records.begin(),
                     trial_records.end());
  out.completed_trials += 1;
}

std::vector<std::pair<std::string, int>> dedup_notes(
    const std::vector<std::string>& notes) {
  // strip the trial prefix and count repeats
  std::map<std::string, int> counts;
  std::vector<std::string> order;
  for (const auto& n : notes) {
    std::string body = n;
    const auto colon = n.find(": ");
    if (n.rfind("trial ", 0) == 0 && colon != std::string::npos)
      body = n.substr(colon + 2);
    if (counts.emplace(body, 0).second) order.push_back(body);
    counts[body] += 1;
  }
  std::vector<std::pair<std::string, int>> out;
  for (const auto& b : order) out.emplace_back(b, counts[b]);
  return out;
}

}  // namespace

ScenarioOutcome run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  const VcmBasis basis = vcm_basis(cfg.geometry);
  const Constellation c = Constellation::qam(cfg.modulation);
  BlockCache cache;

  ScenarioOutcome out;
  for (std::uint64_t trial = 0; trial < cfg.trials; ++trial) {
    try {
      run_trial(cfg, basis, trial, c, cache, out);
    } catch (const std::exception& e) {
      out.notes.push_back("trial " + std::to_string(trial) +
                          " aborted: " + e.what());
    }
  }
  return out;
}

Summary aggregate(const std::vector<RunRecord>& records,
                  const ScenarioConfig& cfg) {
  if (records.empty())
    throw std::invalid_argument("aggregate: no records");

  Summary s;
  s.cell_area = kPi * (cfg.geometry.r_outer * cfg.geometry.r_outer -
                       cfg.geometry.r_inner * cfg.geometry.r_inner);
  s.se_precoder = "ZF_PGP";
  bool have_zf_pgp = false;
  for (const PrecoderKind k : cfg.precoders)
    have_zf_pgp |= k == PrecoderKind::kZfPgp;
  if (!have_zf_pgp) s.se_precoder = to_string(cfg.precoders.front());

  // per (group, precoder, snr): mean over trials of the group sum MI
  std::map<std::tuple<int, std::string, double>,
           std::map<std::uint64_t, std::pair<double, double>>>
      acc;
  for (const RunRecord& r : records) {
    if (r.precoder == kOpgpaLabel) continue;
    auto& by_trial = acc[{r.group, r.precoder, r.snr0_db}][r.trial];
    by_trial.first += r.mi_bits;
    by_trial.second += r.gauss_bits;
  }
  for (const auto& [key, by_trial] : acc) {
    GroupCurvePoint p;
    p.group = std::get<0>(key);
    p.precoder = std::get<1>(key);
    p.snr0_db = std::get<2>(key);
    for (const auto& [trial, sums] : by_trial) {
      p.mi_sum_bits += sums.first;
      p.gauss_sum_bits += sums.second;
    }
    p.mi_sum_bits /= static_cast<double>(by_trial.size());
    p.gauss_sum_bits /= static_cast<double>(by_trial.size());
    s.curves.push_back(p);
  }

  // cell spectral efficiency at the operating point: the per-UE rates of
  // the headline precoder, each weighted by its trial's subcarrier share
  std::map<std::uint64_t, double> se_by_trial;
  for (const RunRecord& r : records) {
    if (r.precoder != s.se_precoder) continue;
    if (r.snr0_db != cfg.operating_snr_db) continue;
    se_by_trial[r.trial] += r.se_contrib;
  }
  if (!se_by_trial.empty()) {
    std::vector<double> ses;
    for (const auto& [trial, se] : se_by_trial) ses.push_back(se);
    std::sort(ses.begin(), ses.end());
    for (const double v : ses) s.se_mean += v;
    s.se_mean /= static_cast<double>(ses.size());
    s.se_median = ses[ses.size() / 2];
    s.seua_mean = s.se_mean / s.cell_area;
  }
  return s;
}

void emit(const ScenarioOutcome& outcome, const Summary& summary,
          const ScenarioConfig& cfg, const std::string& out_dir) {
  // re-audit every recorded power constraint before writing
  for (const TraceAudit& a : outcome.audits) {
    if (std::abs(a.actual - a.budget) > 1e-9 * std::max(1.0, a.budget))
      throw std::runtime_error("emit: trace power constraint violated (" +
                               fmt6(a.actual) + " vs " + fmt6(a.budget) + ")");
  }
  for (const RunRecord& r : outcome.records) {
    if (r.gauss_bits < r.mi_bits - 1e-6)
      throw std::runtime_error(
          "emit: Gaussian-input bound violated for a record");
  }

  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);

  {
    std::ofstream csv(dir / "run.csv");
    if (!csv) throw std::runtime_error("emit: cannot write " +
                                       (dir / "run.csv").string());
    csv << "seed,group,subgroup,ue,snr0_db,precoder,mi_bits,mai_power,"
           "opgpa_gain\n";
    for (const RunRecord& r : outcome.records) {
      csv << r.trial << ',' << r.group << ',' << r.subgroup << ',' << r.ue
          << ',' << fmt6(r.snr0_db) << ',' << r.precoder << ','
          << fmt6(r.mi_bits) << ',' << fmt6(r.mai_power) << ','
          << fmt6(r.opgpa_gain) << '\n';
    }
  }

  // one file per (group, precoder) pair with the figure axes
  {
    std::map<std::pair<int, std::string>, std::vector<const GroupCurvePoint*>>
        figs;
    for (const GroupCurvePoint& p : summary.curves)
      figs[{p.group, p.precoder}].push_back(&p);
    for (auto& [key, points] : figs) {
      std::sort(points.begin(), points.end(),
                [](const GroupCurvePoint* a, const GroupCurvePoint* b) {
                  return a->snr0_db < b->snr0_db;
                });
      std::string kind = key.second;
      std::transform(kind.begin(), kind.end(), kind.begin(), ::tolower);
      const fs::path path = dir / ("fig_" + cfg.name + "_g" +
                                   std::to_string(key.first) + "_" + kind +
                                   ".csv");
      std::ofstream f(path);
      f << "snr0_db,mi_sum_bits,gauss_sum_bits\n";
      for (const GroupCurvePoint* p : points)
        f << fmt6(p->snr0_db) << ',' << fmt6(p->mi_sum_bits) << ','
          << fmt6(p->gauss_sum_bits) << '\n';
    }
  }

  if (!outcome.opgpa.empty())
    write_opgpa_csv(outcome.opgpa, (dir / "fig_opgpa.csv").string());

  {
    std::ofstream f(dir / "summary.txt");
    f << "scenario: " << cfg.name << "\n";
    f << "master_seed: " << cfg.seed << "\n";
    f << "trials_completed: " << outcome.completed_trials << " of "
      << cfg.trials << "\n";
    f << "operating_snr_db: " << fmt6(cfg.operating_snr_db) << "\n";
    f << "se_precoder: " << summary.se_precoder << "\n";
    f << "se_mean_bps_hz: " << fmt6(summary.se_mean) << "\n";
    f << "se_median_bps_hz: " << fmt6(summary.se_median) << "\n";
    f << "cell_area_m2: " << fmt6(summary.cell_area) << "\n";
    f << "seua_mean_bps_hz_m2: " << fmt6(summary.seua_mean) << "\n";
    if (cfg.ref_se) f << "ref_se_bps_hz: " << fmt6(*cfg.ref_se) << "\n";
    if (cfg.ref_seua) f << "ref_seua_bps_hz_m2: " << fmt6(*cfg.ref_seua) << "\n";
    if (cfg.ref_snr_db) f << "ref_snr_db: " << fmt6(*cfg.ref_snr_db) << "\n";
    f << "\nper-group mean sum MI (bits) by SNR:\n";
    for (const GroupCurvePoint& p : summary.curves)
      f << "  g" << p.group << " " << p.precoder << " @" << fmt6(p.snr0_db)
        << " dB: " << fmt6(p.mi_sum_bits) << " (gauss " << fmt6(p.gauss_sum_bits)
        << ")\n";
  }

  {
    std::ofstream f(dir / "report.txt");
    f << "group plans\n-----------\n";
    for (const auto& line : outcome.plan_lines) f << line;
    f << "\nnotes\n-----\n";
    for (const auto& [note, count] : dedup_notes(outcome.notes))
      f << note << (count > 1 ? " (x" + std::to_string(count) + ")" : "")
        << "\n";
  }
}

std::vector<OpgpaRecord> sweep_opgpa(const ScenarioConfig& cfg,
                                     const std::vector<double>& is_grid) {
  cfg.validate();
  if (is_grid.empty())
    throw std::invalid_argument("sweep_opgpa: empty target grid");
  const VcmBasis basis = vcm_basis(cfg.geometry);
  const Constellation c = Constellation::qam(cfg.modulation);
  BlockCache cache;

  std::vector<OpgpaRecord> out;
  for (std::uint64_t trial = 0; trial < cfg.trials; ++trial) {
    TrialData t;
    try {
      t = prepare_trial(cfg, basis, trial);
    } catch (const std::exception&) {
      continue;
    }
    for (std::size_t gi = 0; gi < t.plan.groups.size(); ++gi) {
      const Group& group = t.plan.groups[gi];
      const double snr_op =
          db_to_lin(cfg.operating_snr_db + group.snr0_boost_db);
      for (std::size_t si = 0; si < group.subgroups.size(); ++si) {
        const SubGroup& sub = group.subgroups[si];
        if (sub.channel.h.n_rows != sub.channel.h.n_cols) continue;
        EffectiveChannel eff;
        try {
          eff = effective_singular_values(sub.channel);
        } catch (const RankDeficientError&) {
          continue;
        }
        eff.s_eff *= std::sqrt(snr_op);
        eff.zf_weights = 1.0 / eff.s_eff;
        for (const double is : is_grid) {
          QosTarget target;
          target.i_s_bits = is;
          target.snr0 = snr_op;
          if (cfg.snr1_db && db_to_lin(*cfg.snr1_db) > snr_op)
            target.snr1 = db_to_lin(*cfg.snr1_db);
          try {
            const OpgpaResult r =
                opgpa_gains(eff, target, c, cfg.gh_order, &cache);
            out.push_back({trial, static_cast<int>(gi + 1),
                           static_cast<int>(si + 1), is,
                           lin_to_db(r.snr_opgpa), lin_to_db(r.snr_nopgpa),
                           r.feasible});
          } catch (const InfeasibleTargetError&) {
            out.push_back({trial, static_cast<int>(gi + 1),
                           static_cast<int>(si + 1), is, 0.0, 0.0, false});
          }
        }
      }
    }
  }
  return out;
}

void write_opgpa_csv(const std::vector<OpgpaRecord>& records,
                     const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << "seed,group,subgroup,i_s_bits,snr_opgpa_db,snr_nopgpa_db,feasible\n";
  for (const OpgpaRecord& r : records)
    f << r.trial << ',' << r.group << ',' << r.subgroup << ','
      << fmt6(r.i_s_bits) << ',' << fmt6(r.snr_opgpa_db) << ','
      << fmt6(r.snr_nopgpa_db) << ',' << (r.feasible ? 1 : 0) << '\n';
}

}  // namespace mmpgp
