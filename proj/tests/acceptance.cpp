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
// Acceptance suite: one pass/fail line per criterion, each pinned to its
// tolerance in code. Run all with no arguments, or a single criterion with
// --only <n>.

#include <chrono>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <vector>

#include "mmpgp/harness.hpp"
#include "mmpgp/rng.hpp"

using namespace mmpgp;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  template <typename T>
  Outcome& operator<<(const T& v) {
    detail << v;
    return *this;
  }
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v.empty() ? 0.0 : v[v.size() / 2];
}

arma::cx_mat random_cx(arma::uword r, arma::uword c, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0 / std::sqrt(2.0));
  arma::cx_mat m(r, c);
  for (auto& v : m) v = cx(g(rng), g(rng));
  return m;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// ---------------------------------------------------------------------
// 1. quadrature vs Monte-Carlo oracle on random 2x2 QPSK channels
Outcome c1_gh_matches_monte_carlo() {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  const Constellation qpsk = Constellation::qam(4);
  const arma::cx_mat g2 = arma::eye<arma::cx_mat>(2, 2);
  double worst = 0.0;
  for (int ch = 0; ch < 10; ++ch) {
    auto rng = make_stream(9001, ch);
    const arma::cx_mat h = random_cx(2, 2, rng);
    for (const double snr_db : {0.0, 6.0, 12.0}) {
      const double sigma = std::sqrt(1.0 / db_to_lin(snr_db));
      const double gh = mi_gh(h, g2, sigma, qpsk, 10).bits;
      auto mc_rng = make_stream(9002, 100 * ch + static_cast<int>(snr_db));
      const MiEstimate mc = mi_mc(h, g2, sigma, qpsk, 1000000, mc_rng);
      const double err = std::abs(gh - mc.bits);
      const double allowed = std::max(0.03, 3.0 * mc.std_error);
      worst = std::max(worst, err / allowed);
      out.require(err <= allowed, "gh/mc gap " + std::to_string(err) +
                                      " bits at " + std::to_string(snr_db) +
                                      " dB");
    }
  }
  const double dt = seconds_since(t0);
  out.require(dt < 120.0, "runtime " + std::to_string(dt) + " s >= 120 s");
  out << "worst gap at " << worst << " of allowance over 30 cases, " << dt
      << " s";
  return out;
}

// 2. quadrature order convergence on the same channel set
Outcome c2_gh_order_convergence() {
  Outcome out;
  const Constellation qpsk = Constellation::qam(4);
  const arma::cx_mat g2 = arma::eye<arma::cx_mat>(2, 2);
  double worst = 0.0;
  for (int ch = 0; ch < 10; ++ch) {
    auto rng = make_stream(9001, ch);
    const arma::cx_mat h = random_cx(2, 2, rng);
    for (const double snr_db : {0.0, 6.0, 12.0}) {
      const double sigma = std::sqrt(1.0 / db_to_lin(snr_db));
      const double a = mi_gh(h, g2, sigma, qpsk, 10).bits;
      const double b = mi_gh(h, g2, sigma, qpsk, 14).bits;
      worst = std::max(worst, std::abs(a - b));
    }
  }
  out.require(worst <= 0.01, "order-10 vs order-14 drift " +
                                 std::to_string(worst) + " bits");
  out << "max drift " << worst << " bits";
  return out;
}

// 3. saturation at 40 dB effective SNR with 16-QAM
Outcome c3_high_snr_saturation() {
  Outcome out;
  const Constellation m16 = Constellation::qam(16);
  const double snr_eff = db_to_lin(40.0);
  const PgpBlock blk = optimize_block_at(snr_eff, m16, 10);
  out.require(blk.mi_bits >= 7.9, "two-symbol rate " +
                                      std::to_string(blk.mi_bits) +
                                      " < 7.9 bits");
  arma::cx_mat scalar(1, 1);
  scalar(0, 0) = cx(std::sqrt(snr_eff), 0.0);
  const double zf_mi =
      mi_gh(scalar, arma::cx_mat(1, 1, arma::fill::ones), 1.0, m16, 10).bits;
  out.require(zf_mi >= 3.9,
              "single-symbol rate " + std::to_string(zf_mi) + " < 3.9 bits");
  out << "two-symbol " << blk.mi_bits << " / 8 bits, single-symbol " << zf_mi
      << " / 4 bits";
  return out;
}

// 4. algebraic identities, property-tested over 100+ random instances each
Outcome c4_algebraic_identities() {
  Outcome out;
  const Constellation qpsk = Constellation::qam(4);
  auto rng = make_stream(9004, 0);
  double w_zf = 0.0, w_seff = 0.0, w_trace = 0.0, w_norm = 0.0, w_gain = 0.0;

  for (int trial = 0; trial < 100; ++trial) {
    const arma::uword n = 2 + trial % 4;
    const arma::uword d = n + trial % 3;
    const VirtualChannel hv = VirtualChannel::from_matrix(
        random_cx(n, d, rng), arma::regspace<arma::uvec>(0, d - 1));

    const PrecoderFactors p = zfp(hv);
    const arma::cx_mat hp = hv.h * p.matrix();
    w_zf = std::max(w_zf,
                    arma::abs(hp - p.zf_gain *
                                       arma::eye<arma::cx_mat>(n, n)).max());
    w_trace = std::max(w_trace, std::abs(p.power() - double(n)));

    const EffectiveChannel eff = effective_singular_values(hv);
    const arma::cx_mat pinv = arma::pinv(hv.h);
    for (arma::uword m = 0; m < n; ++m)
      w_seff = std::max(w_seff, std::abs(eff.s_eff[m] * arma::norm(pinv.col(m), 2) - 1.0));

    BlockCache cache;
    const GroupPrecoderResult res = zf_pgp(hv, 2.0, qpsk, 4, &cache);
    w_trace = std::max(w_trace, std::abs(res.precoder.power() - 2.0 * n));

    // fixed-rate gains: 2 k s^2 must reproduce the target SNR exactly
    const double snr_req = 1.0 + trial;
    const arma::vec gains = snr_req / (2.0 * arma::square(eff.s_eff));
    for (arma::uword m = 0; m < n; ++m)
      w_gain = std::max(w_gain, std::abs(2.0 * gains[m] * eff.s_eff[m] *
                                             eff.s_eff[m] -
                                         snr_req));
  }

  // scaled vs normalized reception models agree through the quadrature
  for (int trial = 0; trial < 100; ++trial) {
    std::uniform_real_distribution<double> u(0.2, 3.0);
    const double c = u(rng);
    const double theta = u(rng) * 0.5, phi = u(rng);
    arma::cx_mat vh(2, 2);
    vh(0, 0) = cx(std::cos(theta), 0.0);
    vh(0, 1) = std::sin(theta) * std::polar(1.0, phi);
    vh(1, 0) = -std::sin(theta) * std::polar(1.0, -phi);
    vh(1, 1) = cx(std::cos(theta), 0.0);
    arma::cx_mat raw(2, 2, arma::fill::zeros);
    raw(0, 0) = cx(c, 0.0);
    const double a =
        mi_gh(raw * vh, arma::eye<arma::cx_mat>(2, 2), 1.0, qpsk, 6).bits;
    arma::cx_mat norm(2, 2, arma::fill::zeros);
    norm(0, 0) = cx(1.0, 0.0);
    const double b = mi_gh(norm * vh, arma::eye<arma::cx_mat>(2, 2), 1.0 / c,
                           qpsk, 6)
                         .bits;
    w_norm = std::max(w_norm, std::abs(a - b));
  }

  out.require(w_zf < 1e-8, "zero-forcing exactness");
  out.require(w_seff < 1e-9, "effective singular value identity");
  out.require(w_trace < 1e-9, "trace power constraints");
  out.require(w_norm < 1e-6, "normalized-model MI equality");
  out.require(w_gain < 1e-12, "gain closed form");
  out << "worst: zf " << w_zf << ", s_eff " << w_seff << ", trace " << w_trace
      << ", model-equivalence " << w_norm << ", gains " << w_gain;
  return out;
}

// 5. free power split lands on the live stream
Outcome c5_vaac_power_split() {
  Outcome out;
  const Constellation qpsk = Constellation::qam(4);
  BlockCache cache;
  for (const double snr_db : {4.0, 8.0, 12.0}) {
    PowerSplitResult detail;
    const bool ok = power_split_check(db_to_lin(snr_db), qpsk, 8, 1e-3,
                                      &detail, &cache);
    out.require(ok && !detail.degenerate,
                "split at " + std::to_string(snr_db) + " dB landed at " +
                    std::to_string(detail.s_useful));
    out << "@" << snr_db << " dB s1 = " << detail.s_useful << "; ";
  }
  return out;
}

// 6. uniform-QoS power allocation on 4-UE groups drawn from the
//    long-range deployment
Outcome c6_opgpa_qos_and_savings() {
  Outcome out;
  const auto t0 = std::chrono::steady_clock::now();
  const Constellation m16 = Constellation::qam(16);
  BlockCache cache;
  const ScenarioConfig cfg = scenario2();
  const VcmBasis basis = vcm_basis(cfg.geometry);
  const double snr0 = db_to_lin(20.0);

  double worst_qos = 0.0;
  bool order_ok = true;
  std::vector<double> savings_db;

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto rng = make_stream(cfg.seed, seed);
    const CellChannel cell =
        sample_cell(cfg.n_ue, cfg.geometry, cfg.propagation, rng);
    const arma::cx_mat hv = project(cell.rows, basis);
    const PreselectionResult ps = preselect(hv, cfg.n_beams);
    GroupingConfig gc = cfg.grouping;
    gc.auto_split = false;
    const GroupPlan plan = partition_cfsdm(cell, hv, ps, gc);

    for (const Group& group : plan.groups) {
      if (group.nlos || group.ue_indices.n_elem < 4) continue;
      Group quartet = group;
      quartet.ue_indices = group.ue_indices.head(4);
      std::vector<std::string> notes;
      const auto subs = subgroup(hv, quartet, ps, SubgroupMode::kSimple,
                                 gc, &notes);
      if (subs.size() != 1 || subs[0].channel.h.n_rows != 4 ||
          !notes.empty())
        continue;
      EffectiveChannel eff;
      try {
        eff = effective_singular_values(subs[0].channel);
      } catch (const RankDeficientError&) {
        continue;
      }
      eff.s_eff *= std::sqrt(snr0);
      eff.zf_weights = 1.0 / eff.s_eff;

      for (const double is : {2.0, 3.0, 4.0}) {
        QosTarget target;
        target.i_s_bits = is;
        target.snr0 = snr0;
        const OpgpaResult r = opgpa_gains(eff, target, m16, 10, &cache);
        for (arma::uword m = 0; m < 4; ++m) {
          const double snr_eff =
              2.0 * r.gains[m] * eff.s_eff[m] * eff.s_eff[m];
          const PgpBlock blk = cache.at(snr_eff, m16, 10);
          const double mi = pgp_stream_mi(snr_eff, blk, m16, 10);
          worst_qos = std::max(worst_qos, std::abs(mi - is));
        }
        order_ok &= r.snr_opgpa <= r.snr_nopgpa + 1e-12;
        if (is == 3.0)
          savings_db.push_back(lin_to_db(r.snr_nopgpa / r.snr_opgpa));
      }
    }
  }

  const double med_savings = median(savings_db);
  out.require(worst_qos <= 0.02,
              "worst per-UE deviation " + std::to_string(worst_qos) + " bits");
  out.require(order_ok, "allocation average exceeded the uniform average");
  out.require(med_savings >= 10.0,
              "median savings " + std::to_string(med_savings) +
                  " dB < 10 dB (the averages of the two schemes differ by at "
                  "most 10*log10(4) = 6.02 dB for 4-UE groups)");
  const double dt = seconds_since(t0);
  out.require(dt < 600.0, "runtime " + std::to_string(dt) + " s >= 600 s");
  out << "worst QoS gap " << worst_qos << " bits over " << savings_db.size()
      << " groups; median savings " << med_savings << " dB; " << dt << " s";
  return out;
}

// 7. precoder ordering over short-range deployment draws at 20 dB
Outcome c7_precoder_ordering() {
  Outcome out;
  ScenarioConfig cfg = scenario1();
  cfg.snr_sweep_db = {20.0};
  cfg.operating_snr_db = 20.0;
  cfg.trials = 20;
  cfg.grouping.auto_split = false;

  const ScenarioOutcome res = run_scenario(cfg);
  out.require(res.completed_trials >= 18, "too many aborted trials");

  // per (trial, group): sum MI per precoder, plus the group's boost
  struct Cell {
    std::map<std::string, double> sum;
    double boost = 0.0;
  };
  std::map<std::pair<std::uint64_t, int>, Cell> cells;
  for (const RunRecord& r : res.records) {
    auto& c = cells[{r.trial, r.group}];
    c.sum[r.precoder] += r.mi_bits;
    c.boost = r.group_boost_db;
  }

  std::map<int, std::vector<double>> d_vaac, d_zf;
  std::vector<double> ratios;
  for (const auto& [key, c] : cells) {
    if (c.sum.count("VAAC_PGP") && c.sum.count("ZF_PGP"))
      d_vaac[key.second].push_back(c.sum.at("VAAC_PGP") - c.sum.at("ZF_PGP"));
    if (c.sum.count("ZF_PGP") && c.sum.count("ZFP")) {
      d_zf[key.second].push_back(c.sum.at("ZF_PGP") - c.sum.at("ZFP"));
      if (c.boost == 0.0 && c.sum.at("ZFP") > 1e-9)
        ratios.push_back(c.sum.at("ZF_PGP") / c.sum.at("ZFP"));
    }
  }
  // equality within the block optimizer's refinement tolerance counts as
  // ordered: at saturation the two-symbol schemes coincide and the summed
  // per-UE values wobble at the 1e-4-bit optimization tolerance
  constexpr double kOrderTol = 1e-3;
  for (const auto& [group, diffs] : d_vaac) {
    const double med = median(diffs);
    out.require(med >= -kOrderTol, "group " + std::to_string(group) +
                                       " median VAAC_PGP-ZF_PGP = " +
                                       std::to_string(med));
  }
  for (const auto& [group, diffs] : d_zf) {
    const double med = median(diffs);
    out.require(med >= -kOrderTol, "group " + std::to_string(group) +
                                       " median ZF_PGP-ZFP = " +
                                       std::to_string(med));
  }
  const double med_ratio = median(ratios);
  out.require(med_ratio >= 1.5,
              "median ZF_PGP/ZFP ratio " + std::to_string(med_ratio));
  out << "median ZF_PGP/ZFP ratio " << med_ratio << " on " << ratios.size()
      << " open-path groups";
  return out;
}

// 8. co-scheduled sub-group interference: oracle agreement and rate loss
Outcome c8_jsdm_mai() {
  Outcome out;

  // covariance against a 1e6-draw symbol oracle
  auto rng = make_stream(9008, 0);
  const arma::cx_mat h = random_cx(3, 4, rng);
  PrecoderFactors p;
  p.left = random_cx(4, 4, rng);
  p.sv = arma::ones<arma::vec>(4);
  p.power_budget = arma::accu(arma::square(arma::abs(p.left)));
  const arma::cx_mat k = mai_covariance(h, p);
  const arma::cx_mat hp = h * p.matrix();
  const Constellation qpsk = Constellation::qam(4);
  std::uniform_int_distribution<arma::uword> pick(0, 3);
  arma::cx_mat acc(3, 3, arma::fill::zeros);
  arma::cx_vec x(4);
  for (int i = 0; i < 1000000; ++i) {
    for (auto& xi : x) xi = qpsk.points[pick(rng)];
    const arma::cx_vec y = hp * x;
    acc += y * y.t();
  }
  acc /= 1e6;
  const double cov_err = arma::abs(acc - k).max() / arma::abs(k).max();
  out.require(cov_err <= 0.02,
              "covariance oracle gap " + std::to_string(cov_err));

  // same seeds, same cells: co-scheduling must lose to frequency splitting
  ScenarioConfig sg = scenario1();
  sg.snr_sweep_db = {20.0};
  sg.operating_snr_db = 20.0;
  sg.trials = 10;
  sg.grouping.auto_split = false;
  sg.precoders = {PrecoderKind::kZfPgp};
  ScenarioConfig js = sg;
  js.mode = SubgroupMode::kJsdmFa;

  const ScenarioOutcome rs = run_scenario(sg);
  const ScenarioOutcome rj = run_scenario(js);
  std::map<std::uint64_t, double> sum_sg, sum_js;
  for (const auto& r : rs.records) sum_sg[r.trial] += r.mi_bits;
  for (const auto& r : rj.records) sum_js[r.trial] += r.mi_bits;
  std::vector<double> gaps;
  bool mai_positive = false;
  for (const auto& r : rj.records) mai_positive |= r.mai_power > 0.0;
  for (const auto& [trial, se] : sum_sg)
    if (sum_js.count(trial)) gaps.push_back(se - sum_js[trial]);
  out.require(!gaps.empty(), "no paired trials");
  out.require(median(gaps) > 0.0,
              "median SG advantage " + std::to_string(median(gaps)) + " bits");
  out.require(mai_positive, "no positive interference power recorded");
  out << "covariance gap " << cov_err << "; median SG advantage "
      << median(gaps) << " bits over " << gaps.size() << " trials";
  return out;
}

// 9. pre-selection capture on short-range deployment draws
Outcome c9_preselection_capture() {
  Outcome out;
  const ScenarioConfig cfg = scenario1();
  const VcmBasis basis = vcm_basis(cfg.geometry);
  std::vector<double> pf;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto rng = make_stream(cfg.seed, seed);
    const CellChannel cell =
        sample_cell(cfg.n_ue, cfg.geometry, cfg.propagation, rng);
    const arma::cx_mat hv = project(cell.rows, basis);
    pf.push_back(preselect(hv, 20).captured_fraction);
  }
  const double med = median(pf);
  out.require(med >= 0.95, "median captured fraction " + std::to_string(med) +
                               " < 0.95 (3-D elevation geometry spreads each "
                               "UE over more beams than a flat layout)");
  out << "median P_F " << med << ", range [" << *std::min_element(pf.begin(), pf.end())
      << ", " << *std::max_element(pf.begin(), pf.end()) << "]";
  return out;
}

// 10. preset runs emit the side-by-side comparison against the published
//     operating points; the deployment median lands in the published
//     figure's vicinity (exact reproduction is out of reach by design)
Outcome c10_reference_comparison_outputs() {
  Outcome out;
  namespace fs = std::filesystem;
  ScenarioConfig cfg = scenario1();
  cfg.trials = 20;
  cfg.snr_sweep_db = {30.0};
  cfg.precoders = {PrecoderKind::kZfPgp};

  const fs::path dir =
      fs::temp_directory_path() / "mmpgp_acceptance_reference";
  fs::remove_all(dir);
  const ScenarioOutcome res = run_scenario(cfg);
  out.require(!res.records.empty(), "preset run produced no records");
  const Summary s = aggregate(res.records, cfg);
  emit(res, s, cfg, dir.string());

  const double rel = std::abs(s.se_median - *cfg.ref_se) / *cfg.ref_se;
  out.require(rel <= 0.30, "median SE " + std::to_string(s.se_median) +
                               " bps/Hz sits " + std::to_string(100 * rel) +
                               "% from the published " +
                               std::to_string(*cfg.ref_se));

  std::ifstream f(dir / "summary.txt");
  std::stringstream ss;
  ss << f.rdbuf();
  const std::string text = ss.str();
  out.require(text.find("se_mean_bps_hz:") != std::string::npos,
              "summary lacks the simulated figure");
  out.require(text.find("ref_se_bps_hz: 26.33") != std::string::npos,
              "summary lacks the reference figure");
  out.require(text.find("ref_seua_bps_hz_m2: 0.3647") != std::string::npos,
              "summary lacks the reference density");
  out.require(fs::exists(dir / "run.csv") && fs::exists(dir / "report.txt"),
              "missing output files");
  fs::remove_all(dir);
  out << "median SE " << s.se_median << " vs published " << *cfg.ref_se
      << " bps/Hz; comparison files emitted";
  return out;
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> fn;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all = {
      {1, "gh_matches_monte_carlo", c1_gh_matches_monte_carlo},
      {2, "gh_order_convergence", c2_gh_order_convergence},
      {3, "high_snr_saturation", c3_high_snr_saturation},
      {4, "algebraic_identities", c4_algebraic_identities},
      {5, "vaac_power_split", c5_vaac_power_split},
      {6, "opgpa_qos_and_savings", c6_opgpa_qos_and_savings},
      {7, "precoder_ordering", c7_precoder_ordering},
      {8, "jsdm_mai", c8_jsdm_mai},
      {9, "preselection_capture", c9_preselection_capture},
      {10, "reference_comparison_outputs", c10_reference_comparison_outputs},
  };
  return all;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc)
      only = std::atoi(argv[++i]);
    else if (std::strcmp(argv[i], "--list") == 0) {
      for (const auto& c : criteria())
        std::cout << c.id << " " << c.name << "\n";
      return 0;
    }
  }

  int failures = 0;
  for (const auto& c : criteria()) {
    if (only != 0 && c.id != only) continue;
    Outcome out;
    try {
      out = c.fn();
    } catch (const std::exception& e) {
      out.pass = false;
      out << "exception: " << e.what();
    }
    std::cout << (out.pass ? "[PASS] " : "[FAIL] ") << c.id << " " << c.name
              << ": " << out.detail.str() << std::endl;
    failures += out.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
