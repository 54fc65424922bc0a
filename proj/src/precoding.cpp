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

#include "mmpgp/precoding.hpp"

#include <algorithm>
#include <cmath>

namespace mmpgp {

namespace {

constexpr double kRankTol = 1e-8;       // s below kRankTol * s_max counts as zero
constexpr double kRefineTolBits = 1e-4;
constexpr arma::uword kCoarseTheta = 16;
constexpr arma::uword kCoarsePhi = 8;
constexpr double kQuantDb = 0.25;       // block-cache SNR grid

void require_full_row_rank(const VirtualChannel& hv, const char* who) {
  if (hv.h.n_rows > hv.h.n_cols)
    throw RankDeficientError(std::string(who) +
                             ": more UEs than retained beams");
  if (hv.s.is_empty() || hv.s.min() < kRankTol * hv.s.max())
    throw RankDeficientError(std::string(who) +
                             ": group channel is numerically singular");
}

arma::cx_mat pseudo_inverse(const VirtualChannel& hv) {
  return hv.v * arma::diagmat(1.0 / hv.s) * hv.u.t();
}

// Unitary completion of the searched first row: v^H has rows
// [cos(t), sin(t) e^{j p}] and [-sin(t) e^{-j p}, cos(t)].
arma::cx_mat su2(double theta, double phi) {
  const double ct = std::cos(theta), st = std::sin(theta);
  arma::cx_mat vh(2, 2);
  vh(0, 0) = cx(ct, 0.0);
  vh(0, 1) = st * std::polar(1.0, phi);
  vh(1, 0) = -st * std::polar(1.0, -phi);
  vh(1, 1) = cx(ct, 0.0);
  return vh.t();  // return v itself
}

double block_mi(double snr_eff, double theta, double phi,
                const Constellation& c, arma::uword order) {
  const double amp = std::sqrt(std::max(snr_eff, 0.0));
  arma::cx_mat channel(1, 2);
  channel(0, 0) = cx(amp * std::cos(theta), 0.0);
  channel(0, 1) = amp * std::sin(theta) * std::polar(1.0, phi);
  return mi_gh(channel, arma::eye<arma::cx_mat>(2, 2), 1.0, c, order).bits;
}

double wrap_phi(double phi) {
  const double period = kPi / 2.0;  // QAM quarter-turn symmetry
  phi = std::fmod(phi, period);
  return phi < 0.0 ? phi + period : phi;
}

}  // namespace

const char* to_string(PrecoderKind kind) {
  switch (kind) {
    case PrecoderKind::kZfp: return "ZFP";
    case PrecoderKind::kZfPgp: return "ZF_PGP";
    case PrecoderKind::kVaacPgp: return "VAAC_PGP";
  }
  return "?";
}

arma::cx_mat PrecoderFactors::matrix() const {
  if (blocks.empty()) return left * arma::diagmat(sv);
  arma::cx_mat p(left.n_rows, 2 * blocks.size(), arma::fill::zeros);
  for (std::size_t m = 0; m < blocks.size(); ++m)
    p.cols(2 * m, 2 * m + 1) = sv[m] * left.col(m) * blocks[m];
  return p;
}

double PrecoderFactors::power() const {
  const arma::cx_mat p = matrix();
  return arma::accu(arma::square(arma::abs(p)));
}

PrecoderFactors zfp(const VirtualChannel& hv) {
  require_full_row_rank(hv, "zfp");
  const arma::uword n = hv.h.n_rows;
  const arma::cx_mat pinv = pseudo_inverse(hv);
  // H * (c * pinv) = c * I; c fixed by trace(P P^H) = c^2 sum 1/s^2 = N_g
  const double c = std::sqrt(static_cast<double>(n) /
                             arma::accu(1.0 / arma::square(hv.s)));
  PrecoderFactors p;
  p.kind = PrecoderKind::kZfp;
  p.left = pinv;
  p.sv = c * arma::ones<arma::vec>(n);
  p.power_budget = static_cast<double>(n);
  p.zf_gain = c;
  return p;
}

EffectiveChannel effective_singular_values(const VirtualChannel& hv) {
  require_full_row_rank(hv, "effective_singular_values");
  const arma::uword n = hv.h.n_rows;
  EffectiveChannel eff;
  eff.s_eff.set_size(n);
  eff.zf_weights.set_size(n);
  // row-space mixing of the inverse squared singular values; identical to
  // the inverse column norms of the channel pseudo-inverse
  const arma::vec inv_s2 = 1.0 / arma::square(hv.s);
  for (arma::uword m = 0; m < n; ++m) {
    double acc = 0.0;
    for (arma::uword j = 0; j < hv.s.n_elem; ++j)
      acc += std::norm(hv.u(m, j)) * inv_s2[j];
    eff.zf_weights[m] = std::sqrt(acc);
    eff.s_eff[m] = 1.0 / eff.zf_weights[m];
  }
  return eff;
}

PgpBlock optimize_block_at(double snr_eff, const Constellation& c,
                           arma::uword order) {
  snr_eff = std::clamp(snr_eff, 1e-12, 1e12);
  const arma::uword coarse_order = std::min<arma::uword>(order, 4);

  double best_theta = 0.0, best_phi = 0.0;
  double best_mi = -1.0;
  for (arma::uword i = 0; i < kCoarseTheta; ++i) {
    const double theta =
        (static_cast<double>(i) + 0.5) * (kPi / 2.0) / kCoarseTheta;
    for (arma::uword j = 0; j < kCoarsePhi; ++j) {
      const double phi = static_cast<double>(j) * (kPi / 2.0) / kCoarsePhi;
      const double mi = block_mi(snr_eff, theta, phi, c, coarse_order);
      if (mi > best_mi) {
        best_mi = mi;
        best_theta = theta;
        best_phi = phi;
      }
    }
  }

  // coordinate descent at the requested order, step halving
  double theta = best_theta, phi = best_phi;
  double mi = block_mi(snr_eff, theta, phi, c, order);
  double step_t = (kPi / 2.0) / kCoarseTheta;
  double step_p = (kPi / 2.0) / kCoarsePhi;
  for (int sweep = 0; sweep < 40; ++sweep) {
    double gained = 0.0;
    for (int axis = 0; axis < 2; ++axis) {
      const double step = axis == 0 ? step_t : step_p;
      for (const double dir : {+1.0, -1.0}) {
        double t = theta, p = phi;
        if (axis == 0)
          t = std::clamp(theta + dir * step, 0.0, kPi / 2.0);
        else
          p = wrap_phi(phi + dir * step);
        const double cand = block_mi(snr_eff, t, p, c, order);
        if (cand > mi) {
          gained += cand - mi;
          mi = cand;
          theta = t;
          phi = p;
        }
      }
    }
    if (gained < kRefineTolBits) {
      step_t *= 0.5;
      step_p *= 0.5;
      if (step_t < 1e-3 && step_p < 1e-3) break;
    }
  }

  PgpBlock blk;
  blk.v = su2(theta, phi);
  blk.mi_bits = mi;
  blk.snr_eff = snr_eff;
  return blk;
}

PgpBlock optimize_pgp_block(double s_eff, double snr0, const Constellation& c,
                            arma::uword order) {
  if (!(s_eff > 0.0))
    throw std::invalid_argument("optimize_pgp_block: s_eff must be positive");
  return optimize_block_at(2.0 * snr0 * s_eff * s_eff, c, order);
}

PgpBlock BlockCache::at(double snr_eff, const Constellation& c,
                        arma::uword order) {
  snr_eff = std::clamp(snr_eff, 1e-12, 1e12);
  const long long q = std::llround(lin_to_db(snr_eff) / kQuantDb);
  const auto key = std::make_tuple(q, c.m(), order);
  std::lock_guard<std::mutex> lock(mu_);
  auto it = blocks_.find(key);
  if (it != blocks_.end()) return it->second;
  const PgpBlock blk =
      optimize_block_at(db_to_lin(static_cast<double>(q) * kQuantDb), c, order);
  blocks_.emplace(key, blk);
  return blk;
}

double pgp_stream_mi(double snr_eff, const PgpBlock& block,
                     const Constellation& c, arma::uword order) {
  const arma::cx_mat vh = block.v.t();
  arma::cx_mat channel = std::sqrt(std::max(snr_eff, 0.0)) * vh.row(0);
  return mi_gh(channel, arma::eye<arma::cx_mat>(2, 2), 1.0, c, order).bits;
}

namespace {

PgpBlock block_for(double snr_eff, const Constellation& c, arma::uword order,
                   BlockCache* cache) {
  return cache != nullptr ? cache->at(snr_eff, c, order)
                          : optimize_block_at(snr_eff, c, order);
}

}  // namespace

GroupPrecoderResult zf_pgp(const VirtualChannel& hv, double snr0,
                           const Constellation& c, arma::uword order,
                           BlockCache* cache) {
  require_full_row_rank(hv, "zf_pgp");
  if (!(snr0 > 0.0))
    throw std::invalid_argument("zf_pgp: snr0 must be positive");
  const arma::uword n = hv.h.n_rows;

  GroupPrecoderResult res;
  res.eff = effective_singular_values(hv);
  res.precoder.kind = PrecoderKind::kZfPgp;
  res.precoder.left = pseudo_inverse(hv);
  res.precoder.sv = std::sqrt(2.0) * res.eff.s_eff;
  res.precoder.power_budget = 2.0 * static_cast<double>(n);
  res.precoder.blocks.resize(n);
  res.mi_per_ue.set_size(n);
  res.gauss_per_ue.set_size(n);
  res.blocks.resize(n);

  for (arma::uword m = 0; m < n; ++m) {
    const double snr_eff = 2.0 * snr0 * res.eff.s_eff[m] * res.eff.s_eff[m];
    PgpBlock blk = block_for(snr_eff, c, order, cache);
    blk.snr_eff = snr_eff;
    blk.mi_bits = pgp_stream_mi(snr_eff, blk, c, order);
    res.precoder.blocks[m] = arma::cx_mat(blk.v.t()).row(0);
    res.mi_per_ue[m] = blk.mi_bits;
    res.gauss_per_ue[m] = std::log2(1.0 + snr_eff);
    res.blocks[m] = blk;
  }
  return res;
}

GroupPrecoderResult vaac_pgp(const VirtualChannel& hv, double snr0,
                             const Constellation& c, arma::uword order,
                             bool rotate, BlockCache* cache) {
  if (hv.h.n_rows != hv.h.n_cols)
    throw std::invalid_argument("vaac_pgp: group channel must be square");
  if (!(snr0 > 0.0))
    throw std::invalid_argument("vaac_pgp: snr0 must be positive");
  const arma::uword n = hv.h.n_rows;

  GroupPrecoderResult res;
  res.precoder.kind = PrecoderKind::kVaacPgp;
  res.precoder.left = hv.v;  // stream m rides the m-th right singular vector
  res.precoder.sv = std::sqrt(2.0) * arma::ones<arma::vec>(n);
  res.precoder.power_budget = 2.0 * static_cast<double>(n);
  res.precoder.blocks.resize(n);
  res.mi_per_ue.set_size(n);
  res.gauss_per_ue.set_size(n);
  res.blocks.resize(n);

  for (arma::uword m = 0; m < n; ++m) {
    const double s = m < hv.s.n_elem ? hv.s[m] : 0.0;
    const double snr_eff = 2.0 * snr0 * s * s;
    PgpBlock blk = block_for(snr_eff, c, order, cache);
    blk.snr_eff = snr_eff;
    blk.mi_bits = pgp_stream_mi(snr_eff, blk, c, order);
    res.precoder.blocks[m] = arma::cx_mat(blk.v.t()).row(0);
    res.mi_per_ue[m] = blk.mi_bits;
    res.gauss_per_ue[m] = std::log2(1.0 + snr_eff);
    res.blocks[m] = blk;
  }
  if (rotate) {
    // cycling the stream-to-UE assignment equalizes the long-run throughput
    res.mi_per_ue.fill(arma::mean(res.mi_per_ue));
    res.gauss_per_ue.fill(arma::mean(res.gauss_per_ue));
  }
  return res;
}

PowerSplitResult optimize_power_split(double snr_eff, const Constellation& c,
                                      arma::uword order, BlockCache* cache) {
  const double alpha_max = 75.0 * kPi / 180.0;
  auto mi_at = [&](double alpha) {
    const double snr = snr_eff * std::cos(alpha) * std::cos(alpha);
    const PgpBlock blk = block_for(snr, c, order, cache);
    return pgp_stream_mi(snr, blk, c, order);
  };

  PowerSplitResult out;
  const double mi0 = mi_at(0.0);
  if (std::abs(mi0 - mi_at(alpha_max)) < 1e-4) {
    out.degenerate = true;  // vanishing signal: split has no effect
    out.s_useful = std::sqrt(2.0);
    out.s_virtual = 0.0;
    out.mi_bits = mi0;
    return out;
  }

  const arma::uword steps = 16;
  double best_alpha = 0.0, best_mi = mi0;
  for (arma::uword i = 1; i <= steps; ++i) {
    const double a = alpha_max * static_cast<double>(i) / steps;
    const double mi = mi_at(a);
    if (mi > best_mi) {
      best_mi = mi;
      best_alpha = a;
    }
  }
  // golden-section refinement around the grid winner
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = std::max(0.0, best_alpha - alpha_max / steps);
  double hi = std::min(alpha_max, best_alpha + alpha_max / steps);
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = mi_at(x1), f2 = mi_at(x2);
  for (int it = 0; it < 24 && (hi - lo) > 1e-4; ++it) {
    if (f1 >= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = mi_at(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = mi_at(x2);
    }
  }
  const double alpha = 0.5 * (lo + hi);
  out.s_useful = std::sqrt(2.0) * std::cos(alpha);
  out.s_virtual = std::sqrt(2.0) * std::sin(alpha);
  out.mi_bits = mi_at(alpha);
  return out;
}

bool power_split_check(double snr_eff, const Constellation& c,
                       arma::uword order, double tolerance,
                       PowerSplitResult* detail, BlockCache* cache) {
  const PowerSplitResult r = optimize_power_split(snr_eff, c, order, cache);
  if (detail != nullptr) *detail = r;
  return r.degenerate || std::abs(r.s_useful - std::sqrt(2.0)) <= tolerance;
}

}  // namespace mmpgp
