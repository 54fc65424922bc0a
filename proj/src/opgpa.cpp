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

#include "mmpgp/opgpa.hpp"

#include <map>
#include <mutex>

namespace mmpgp {

namespace {

constexpr double kFloorDb = -20.0;
constexpr double kCeilDb = 60.0;
constexpr double kBisectTolBits = 0.005;

double block_mi_at(double snr_db, const Constellation& c, arma::uword order,
                   BlockCache* cache) {
  const double snr = db_to_lin(snr_db);
  PgpBlock blk = cache != nullptr ? cache->at(snr, c, order)
                                  : optimize_block_at(snr, c, order);
  const arma::cx_mat vh = blk.v.t();
  arma::cx_mat channel = std::sqrt(snr) * vh.row(0);
  return mi_gh(channel, arma::eye<arma::cx_mat>(2, 2), 1.0, c, order).bits;
}

// shared read-mostly memo, keyed by (I_S, M, L)
std::map<std::tuple<long long, arma::uword, arma::uword>, double>&
memo_table() {
  static std::map<std::tuple<long long, arma::uword, arma::uword>, double> t;
  return t;
}
std::mutex& memo_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

double snr_required(double i_s_bits, const Constellation& c, arma::uword order,
                    BlockCache* cache) {
  const double top = 2.0 * c.bits();
  if (i_s_bits < 0.0)
    throw std::invalid_argument("snr_required: target must be non-negative");
  if (i_s_bits >= top - 1e-9)
    throw InfeasibleTargetError(
        "snr_required: target of " + std::to_string(i_s_bits) +
        " bits sits at or above the two-symbol saturation of " +
        std::to_string(top) + " bits");

  const auto key = std::make_tuple(std::llround(i_s_bits * 1e6), c.m(), order);
  {
    std::lock_guard<std::mutex> lock(memo_mutex());
    auto it = memo_table().find(key);
    if (it != memo_table().end()) return it->second;
  }

  double lo = kFloorDb, hi = kCeilDb;
  if (block_mi_at(lo, c, order, cache) >= i_s_bits) {
    // any epsilon SNR suffices; report the bracket floor
    std::lock_guard<std::mutex> lock(memo_mutex());
    memo_table()[key] = db_to_lin(lo);
    return db_to_lin(lo);
  }
  if (block_mi_at(hi, c, order, cache) < i_s_bits)
    throw InfeasibleTargetError(
        "snr_required: target not reachable within the +60 dB bracket");

  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 60; ++it) {
    mid = 0.5 * (lo + hi);
    const double mi = block_mi_at(mid, c, order, cache);
    if (std::abs(mi - i_s_bits) <= kBisectTolBits * 0.5) break;
    if (mi < i_s_bits)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-4) break;
  }
  const double snr = db_to_lin(mid);
  std::lock_guard<std::mutex> lock(memo_mutex());
  memo_table()[key] = snr;
  return snr;
}

OpgpaResult opgpa_gains(const EffectiveChannel& eff, const QosTarget& target,
                        const Constellation& c, arma::uword order,
                        BlockCache* cache) {
  if (eff.s_eff.is_empty() || eff.s_eff.min() <= 0.0)
    throw std::invalid_argument("opgpa_gains: all s_eff must be positive");
  if (target.snr1 && !(*target.snr1 > target.snr0))
    throw std::invalid_argument("opgpa_gains: snr1 must exceed snr0");

  OpgpaResult res;
  res.snr_req = snr_required(target.i_s_bits, c, order, cache);
  // 2 k_m s_eff,m^2 = snr_req for every stream
  res.gains = res.snr_req / (2.0 * arma::square(eff.s_eff));
  res.feasible = true;
  if (target.snr1) {
    const double need =
        std::sqrt(target.snr0 * res.snr_req / *target.snr1);
    res.feasible = eff.s_eff.min() >= need;
  }
  std::tie(res.snr_opgpa, res.snr_nopgpa) =
      average_snrs(eff, target, res.snr_req);
  return res;
}

std::pair<double, double> average_snrs(const EffectiveChannel& eff,
                                       const QosTarget& target,
                                       double snr_req) {
  if (eff.s_eff.is_empty() || eff.s_eff.min() <= 0.0)
    throw std::invalid_argument("average_snrs: all s_eff must be positive");
  const double n = static_cast<double>(eff.s_eff.n_elem);
  const double opgpa = target.snr0 * snr_req / n *
                       arma::accu(1.0 / arma::square(eff.s_eff));
  const double worst = eff.s_eff.min();
  const double nopgpa = target.snr0 * snr_req / (worst * worst);
  return {opgpa, nopgpa};
}

}  // namespace mmpgp
