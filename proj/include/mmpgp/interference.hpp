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
// Inter-sub-group interference for co-scheduled (same-subcarrier)
// sub-groups: covariance of the leaked signal, per-UE powers, and the
// resulting effective SNR.

#pragma once

#include <vector>

#include "mmpgp/precoding.hpp"

namespace mmpgp {

// Covariance of the interference seen by a victim sub-group:
// K = H P P^H H^H with H the victim's channel over the interferer's beams
// and P the interferer's precoder (unit-power uncorrelated symbols).
arma::cx_mat mai_covariance(const arma::cx_mat& h_cross,
                            const PrecoderFactors& p_interferer);

// Per-UE totals: diagonal of each covariance, summed over interferers.
arma::vec mai_powers(const std::vector<arma::cx_mat>& covariances);

// Two conventions for folding interference into the per-UE SNR:
//  kPrinted: (1/snr0 + 1/p_total)^-1, the form used by the source analysis
//            (tends to snr0 as interference grows; see the README note);
//  kSinr:    snr0 / (1 + snr0 * p_total), the conventional SINR.
// p_total = 0 returns snr0 under both.
enum class SnrConvention { kPrinted, kSinr };

double effective_snr_jsdm(double snr0, double p_total,
                          SnrConvention conv = SnrConvention::kPrinted);

struct MaiReport {
  std::vector<std::vector<arma::cx_mat>> covariances;  // [victim][interferer]
  std::vector<arma::vec> per_ue_total;                 // [victim](ue)
  std::vector<arma::vec> snr_eff;                      // [victim](ue)
};

// Full pass over the sub-groups of one CFSDM group. cross_channels[l][l']
// is sub-group l's channel over l''s beams (ignored on the diagonal).
MaiReport mai_report(
    const std::vector<std::vector<arma::cx_mat>>& cross_channels,
    const std::vector<PrecoderFactors>& precoders, double snr0,
    SnrConvention conv = SnrConvention::kPrinted);

}  // namespace mmpgp
