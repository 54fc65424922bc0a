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
// Outer precoders for a (sub-)group channel: plain zero forcing, zero
// forcing combined with per-UE 2x2 MI-maximizing blocks on the diagonalized
// effective channel (ZF-PGP), and the virtual-antenna variant that works on
// the raw singular values (VAAC-PGP).

#pragma once

#include <map>
#include <mutex>
#include <vector>

#include "mmpgp/gh_mi.hpp"
#include "mmpgp/virtual_domain.hpp"

namespace mmpgp {

enum class PrecoderKind { kZfp, kZfPgp, kVaacPgp };

const char* to_string(PrecoderKind kind);

// A precoder held in factored form P = left * diag(sv) * right_block, where
// right_block is block-diagonal with one unit-norm 1x2 row per stream pair
// (identity for single-symbol precoders). matrix() assembles the dense form.
struct PrecoderFactors {
  PrecoderKind kind = PrecoderKind::kZfp;
  arma::cx_mat left;                    // pseudo-inverse or right-singular factor
  arma::vec sv;                         // per-stream diagonal amplitudes
  std::vector<arma::cx_rowvec> blocks;  // unit-norm 1x2 rows (PGP kinds only)
  double power_budget = 0.0;            // required trace(P P^H)
  double zf_gain = 0.0;                 // w^2: post-ZF scalar gain (ZFP only)

  arma::cx_mat matrix() const;
  double power() const;  // trace(P P^H)
};

// Per-UE effective singular values of the zero-forced channel:
// s_eff,m = (sum_m' |u(m,m')|^2 / s(m')^2)^(-1/2), identically the inverse
// norm of column m of the channel pseudo-inverse.
struct EffectiveChannel {
  arma::vec s_eff;
  arma::vec zf_weights;  // w_m = 1 / s_eff,m
};

// Zero-forcing precoder: H * P = w^2 * I with trace(P P^H) = N_g.
// Throws RankDeficientError when the channel lacks full row rank.
PrecoderFactors zfp(const VirtualChannel& hv);

EffectiveChannel effective_singular_values(const VirtualChannel& hv);

// One optimized 2x2 PGP block: the receive model is
//   y = sqrt(snr_eff) * (first row of v^H) * [x1; x2] + n,  n ~ CN(0, 1),
// with v unitary. mi_bits is the GH-evaluated MI of that model.
struct PgpBlock {
  arma::cx_mat v;       // 2x2 unitary
  double mi_bits = 0.0;
  double snr_eff = 0.0;
};

// Maximizes the block MI over unitaries parameterized by (theta, phi):
// the dead second output makes the MI depend on the first row of v^H only,
// so the search runs over that row and the unitary is completed afterwards.
// Coarse grid first, then coordinate-descent refinement to 1e-4 bits.
PgpBlock optimize_pgp_block(double s_eff, double snr0, const Constellation& c,
                            arma::uword order);

// Same optimizer keyed directly by the effective block SNR (the optimum
// depends on snr_eff alone).
PgpBlock optimize_block_at(double snr_eff, const Constellation& c,
                           arma::uword order);

// MI of one stream through a given block at an exact effective SNR (used to
// re-evaluate cached blocks away from their quantized optimization point).
double pgp_stream_mi(double snr_eff, const PgpBlock& block,
                     const Constellation& c, arma::uword order);

// Optimal blocks memoized on a 0.25 dB effective-SNR grid; MI is always
// re-evaluated at the exact SNR by the callers.
class BlockCache {
 public:
  PgpBlock at(double snr_eff, const Constellation& c, arma::uword order);

 private:
  std::map<std::tuple<long long, arma::uword, arma::uword>, PgpBlock> blocks_;
  std::mutex mu_;
};

struct GroupPrecoderResult {
  PrecoderFactors precoder;
  arma::vec mi_per_ue;       // bits per UE (two symbols per UE for PGP kinds)
  arma::vec gauss_per_ue;    // Gaussian-input capacity on the same scalars
  EffectiveChannel eff;      // ZF-PGP only
  std::vector<PgpBlock> blocks;
};

// ZF + VAAC + per-UE PGP blocks. UE m sees the diagonal effective channel
// s_eff,m with amplitude sqrt(2) on the useful stream;
// trace(P P^H) = 2 * N_g holds by construction.
GroupPrecoderResult zf_pgp(const VirtualChannel& hv, double snr0,
                           const Constellation& c, arma::uword order,
                           BlockCache* cache = nullptr);

// PGP on the raw singular values (square group channels only). Each stream
// faces s_m instead of s_eff,m; decoding is modeled as the inner product
// with the matching left singular vector. With rotate set, the
// stream-to-UE assignment cycles across symbol slots and every UE reports
// the long-run average MI.
GroupPrecoderResult vaac_pgp(const VirtualChannel& hv, double snr0,
                             const Constellation& c, arma::uword order,
                             bool rotate = false, BlockCache* cache = nullptr);

// Free-amplitude-split re-optimization: splits the per-pair power budget 2
// as (s1, s2) = sqrt(2)*(cos a, sin a) and re-optimizes the rotation at each
// split. Reports where the optimum lands; below saturation it must sit at
// (sqrt(2), 0).
struct PowerSplitResult {
  double s_useful = 0.0;   // optimal amplitude on the live stream
  double s_virtual = 0.0;  // optimal amplitude on the dead stream
  double mi_bits = 0.0;
  bool degenerate = false;  // MI flat over the sweep (vanishing signal)
};

PowerSplitResult optimize_power_split(double snr_eff, const Constellation& c,
                                      arma::uword order,
                                      BlockCache* cache = nullptr);

bool power_split_check(double snr_eff, const Constellation& c,
                       arma::uword order, double tolerance,
                       PowerSplitResult* detail = nullptr,
                       BlockCache* cache = nullptr);

}  // namespace mmpgp
