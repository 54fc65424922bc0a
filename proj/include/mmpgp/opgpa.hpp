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
// Per-stream power allocation that hits a uniform throughput target: the
// optimal block depends on the effective SNR alone, so one inverted
// MI-vs-SNR map serves every stream, and the closed-form gains
// 2 k_m s_eff,m^2 = SNR_req equalize the delivered rate.

#pragma once

#include <optional>

#include "mmpgp/precoding.hpp"

namespace mmpgp {

struct QosTarget {
  double i_s_bits = 0.0;             // per-UE throughput target, [0, 2 log2 M)
  double snr0 = 1.0;                 // initial linear SNR
  std::optional<double> snr1;        // optional linear SNR cap, > snr0
};

struct OpgpaResult {
  arma::vec gains;          // per-stream k_m
  double snr_req = 0.0;     // effective SNR achieving the target
  double snr_opgpa = 0.0;   // average SNR with per-stream gains
  double snr_nopgpa = 0.0;  // average SNR when everyone uses the worst gain
  bool feasible = true;     // cap satisfied (never silently clipped)
};

// Requested target cannot be reached (saturation or bracket exhausted).
struct InfeasibleTargetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Inverts the monotone map snr_eff -> max block MI by bisection over
// [-20, +60] dB to 0.005 bits; results are memoized per (I_S, M, L).
double snr_required(double i_s_bits, const Constellation& c, arma::uword order,
                    BlockCache* cache = nullptr);

OpgpaResult opgpa_gains(const EffectiveChannel& eff, const QosTarget& target,
                        const Constellation& c, arma::uword order,
                        BlockCache* cache = nullptr);

// (snr_opgpa, snr_nopgpa) for a known snr_req.
std::pair<double, double> average_snrs(const EffectiveChannel& eff,
                                       const QosTarget& target,
                                       double snr_req);

}  // namespace mmpgp
