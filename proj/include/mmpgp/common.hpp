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

#pragma once

#include <armadillo>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace mmpgp {

using cx = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

// All SNRs are stored linear internally; dB appears only at I/O boundaries.
inline double db_to_lin(double db) { return std::pow(10.0, db / 10.0); }
inline double lin_to_db(double lin) { return 10.0 * std::log10(lin); }

// A channel or precoder matrix lost full row rank (or is numerically singular).
struct RankDeficientError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An enumeration guard tripped (constellation or quadrature grid too large).
struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mmpgp
