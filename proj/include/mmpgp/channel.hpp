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
// Physical downlink channel for a single annular cell: area-uniform UE
// placement, Bernoulli blockage, Nakagami small-scale fading, UPA steering
// vectors, and breakpoint path loss. All objects are immutable after
// construction and safe to share across concurrent trials.

#pragma once

#include <random>
#include <vector>

#include "mmpgp/common.hpp"

namespace mmpgp {

struct CellGeometry {
  double r_inner = 1.0;   // annulus inner radius [m]
  double r_outer = 5.0;   // annulus outer radius [m]
  double height = 3.0;    // BS array height above UE plane [m]
  arma::uword n_ux = 10;  // UPA elements, x direction
  arma::uword n_uz = 10;  // UPA elements, z direction
  double spacing = 0.5;   // element spacing / wavelength

  arma::uword n_elements() const { return n_ux * n_uz; }
  void validate() const;
};

struct PropagationParams {
  double snr0 = 100.0;    // linear SNR at the break distance
  double r_break = 1.0;   // breakpoint distance [m]
  double k_los = 2.0;     // path-loss exponents (k_nlos > k_los)
  double k_nlos = 4.0;
  double m_los = 4.0;     // Nakagami shapes (m_nlos < m_los)
  double m_nlos = 2.0;
  double p_block = 0.2;   // i.i.d. per-UE blockage probability

  void validate() const;
};

struct UeState {
  arma::uword index = 0;
  double range = 0.0;      // 3-D distance from the array [m]
  double azimuth = 0.0;    // from +x [rad]
  double elevation = 0.0;  // from +z [rad]
  bool blocked = false;
  cx fading;               // complex fading coefficient, E|g|^2 = 1
  double snr = 0.0;        // linear breakpoint-law SNR
};

// Downlink matrix, one row per UE. Row n is the Hermitian of UE n's array
// response scaled by the fading coefficient and the path-loss amplitude;
// sqrt(SNR0) stays outside as the transmit-side factor.
struct CellChannel {
  arma::cx_mat rows;  // N_UE x N_T
  std::vector<UeState> ues;
};

// Kronecker UPA response a_z(theta) (x) a_x(theta, phi); every entry has
// unit magnitude, length n_ux * n_uz.
arma::cx_vec steering_vector(double theta, double phi,
                             const CellGeometry& geom);

// Nakagami-m fading with unit spread: amplitude^2 ~ Gamma(m, mean 1),
// phase uniform. m >= 0.5 required.
cx sample_fading(double m_shape, std::mt19937_64& rng);

// g^2 * SNR0 * (r_break / range)^k with k chosen by the blockage state.
// Valid for range >= r_break only.
double path_snr(double range, bool blocked, const PropagationParams& prop,
                double g_amplitude);

// Draws a full cell: positions area-uniform over the annulus, blockage
// i.i.d. Bernoulli, angles from the 3-D geometry against the array height.
CellChannel sample_cell(arma::uword n_ue, const CellGeometry& geom,
                        const PropagationParams& prop, std::mt19937_64& rng);

}  // namespace mmpgp
