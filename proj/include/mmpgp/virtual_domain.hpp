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
// Virtual (beam-domain) channel representation: the unitary Kronecker-DFT
// basis, projection into it, and power-ranked beam pre-selection.

#pragma once

#include "mmpgp/channel.hpp"
#include "mmpgp/common.hpp"

namespace mmpgp {

// Unitary virtual channel basis B = F_{n_uz} (x) F_{n_ux}, with F the
// 1/sqrt(N)-scaled DFT matrix.
struct VcmBasis {
  arma::cx_mat b;  // N_T x N_T
};

VcmBasis vcm_basis(const CellGeometry& geom);

// Beam-domain projection H * B. Unitary, so Frobenius norm is preserved.
arma::cx_mat project(const arma::cx_mat& rows, const VcmBasis& basis);
// Inverse projection H_v * B^H.
arma::cx_mat unproject(const arma::cx_mat& rows_v, const VcmBasis& basis);

// Output of the power-ranked pre-selection pass. Ties in beam power break
// toward the lower beam index so the pipeline is deterministic.
struct PreselectionResult {
  arma::uvec beams;             // selected beam indices, descending power
  arma::vec powers;             // matching per-beam powers
  double captured_fraction = 0; // selected power / total power
  arma::umat per_ue_order;      // N_UE x N_sel, per-UE descending power order
};

PreselectionResult preselect(const arma::cx_mat& hv, arma::uword n_select);

// Smallest selection count whose captured fraction reaches the target.
arma::uword beams_for_fraction(const arma::cx_mat& hv, double target_fraction);

// A (sub-)group channel restricted to its retained beams, together with its
// SVD factors h = u * diag(s) * v^H (economy form, singular values
// descending).
struct VirtualChannel {
  arma::cx_mat h;          // N_g x N_d, rows = UEs, columns = retained beams
  arma::cx_mat u;          // N_g x r row-space factor
  arma::vec s;             // singular values
  arma::cx_mat v;          // N_d x r column-space factor
  arma::uvec beam_indices;

  static VirtualChannel from_matrix(arma::cx_mat h, arma::uvec beams);
};

}  // namespace mmpgp
