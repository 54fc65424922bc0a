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

#include "mmpgp/virtual_domain.hpp"

#include <algorithm>
#include <numeric>

namespace mmpgp {

namespace {

arma::cx_mat unitary_dft(arma::uword n) {
  arma::cx_mat f(n, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (arma::uword j = 0; j < n; ++j) {
    for (arma::uword k = 0; k < n; ++k) {
      const double ang = -2.0 * kPi * static_cast<double>(j) *
                         static_cast<double>(k) / static_cast<double>(n);
      f(j, k) = scale * std::polar(1.0, ang);
    }
  }
  return f;
}

// descending by power, ties toward the lower index
arma::uvec stable_power_order(const arma::vec& powers) {
  arma::uvec idx(powers.n_elem);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](arma::uword a, arma::uword b) {
    return powers[a] > powers[b];
  });
  return idx;
}

}  // namespace

VcmBasis vcm_basis(const CellGeometry& geom) {
  geom.validate();
  return VcmBasis{arma::kron(unitary_dft(geom.n_uz), unitary_dft(geom.n_ux))};
}

arma::cx_mat project(const arma::cx_mat& rows, const VcmBasis& basis) {
  if (rows.n_cols != basis.b.n_rows)
    throw std::invalid_argument("project: channel/basis dimension mismatch");
  return rows * basis.b;
}

arma::cx_mat unproject(const arma::cx_mat& rows_v, const VcmBasis& basis) {
  if (rows_v.n_cols != basis.b.n_cols)
    throw std::invalid_argument("unproject: channel/basis dimension mismatch");
  return rows_v * basis.b.t();
}

PreselectionResult preselect(const arma::cx_mat& hv, arma::uword n_select) {
  if (n_select < 1 || n_select > hv.n_cols)
    throw std::invalid_argument("preselect: n_select must be in [1, N_T]");

  const arma::vec col_power =
      arma::sum(arma::square(arma::abs(hv)), 0).t();
  const arma::uvec order = stable_power_order(col_power);

  PreselectionResult ps;
  ps.beams = order.head(n_select);
  ps.powers = col_power(ps.beams);
  const double total = arma::accu(col_power);
  ps.captured_fraction = total > 0.0 ? arma::accu(ps.powers) / total : 1.0;

  // per-UE re-arrangement of the selected beams in descending power order
  ps.per_ue_order.set_size(hv.n_rows, n_select);
  for (arma::uword n = 0; n < hv.n_rows; ++n) {
    arma::vec ue_power(n_select);
    for (arma::uword i = 0; i < n_select; ++i) {
      const cx v = hv(n, ps.beams[i]);
      ue_power[i] = v.real() * v.real() + v.imag() * v.imag();
    }
    // rank the selected beams by this UE's power; break ties toward the
    // lower beam index, not the selection position
    arma::uvec idx(n_select);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](arma::uword a, arma::uword b) {
      if (ue_power[a] != ue_power[b]) return ue_power[a] > ue_power[b];
      return ps.beams[a] < ps.beams[b];
    });
    for (arma::uword i = 0; i < n_select; ++i)
      ps.per_ue_order(n, i) = ps.beams[idx[i]];
  }
  return ps;
}

arma::uword beams_for_fraction(const arma::cx_mat& hv, double target_fraction) {
  if (!(target_fraction > 0.0) || target_fraction > 1.0)
    throw std::invalid_argument("beams_for_fraction: target must be in (0, 1]");
  const arma::vec col_power =
      arma::sum(arma::square(arma::abs(hv)), 0).t();
  const arma::uvec order = stable_power_order(col_power);
  const double total = arma::accu(col_power);
  double acc = 0.0;
  for (arma::uword i = 0; i < order.n_elem; ++i) {
    acc += col_power[order[i]];
    if (acc >= target_fraction * total) return i + 1;
  }
  return order.n_elem;
}

VirtualChannel VirtualChannel::from_matrix(arma::cx_mat h, arma::uvec beams) {
  VirtualChannel vc;
  vc.h = std::move(h);
  vc.beam_indices = std::move(beams);
  if (!arma::svd_econ(vc.u, vc.s, vc.v, vc.h))
    throw std::runtime_error("VirtualChannel: SVD failed");
  return vc;
}

}  // namespace mmpgp
