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

#include "mmpgp/channel.hpp"

namespace mmpgp {

void CellGeometry::validate() const {
  if (!(r_inner > 0.0) || !(r_outer > r_inner))
    throw std::invalid_argument("CellGeometry: need 0 < r_inner < r_outer");
  if (!(height > 0.0))
    throw std::invalid_argument("CellGeometry: height must be positive");
  if (n_ux < 1 || n_uz < 1)
    throw std::invalid_argument("CellGeometry: need at least one element per axis");
  if (!(spacing > 0.0))
    throw std::invalid_argument("CellGeometry: spacing must be positive");
}

void PropagationParams::validate() const {
  if (!(snr0 > 0.0))
    throw std::invalid_argument("PropagationParams: snr0 must be positive");
  if (!(r_break > 0.0))
    throw std::invalid_argument("PropagationParams: r_break must be positive");
  if (!(k_nlos > k_los))
    throw std::invalid_argument("PropagationParams: need k_nlos > k_los");
  if (!(m_nlos < m_los))
    throw std::invalid_argument("PropagationParams: need m_nlos < m_los");
  if (m_los < 0.5 || m_nlos < 0.5)
    throw std::invalid_argument("PropagationParams: Nakagami shapes must be >= 0.5");
  if (p_block < 0.0 || p_block > 1.0)
    throw std::invalid_argument("PropagationParams: p_block must be in [0, 1]");
}

arma::cx_vec steering_vector(double theta, double phi,
                             const CellGeometry& geom) {
  geom.validate();
  const double ramp_x = -2.0 * kPi * geom.spacing * std::sin(theta) * std::cos(phi);
  const double ramp_z = -2.0 * kPi * geom.spacing * std::cos(theta);

  arma::cx_vec ax(geom.n_ux), az(geom.n_uz);
  for (arma::uword q = 0; q < geom.n_ux; ++q)
    ax[q] = std::polar(1.0, ramp_x * static_cast<double>(q));
  for (arma::uword p = 0; p < geom.n_uz; ++p)
    az[p] = std::polar(1.0, ramp_z * static_cast<double>(p));
  return arma::kron(az, ax);
}

cx sample_fading(double m_shape, std::mt19937_64& rng) {
  if (!(m_shape >= 0.5))
    throw std::invalid_argument("sample_fading: Nakagami shape must be >= 0.5");
  // amplitude^2 ~ Gamma(m, scale 1/m) gives E[g^2] = 1 for any shape
  std::gamma_distribution<double> power(m_shape, 1.0 / m_shape);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  const double g = std::sqrt(power(rng));
  return std::polar(g, phase(rng));
}

double path_snr(double range, bool blocked, const PropagationParams& prop,
                double g_amplitude) {
  prop.validate();
  if (range < prop.r_break)
    throw std::invalid_argument(
        "path_snr: breakpoint model is valid only for range >= r_break");
  const double k = blocked ? prop.k_nlos : prop.k_los;
  return g_amplitude * g_amplitude * prop.snr0 *
         std::pow(prop.r_break / range, k);
}

CellChannel sample_cell(arma::uword n_ue, const CellGeometry& geom,
                        const PropagationParams& prop, std::mt19937_64& rng) {
  geom.validate();
  prop.validate();
  if (n_ue < 1) throw std::invalid_argument("sample_cell: need n_ue >= 1");

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * kPi);

  CellChannel cell;
  cell.rows.set_size(n_ue, geom.n_elements());
  cell.ues.reserve(n_ue);

  for (arma::uword n = 0; n < n_ue; ++n) {
    UeState ue;
    ue.index = n;
    // area-uniform over the annulus: radius^2 uniform on [ri^2, ro^2]
    const double ri2 = geom.r_inner * geom.r_inner;
    const double ro2 = geom.r_outer * geom.r_outer;
    const double horiz = std::sqrt(ri2 + unit(rng) * (ro2 - ri2));
    ue.azimuth = angle(rng);
    ue.range = std::hypot(horiz, geom.height);
    // elevation measured from +z; UE plane sits below the array
    ue.elevation = std::acos(-geom.height / ue.range);
    ue.blocked = unit(rng) < prop.p_block;

    ue.fading = sample_fading(ue.blocked ? prop.m_nlos : prop.m_los, rng);
    ue.snr = path_snr(ue.range, ue.blocked, prop, std::abs(ue.fading));

    const double k = ue.blocked ? prop.k_nlos : prop.k_los;
    const double pl_amp = std::pow(prop.r_break / ue.range, k / 2.0);
    const arma::cx_vec a = steering_vector(ue.elevation, ue.azimuth, geom);
    cell.rows.row(n) = std::conj(ue.fading) * pl_amp * a.t();
    cell.ues.push_back(ue);
  }
  return cell;
}

}  // namespace mmpgp
