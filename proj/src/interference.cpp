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

#include "mmpgp/interference.hpp"

namespace mmpgp {

arma::cx_mat mai_covariance(const arma::cx_mat& h_cross,
                            const PrecoderFactors& p_interferer) {
  const arma::cx_mat p = p_interferer.matrix();
  if (h_cross.n_cols != p.n_rows)
    throw std::invalid_argument(
        "mai_covariance: cross channel and precoder dimensions disagree");
  const arma::cx_mat hp = h_cross * p;
  arma::cx_mat k = hp * hp.t();
  // exact Hermitian symmetrization guards the PSD checks downstream
  k = 0.5 * (k + k.t());
  return k;
}

arma::vec mai_powers(const std::vector<arma::cx_mat>& covariances) {
  if (covariances.empty())
    throw std::invalid_argument("mai_powers: no covariances given");
  arma::vec total(covariances.front().n_rows, arma::fill::zeros);
  for (const auto& k : covariances) {
    if (k.n_rows != total.n_elem)
      throw std::invalid_argument("mai_powers: inconsistent victim sizes");
    total += arma::real(k.diag());
  }
  return total;
}

double effective_snr_jsdm(double snr0, double p_total, SnrConvention conv) {
  if (!(snr0 > 0.0))
    throw std::invalid_argument("effective_snr_jsdm: snr0 must be positive");
  if (p_total < 0.0)
    throw std::invalid_argument("effective_snr_jsdm: negative MAI power");
  if (p_total == 0.0) return snr0;  // interference-free limit
  if (conv == SnrConvention::kSinr) return snr0 / (1.0 + snr0 * p_total);
  return 1.0 / (1.0 / snr0 + 1.0 / p_total);
}

MaiReport mai_report(
    const std::vector<std::vector<arma::cx_mat>>& cross_channels,
    const std::vector<PrecoderFactors>& precoders, double snr0,
    SnrConvention conv) {
  const std::size_t n_sub = precoders.size();
  if (cross_channels.size() != n_sub)
    throw std::invalid_argument("mai_report: cross_channels/precoders mismatch");

  MaiReport rep;
  rep.covariances.resize(n_sub);
  rep.per_ue_total.resize(n_sub);
  rep.snr_eff.resize(n_sub);
  for (std::size_t l = 0; l < n_sub; ++l) {
    std::vector<arma::cx_mat> ks;
    for (std::size_t lp = 0; lp < n_sub; ++lp) {
      if (lp == l) continue;
      ks.push_back(mai_covariance(cross_channels[l][lp], precoders[lp]));
    }
    rep.covariances[l] = ks;
    if (ks.empty()) {
      const arma::uword n_ue = cross_channels[l][l].n_rows;
      rep.per_ue_total[l] = arma::vec(n_ue, arma::fill::zeros);
    } else {
      rep.per_ue_total[l] = mai_powers(ks);
    }
    rep.snr_eff[l].set_size(rep.per_ue_total[l].n_elem);
    for (arma::uword i = 0; i < rep.per_ue_total[l].n_elem; ++i)
      rep.snr_eff[l][i] =
          effective_snr_jsdm(snr0, rep.per_ue_total[l][i], conv);
  }
  return rep;
}

}  // namespace mmpgp
