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
// Mutual information of a finite-alphabet MIMO link y = H G x + n, with
// x drawn uniformly from a QAM alphabet and n circularly symmetric complex
// Gaussian of per-component variance sigma^2. The primary estimator is a
// tensor Gauss-Hermite quadrature over the 2*Nr real noise dimensions; a
// Monte-Carlo estimator over the same conditional-entropy expectation is
// provided as an independent cross-check.

#pragma once

#include <random>

#include "mmpgp/common.hpp"

namespace mmpgp {

// Unit-average-energy QAM alphabet.
struct Constellation {
  arma::cx_vec points;
  arma::uword m() const { return points.n_elem; }
  double bits() const { return std::log2(static_cast<double>(points.n_elem)); }

  // m in {2, 4, 16, 64}: BPSK or square QAM, normalized to E|x|^2 = 1.
  static Constellation qam(arma::uword m);
};

// Gauss-Hermite rule for integrals of exp(-x^2) * f(x): nodes are the
// roots of the order-L Hermite polynomial, weights sum to sqrt(pi).
struct GhRule {
  arma::uword order = 0;
  arma::vec nodes;
  arma::vec weights;
};

GhRule gh_rule(arma::uword order);  // order in [2, 30]

enum class MiMethod { kGaussHermite, kMonteCarlo };

struct MiEstimate {
  double bits = 0.0;
  MiMethod method = MiMethod::kGaussHermite;
  arma::uword order_or_samples = 0;  // GH order L, or MC sample count
  arma::vec f_hat;                   // per-input-symbol integrals, size M^Ns
  double std_error = 0.0;            // Monte-Carlo only
  double sigma = 0.0;
  arma::uword n_streams = 0;         // Nt of the evaluated model
  arma::uword n_outputs = 0;         // Nr of the evaluated model
};

// Quadrature estimate. Guards: M^Ns <= 4096 input vectors and L^(2*Nr) <= 1e7
// grid nodes; violations raise CapacityError naming the offending exponent.
MiEstimate mi_gh(const arma::cx_mat& channel, const arma::cx_mat& precoder,
                 double sigma, const Constellation& c, arma::uword order);

// Monte-Carlo estimate of the same quantity (n_samples >= 1e4). Reports the
// standard error of the sampled entropy term.
MiEstimate mi_mc(const arma::cx_mat& channel, const arma::cx_mat& precoder,
                 double sigma, const Constellation& c, arma::uword n_samples,
                 std::mt19937_64& rng);

// Input-dependent output entropy H_k(y) recovered from the f_hat terms.
arma::vec idoe(const arma::vec& f_hat, double sigma, arma::uword n_outputs,
               arma::uword n_streams, arma::uword m);

// Gaussian-input capacity of the same link, log2 det(I + E E^H / sigma^2),
// used for the comparison curves.
double gaussian_capacity(const arma::cx_mat& channel,
                         const arma::cx_mat& precoder, double sigma);

}  // namespace mmpgp
