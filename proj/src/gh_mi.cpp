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

#include "mmpgp/gh_mi.hpp"

#include <algorithm>
#include <limits>
#include <vector>

#include "mmpgp/parallel.hpp"

namespace mmpgp {

namespace {

constexpr double kSqrtPi = 1.7724538509055160272981674833411452;
constexpr double kLog2E = 1.4426950408889634073599246810018921;
// exp(-45) ~ 3e-20: terms this far below the row maximum cannot move the
// log-sum at double precision.
constexpr double kExpCut = 45.0;
constexpr arma::uword kMaxInputs = 4096;
constexpr double kMaxGrid = 1e7;
constexpr arma::uword kGridChunk = 65536;

arma::uword checked_pow(arma::uword base, arma::uword exp, double limit,
                        const char* what) {
  double v = 1.0;
  for (arma::uword i = 0; i < exp; ++i) v *= static_cast<double>(base);
  if (v > limit) {
    throw CapacityError(std::string("mi_gh: ") + what + " = " +
                        std::to_string(base) + "^" + std::to_string(exp) +
                        " exceeds the enumerable limit of " +
                        std::to_string(static_cast<long long>(limit)));
  }
  return static_cast<arma::uword>(v + 0.5);
}

// All M^Ns input vectors and their noiseless receive points, plus the orbit
// structure under global negation and (for square QAM) multiplication by j.
// Both maps permute the input set and leave f_hat invariant because the
// quadrature grid is symmetric under v -> -v and 90-degree rotation, so only
// one representative per orbit needs evaluation.
struct InputTable {
  arma::cx_mat u;        // Nr x K noiseless receive points
  arma::uvec rep;        // orbit representative per input index
  std::vector<arma::uword> reps;
};

arma::uword find_point(const arma::cx_vec& pts, cx target) {
  for (arma::uword i = 0; i < pts.n_elem; ++i) {
    if (std::abs(pts[i] - target) < 1e-9) return i;
  }
  return pts.n_elem;  // not present
}

// Rotating any output of y by a fixed phase never changes the MI (the noise
// is circular), but the tensor quadrature grid is only symmetric under
// quarter turns. Fixing the gauge of each output row makes the estimates
// exactly invariant under per-output phase rotations.
arma::cx_mat fix_row_phases(arma::cx_mat eff) {
  for (arma::uword i = 0; i < eff.n_rows; ++i) {
    const double scale = arma::abs(eff.row(i)).max();
    if (scale <= 0.0) continue;
    for (arma::uword j = 0; j < eff.n_cols; ++j) {
      const cx v = eff(i, j);
      if (std::abs(v) > 1e-12 * scale) {
        eff.row(i) *= std::conj(v) / std::abs(v);
        break;
      }
    }
  }
  return eff;
}

InputTable enumerate_inputs(const arma::cx_mat& eff, const Constellation& c,
                            arma::uword k_inputs) {
  const arma::uword m = c.m();
  const arma::uword ns = eff.n_cols;

  arma::uvec neg(m), rot(m);
  bool has_rot = true;
  for (arma::uword i = 0; i < m; ++i) {
    neg[i] = find_point(c.points, -c.points[i]);
    rot[i] = find_point(c.points, cx(0.0, 1.0) * c.points[i]);
    if (rot[i] == m) has_rot = false;
    if (neg[i] == m)
      throw std::invalid_argument("mi_gh: constellation is not symmetric");
  }

  // Input index k <-> base-M digit vector; digit d(0) is the fastest.
  auto map_index = [&](arma::uword k, const arma::uvec& point_map) {
    arma::uword out = 0, mult = 1;
    for (arma::uword s = 0; s < ns; ++s) {
      out += point_map[k % m] * mult;
      k /= m;
      mult *= m;
    }
    return out;
  };

  InputTable t;
  t.u.set_size(eff.n_rows, k_inputs);
  {
    arma::cx_vec x(ns);
    for (arma::uword k = 0; k < k_inputs; ++k) {
      arma::uword kk = k;
      for (arma::uword s = 0; s < ns; ++s) {
        x[s] = c.points[kk % m];
        kk /= m;
      }
      t.u.col(k) = eff * x;
    }
  }

  t.rep.set_size(k_inputs);
  for (arma::uword k = 0; k < k_inputs; ++k) {
    arma::uword r = k;
    r = std::min(r, map_index(k, neg));
    if (has_rot) {
      const arma::uword jk = map_index(k, rot);
      r = std::min(r, jk);
      r = std::min(r, map_index(jk, neg));
    }
    t.rep[k] = r;
  }
  for (arma::uword k = 0; k < k_inputs; ++k) {
    if (t.rep[k] == k) t.reps.push_back(k);
  }
  return t;
}

// One chunk of the 2*Nr-dimensional tensor quadrature grid: complex node
// vectors (one complex entry per output dimension) and the product weights.
struct GridChunk {
  arma::cx_mat v;  // Nr x count
  arma::vec w;     // product weights
};

GridChunk make_chunk(const GhRule& rule, arma::uword nr, arma::uword g0,
                     arma::uword count) {
  const arma::uword l = rule.order;
  GridChunk ch;
  ch.v.set_size(nr, count);
  ch.w.set_size(count);
  for (arma::uword j = 0; j < count; ++j) {
    arma::uword g = g0 + j;
    double w = 1.0;
    for (arma::uword d = 0; d < nr; ++d) {
      const arma::uword ire = g % l;
      g /= l;
      const arma::uword iim = g % l;
      g /= l;
      ch.v(d, j) = cx(rule.nodes[ire], rule.nodes[iim]);
      w *= rule.weights[ire] * rule.weights[iim];
    }
    ch.w[j] = w;
  }
  return ch;
}

// Quadrature inner loop for one representative input over one grid chunk:
// sum_g w_g * log2 sum_m exp(-||sigma*v_g + (u_m - u_k)||^2 / sigma^2),
// evaluated with max-subtraction.
double accumulate_chunk(const GridChunk& ch, const arma::cx_mat& diff,
                        double sigma) {
  const arma::uword nr = diff.n_rows;
  const arma::uword k_inputs = diff.n_cols;
  const double inv_s2 = 1.0 / (sigma * sigma);
  std::vector<double> row(k_inputs);
  std::vector<cx> sv(nr);

  double acc = 0.0;
  for (arma::uword g = 0; g < ch.v.n_cols; ++g) {
    for (arma::uword d = 0; d < nr; ++d) sv[d] = sigma * ch.v(d, g);
    double best = std::numeric_limits<double>::infinity();
    const cx* dcol = diff.memptr();
    for (arma::uword m = 0; m < k_inputs; ++m, dcol += nr) {
      double dist = 0.0;
      for (arma::uword d = 0; d < nr; ++d) {
        const double re = sv[d].real() + dcol[d].real();
        const double im = sv[d].imag() + dcol[d].imag();
        dist += re * re + im * im;
      }
      row[m] = dist;
      if (dist < best) best = dist;
    }
    double s = 0.0;
    for (arma::uword m = 0; m < k_inputs; ++m) {
      const double e = (row[m] - best) * inv_s2;
      if (e < kExpCut) s += std::exp(-e);
    }
    acc += ch.w[g] * (std::log2(s) - best * inv_s2 * kLog2E);
  }
  return acc;
}

void check_model(const arma::cx_mat& channel, const arma::cx_mat& precoder,
                 double sigma) {
  if (channel.n_cols != precoder.n_rows)
    throw std::invalid_argument("mi: channel/precoder dimension mismatch");
  if (!(sigma > 0.0))
    throw std::invalid_argument("mi: noise std must be positive");
}

}  // namespace

Constellation Constellation::qam(arma::uword m) {
  Constellation c;
  if (m == 2) {
    c.points = {cx(-1.0, 0.0), cx(1.0, 0.0)};
    return c;
  }
  if (m != 4 && m != 16 && m != 64)
    throw std::invalid_argument("Constellation: M must be one of 2, 4, 16, 64");
  const arma::uword side = static_cast<arma::uword>(std::sqrt(double(m)) + 0.5);
  const double scale =
      std::sqrt(2.0 * (static_cast<double>(side * side) - 1.0) / 3.0);
  c.points.set_size(m);
  arma::uword idx = 0;
  for (arma::uword a = 0; a < side; ++a) {
    for (arma::uword b = 0; b < side; ++b) {
      const double re = (2.0 * static_cast<double>(a) - (side - 1.0));
      const double im = (2.0 * static_cast<double>(b) - (side - 1.0));
      c.points[idx++] = cx(re, im) / scale;
    }
  }
  return c;
}

GhRule gh_rule(arma::uword order) {
  if (order < 2 || order > 30)
    throw std::invalid_argument("gh_rule: order must be in [2, 30]");
  // Golub-Welsch on the Hermite three-term recurrence: eigenvalues of the
  // Jacobi matrix are the polynomial roots, weights follow from the first
  // eigenvector components.
  arma::mat j(order, order, arma::fill::zeros);
  for (arma::uword i = 1; i < order; ++i) {
    const double b = std::sqrt(static_cast<double>(i) / 2.0);
    j(i - 1, i) = b;
    j(i, i - 1) = b;
  }
  arma::vec nodes;
  arma::mat vecs;
  if (!arma::eig_sym(nodes, vecs, j))
    throw std::runtime_error("gh_rule: eigenvalue computation failed");
  GhRule rule;
  rule.order = order;
  rule.nodes = nodes;
  rule.weights = kSqrtPi * arma::square(vecs.row(0).t());
  return rule;
}

MiEstimate mi_gh(const arma::cx_mat& channel, const arma::cx_mat& precoder,
                 double sigma, const Constellation& c, arma::uword order) {
  check_model(channel, precoder, sigma);
  const arma::uword nr = channel.n_rows;
  const arma::uword ns = precoder.n_cols;
  const arma::uword k_inputs =
      checked_pow(c.m(), ns, static_cast<double>(kMaxInputs), "M^Ns");
  const arma::uword grid =
      checked_pow(order, 2 * nr, kMaxGrid, "L^(2*Nr)");

  const GhRule rule = gh_rule(order);
  const arma::cx_mat eff = fix_row_phases(channel * precoder);
  const InputTable table = enumerate_inputs(eff, c, k_inputs);

  std::vector<double> partial(table.reps.size(), 0.0);
  for (arma::uword g0 = 0; g0 < grid; g0 += kGridChunk) {
    const arma::uword count = std::min<arma::uword>(kGridChunk, grid - g0);
    const GridChunk ch = make_chunk(rule, nr, g0, count);
    parallel_for(table.reps.size(), [&](std::size_t r) {
      const arma::uword k = table.reps[r];
      arma::cx_mat diff = table.u.each_col() - table.u.col(k);
      partial[r] += accumulate_chunk(ch, diff, sigma);
    });
  }

  const double pi_pow = std::pow(kPi, static_cast<double>(nr));
  arma::vec f_by_rep(table.reps.size());
  for (std::size_t r = 0; r < table.reps.size(); ++r)
    f_by_rep[r] = partial[r] / pi_pow;

  MiEstimate est;
  est.f_hat.set_size(k_inputs);
  {
    // scatter representative values to their orbits
    std::vector<arma::uword> rep_slot(k_inputs, 0);
    for (std::size_t r = 0; r < table.reps.size(); ++r)
      rep_slot[table.reps[r]] = r;
    for (arma::uword k = 0; k < k_inputs; ++k)
      est.f_hat[k] = f_by_rep[rep_slot[table.rep[k]]];
  }

  const double max_bits = static_cast<double>(ns) * c.bits();
  double bits = max_bits - static_cast<double>(nr) * kLog2E -
                arma::mean(est.f_hat);
  est.bits = std::clamp(bits, 0.0, max_bits);
  est.method = MiMethod::kGaussHermite;
  est.order_or_samples = order;
  est.sigma = sigma;
  est.n_streams = ns;
  est.n_outputs = nr;
  return est;
}

MiEstimate mi_mc(const arma::cx_mat& channel, const arma::cx_mat& precoder,
                 double sigma, const Constellation& c, arma::uword n_samples,
                 std::mt19937_64& rng) {
  check_model(channel, precoder, sigma);
  if (n_samples < 10000)
    throw std::invalid_argument("mi_mc: need at least 1e4 samples");
  const arma::uword nr = channel.n_rows;
  const arma::uword ns = precoder.n_cols;
  const arma::uword k_inputs =
      checked_pow(c.m(), ns, static_cast<double>(kMaxInputs), "M^Ns");

  const arma::cx_mat eff = fix_row_phases(channel * precoder);
  const InputTable table = enumerate_inputs(eff, c, k_inputs);
  const double inv_s2 = 1.0 / (sigma * sigma);

  std::uniform_int_distribution<arma::uword> pick(0, k_inputs - 1);
  std::normal_distribution<double> gauss(0.0, sigma / std::sqrt(2.0));

  arma::vec f_sum(k_inputs, arma::fill::zeros);
  arma::uvec f_count(k_inputs, arma::fill::zeros);
  std::vector<double> row(k_inputs);
  std::vector<cx> noise(nr);

  double sum_z = 0.0, sum_z2 = 0.0;
  for (arma::uword i = 0; i < n_samples; ++i) {
    const arma::uword k = pick(rng);
    for (arma::uword d = 0; d < nr; ++d)
      noise[d] = cx(gauss(rng), gauss(rng));
    double best = std::numeric_limits<double>::infinity();
    for (arma::uword m = 0; m < k_inputs; ++m) {
      double dist = 0.0;
      for (arma::uword d = 0; d < nr; ++d) {
        const cx delta = noise[d] + table.u(d, m) - table.u(d, k);
        dist += delta.real() * delta.real() + delta.imag() * delta.imag();
      }
      row[m] = dist;
      if (dist < best) best = dist;
    }
    double s = 0.0;
    for (arma::uword m = 0; m < k_inputs; ++m) {
      const double e = (row[m] - best) * inv_s2;
      if (e < kExpCut) s += std::exp(-e);
    }
    const double z = std::log2(s) - best * inv_s2 * kLog2E;
    sum_z += z;
    sum_z2 += z * z;
    f_sum[k] += z;
    f_count[k] += 1;
  }

  const double n = static_cast<double>(n_samples);
  const double mean_z = sum_z / n;
  const double var_z = std::max(0.0, sum_z2 / n - mean_z * mean_z);

  MiEstimate est;
  est.f_hat.set_size(k_inputs);
  for (arma::uword k = 0; k < k_inputs; ++k)
    est.f_hat[k] = f_count[k] > 0 ? f_sum[k] / f_count[k] : 0.0;
  const double max_bits = static_cast<double>(ns) * c.bits();
  est.bits = std::clamp(
      max_bits - static_cast<double>(nr) * kLog2E - mean_z, 0.0, max_bits);
  est.method = MiMethod::kMonteCarlo;
  est.order_or_samples = n_samples;
  est.std_error = std::sqrt(var_z / n);
  est.sigma = sigma;
  est.n_streams = ns;
  est.n_outputs = nr;
  return est;
}

arma::vec idoe(const arma::vec& f_hat, double sigma, arma::uword n_outputs,
               arma::uword n_streams, arma::uword m) {
  if (f_hat.is_empty()) throw std::invalid_argument("idoe: empty f_hat");
  const double nr = static_cast<double>(n_outputs);
  const double nt = static_cast<double>(n_streams);
  return -f_hat + 2.0 * nr * std::log2(sigma) + nr * std::log2(kPi) +
         nt * std::log2(static_cast<double>(m));
}

double gaussian_capacity(const arma::cx_mat& channel,
                         const arma::cx_mat& precoder, double sigma) {
  check_model(channel, precoder, sigma);
  const arma::cx_mat eff = channel * precoder;
  const arma::cx_mat gram =
      arma::eye<arma::cx_mat>(eff.n_rows, eff.n_rows) +
      (eff * eff.t()) / (sigma * sigma);
  return arma::log_det_sympd(gram) / std::log(2.0);
}

}  // namespace mmpgp
