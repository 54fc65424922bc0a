#include <doctest.h>

#include "mmpgp/gh_mi.hpp"
#include "mmpgp/rng.hpp"
#include "test_helpers.hpp"

using namespace mmpgp;

namespace {
constexpr double kSqrtPi = 1.7724538509055160272981674833411452;

double hermite(arma::uword order, double x) {
  double h0 = 1.0, h1 = 2.0 * x;
  if (order == 0) return h0;
  for (arma::uword n = 1; n < order; ++n) {
    const double h2 = 2.0 * x * h1 - 2.0 * static_cast<double>(n) * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

arma::cx_mat eye2() { return arma::eye<arma::cx_mat>(2, 2); }
}  // namespace

TEST_CASE("gh_rule small orders match closed forms") {
  const GhRule r2 = gh_rule(2);
  CHECK(r2.nodes[0] == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(r2.nodes[1] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(r2.weights[0] == doctest::Approx(kSqrtPi / 2.0).epsilon(1e-12));
  CHECK(r2.weights[1] == doctest::Approx(kSqrtPi / 2.0).epsilon(1e-12));

  // order-3 nodes are the roots of the degree-3 Hermite polynomial
  const GhRule r3 = gh_rule(3);
  CHECK(std::abs(r3.nodes[1]) < 1e-12);
  CHECK(r3.nodes[2] == doctest::Approx(std::sqrt(1.5)).epsilon(1e-12));
  for (const double v : r3.nodes) CHECK(std::abs(hermite(3, v)) < 1e-9);
  CHECK(arma::accu(r3.weights) == doctest::Approx(kSqrtPi).epsilon(1e-12));
}

TEST_CASE("gh_rule integrates even moments exactly") {
  // int x^{2p} exp(-x^2) dx = sqrt(pi) (2p-1)!! / 2^p, exact for 2p <= 2L-1
  const double expected[4] = {kSqrtPi, kSqrtPi / 2.0, 0.75 * kSqrtPi,
                              15.0 / 8.0 * kSqrtPi};
  for (arma::uword order = 2; order <= 30; ++order) {
    const GhRule r = gh_rule(order);
    CHECK(std::abs(arma::accu(r.weights) - kSqrtPi) < 1e-10);
    for (int p = 0; p <= 3; ++p) {
      if (2 * p > static_cast<int>(2 * order - 1)) continue;
      double acc = 0.0;
      for (arma::uword l = 0; l < order; ++l)
        acc += r.weights[l] * std::pow(r.nodes[l], 2 * p);
      CHECK(std::abs(acc - expected[p]) < 1e-10);
    }
  }
  CHECK_THROWS_AS(gh_rule(1), std::invalid_argument);
  CHECK_THROWS_AS(gh_rule(31), std::invalid_argument);
}

TEST_CASE("constellations carry unit average energy") {
  for (const arma::uword m : {2u, 4u, 16u, 64u}) {
    const Constellation c = Constellation::qam(m);
    CHECK(arma::mean(arma::square(arma::abs(c.points))) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(Constellation::qam(8), std::invalid_argument);
}

TEST_CASE("mi_gh limits: noise-dominated and saturated") {
  const Constellation qpsk = Constellation::qam(4);
  arma::cx_mat h(1, 1, arma::fill::ones);

  const MiEstimate low = mi_gh(h, arma::cx_mat(1, 1, arma::fill::ones) * 1.0,
                               1e3, qpsk, 10);
  CHECK(low.bits < 0.01);

  // BPSK at 30 dB saturates at 1 bit
  const Constellation bpsk = Constellation::qam(2);
  const double sigma = std::sqrt(db_to_lin(-30.0));
  const MiEstimate high =
      mi_gh(h, arma::cx_mat(1, 1, arma::fill::ones), sigma, bpsk, 10);
  CHECK(high.bits == doctest::Approx(1.0).epsilon(0.001));
}

TEST_CASE("mi_gh matches the Monte-Carlo oracle on a 2x2 channel") {
  auto rng = make_stream(42, 0);
  const Constellation qpsk = Constellation::qam(4);
  const arma::cx_mat h = test::random_cx_mat(2, 2, rng);
  const double sigma = std::sqrt(1.0 / db_to_lin(6.0));

  const MiEstimate gh = mi_gh(h, eye2(), sigma, qpsk, 10);
  auto mc_rng = make_stream(43, 0);
  const MiEstimate mc = mi_mc(h, eye2(), sigma, qpsk, 1000000, mc_rng);
  CHECK(std::abs(gh.bits - mc.bits) <=
        std::max(0.03, 3.0 * mc.std_error));
}

TEST_CASE("mi_mc is reproducible and obeys the CLT scaling") {
  const Constellation qpsk = Constellation::qam(4);
  auto rng_a = make_stream(7, 1);
  const arma::cx_mat h = test::random_cx_mat(2, 2, rng_a);
  const double sigma = 0.5;

  auto s1 = make_stream(11, 0);
  auto s2 = make_stream(11, 0);
  const MiEstimate a = mi_mc(h, eye2(), sigma, qpsk, 20000, s1);
  const MiEstimate b = mi_mc(h, eye2(), sigma, qpsk, 20000, s2);
  CHECK(a.bits == b.bits);

  auto s3 = make_stream(11, 1);
  auto s4 = make_stream(11, 2);
  const MiEstimate small = mi_mc(h, eye2(), sigma, qpsk, 10000, s3);
  const MiEstimate big = mi_mc(h, eye2(), sigma, qpsk, 1000000, s4);
  const double ratio = small.std_error / big.std_error;
  CHECK(ratio > 5.0);
  CHECK(ratio < 20.0);
  CHECK_THROWS_AS(mi_mc(h, eye2(), sigma, qpsk, 100, s3),
                  std::invalid_argument);
}

TEST_CASE("idoe identities") {
  const Constellation qpsk = Constellation::qam(4);

  // zero channel: every H_k(y) equals the Gaussian output entropy exactly
  arma::cx_mat h0(1, 1, arma::fill::zeros);
  const double sigma = 0.7;
  const MiEstimate est =
      mi_gh(h0, arma::cx_mat(1, 1, arma::fill::ones), sigma, qpsk, 10);
  const arma::vec hk = idoe(est.f_hat, sigma, 1, 1, 4);
  const double gaussian_entropy =
      std::log2(kPi * std::exp(1.0) * sigma * sigma);
  for (const double v : hk)
    CHECK(v == doctest::Approx(gaussian_entropy).epsilon(1e-9));

  // doubling sigma adds exactly 2 bits per complex dimension
  const MiEstimate est2 =
      mi_gh(h0, arma::cx_mat(1, 1, arma::fill::ones), 2.0 * sigma, qpsk, 10);
  const arma::vec hk2 = idoe(est2.f_hat, 2.0 * sigma, 1, 1, 4);
  CHECK(hk2[0] - hk[0] == doctest::Approx(2.0).epsilon(1e-9));

  // rearrangement: f_hat recovered from H_k reproduces the MI assembly
  auto rng = make_stream(5, 0);
  const arma::cx_mat h = test::random_cx_mat(2, 2, rng);
  const MiEstimate e = mi_gh(h, eye2(), 0.6, qpsk, 8);
  const arma::vec hk3 = idoe(e.f_hat, 0.6, 2, 2, 4);
  const arma::vec f_back = -hk3 + 2.0 * 2.0 * std::log2(0.6) +
                           2.0 * std::log2(kPi) + 2.0 * std::log2(4.0);
  CHECK(arma::abs(f_back - e.f_hat).max() < 1e-9);
  const double mi_back =
      2.0 * std::log2(4.0) - 2.0 / std::log(2.0) - arma::mean(f_back);
  CHECK(mi_back == doctest::Approx(e.bits).epsilon(1e-9));
}

TEST_CASE("mi invariances") {
  auto rng = make_stream(99, 0);
  const Constellation qpsk = Constellation::qam(4);
  const arma::cx_mat h = test::random_cx_mat(2, 2, rng);

  SUBCASE("monotone non-decreasing in SNR") {
    double last = -1.0;
    for (double snr_db = -10.0; snr_db <= 20.0; snr_db += 5.0) {
      const double sigma = std::sqrt(1.0 / db_to_lin(snr_db));
      const double bits = mi_gh(h, eye2(), sigma, qpsk, 8).bits;
      CHECK(bits >= last - 1e-9);
      last = bits;
    }
  }

  SUBCASE("invariant under quarter-turn relabeling of one input") {
    arma::cx_mat g = eye2();
    g(0, 0) = cx(0.0, 1.0);
    const double a = mi_gh(h, eye2(), 0.6, qpsk, 8).bits;
    const double b = mi_gh(h, g, 0.6, qpsk, 8).bits;
    CHECK(std::abs(a - b) < 1e-9);
  }

  SUBCASE("quadrature order drift below 0.01 bits") {
    const double sigma = std::sqrt(1.0 / db_to_lin(6.0));
    const double a = mi_gh(h, eye2(), sigma, qpsk, 10).bits;
    const double b = mi_gh(h, eye2(), sigma, qpsk, 14).bits;
    CHECK(std::abs(a - b) < 0.01);
  }

  SUBCASE("finite at 60 dB SNR") {
    const double sigma = std::sqrt(1.0 / db_to_lin(60.0));
    const double bits = mi_gh(h, eye2(), sigma, qpsk, 10).bits;
    CHECK(std::isfinite(bits));
    CHECK(bits == doctest::Approx(4.0).epsilon(1e-3));
  }
}

TEST_CASE("mi_gh enumeration guards") {
  const Constellation m64 = Constellation::qam(64);
  auto rng = make_stream(1, 0);
  const arma::cx_mat h = test::random_cx_mat(3, 3, rng);
  CHECK_THROWS_AS(
      mi_gh(h, arma::eye<arma::cx_mat>(3, 3), 1.0, m64, 10),
      CapacityError);  // 64^3 input vectors

  const Constellation qpsk = Constellation::qam(4);
  const arma::cx_mat h4 = test::random_cx_mat(4, 2, rng);
  CHECK_THROWS_AS(
      mi_gh(h4, arma::eye<arma::cx_mat>(2, 2), 1.0, qpsk, 30),
      CapacityError);  // 30^8 grid nodes
}

TEST_CASE("gaussian capacity dominates finite-alphabet MI") {
  auto rng = make_stream(123, 0);
  const Constellation qpsk = Constellation::qam(4);
  const arma::cx_mat h = test::random_cx_mat(2, 2, rng);
  double low_gap = 0.0, high_gap = 0.0;
  for (int trial = 0; trial < 9; ++trial) {
    const double snr_db = 3.0 * trial;
    const double sigma = std::sqrt(1.0 / db_to_lin(snr_db));
    const double fa = mi_gh(h, eye2(), sigma, qpsk, 8).bits;
    const double g = gaussian_capacity(h, eye2(), sigma);
    CHECK(g >= fa - 1e-6);
    if (snr_db == 6.0) low_gap = g - fa;
    if (snr_db == 24.0) high_gap = g - fa;
  }
  // the gap widens once the alphabet saturates
  CHECK(high_gap > low_gap + 1.0);
}
