// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "rissim/optimize.hpp"
#include "rissim/rng.hpp"

using namespace rissim;
using cd = std::complex<double>;

namespace {

Eigen::VectorXcd random_channel(int p, uint64_t seed) {
  Rng rng(seed);
  Eigen::VectorXcd zeta(p);
  for (int i = 0; i < p; ++i) zeta[i] = rng.cgaussian(1.0);
  return zeta;
}

// reference sweep: same accumulation order as the implementation
Eigen::VectorXcd reference_measurements(const Eigen::MatrixXd& q, const ElementChannel& scn) {
  Eigen::VectorXcd y(q.rows());
  for (Eigen::Index w = 0; w < q.rows(); ++w) {
    cd acc = scn.direct;
    for (Eigen::Index i = 0; i < q.cols(); ++i)
      acc += q(w, i) > 0 ? scn.zeta[i] : -scn.zeta[i];
    y[w] = acc;
  }
  return y;
}

}  // namespace

TEST_CASE("hadamard matrices are orthogonal and integer exact") {
  const auto h2 = hadamard_matrix(2);
  CHECK(h2(0, 0) == 1.0);
  CHECK(h2(0, 1) == 1.0);
  CHECK(h2(1, 0) == 1.0);
  CHECK(h2(1, 1) == -1.0);

  const auto h4 = hadamard_matrix(4);
  CHECK((h4.topLeftCorner(2, 2).array() == h2.array()).all());
  CHECK((h4.topRightCorner(2, 2).array() == h2.array()).all());
  CHECK((h4.bottomLeftCorner(2, 2).array() == h2.array()).all());
  CHECK((h4.bottomRightCorner(2, 2).array() == (-h2).array()).all());

  for (int p : {1, 2, 4, 8, 16, 64}) {
    const auto h = hadamard_matrix(p);
    const Eigen::MatrixXd err =
        h.transpose() * h - static_cast<double>(p) * Eigen::MatrixXd::Identity(p, p);
    CHECK(err.cwiseAbs().maxCoeff() == 0.0);
  }

  CHECK_THROWS_AS(hadamard_matrix(3), std::invalid_argument);
  CHECK_THROWS_AS(hadamard_matrix(0), std::invalid_argument);
  CHECK_THROWS_AS(hadamard_matrix(-4), std::invalid_argument);
}

TEST_CASE("rows map to phase patterns via the sign rule") {
  Eigen::VectorXd all_plus(4);
  all_plus << 1, 1, 1, 1;
  CHECK(pattern_from_row(all_plus).beta == std::vector<uint8_t>{0, 0, 0, 0});

  Eigen::VectorXd alt(4);
  alt << 1, -1, 1, -1;
  const auto cfg = pattern_from_row(alt);
  CHECK(cfg.beta == std::vector<uint8_t>{0, 1, 0, 1});
  for (int i = 0; i < 4; ++i) CHECK(cfg.gamma(i) == static_cast<int>(alt[i]));

  Eigen::VectorXd bad(2);
  bad << 1, 0.5;
  CHECK_THROWS_AS(pattern_from_row(bad), std::invalid_argument);
}

TEST_CASE("bernoulli sensing draws balanced signs deterministically") {
  const auto q = bernoulli_sensing(64, 32, 123);
  CHECK(q.pilots() == 32);
  CHECK(q.elements() == 64);
  double sum = 0.0;
  for (int r = 0; r < q.pilots(); ++r)
    for (int c = 0; c < q.elements(); ++c) {
      CHECK((q.q(r, c) == 1.0 || q.q(r, c) == -1.0));
      sum += q.q(r, c);
    }
  const double n = 32.0 * 64.0;
  CHECK(std::abs(sum / n) < 3.0 / std::sqrt(n));

  const auto again = bernoulli_sensing(64, 32, 123);
  CHECK((q.q.array() == again.q.array()).all());
  const auto other = bernoulli_sensing(64, 32, 124);
  CHECK(!(q.q.array() == other.q.array()).all());

  // larger draw for the mean check
  const auto big = bernoulli_sensing(100, 1000, 7);
  CHECK(std::abs(big.q.sum() / 1e5) < 3.0 / std::sqrt(1e5));

  CHECK_THROWS_AS(bernoulli_sensing(0, 4, 0), std::invalid_argument);
  CHECK_THROWS_AS(bernoulli_sensing(4, 0, 0), std::invalid_argument);
}

TEST_CASE("reflection matrix stacks Q over -Q") {
  const auto q = bernoulli_sensing(8, 3, 1);
  const auto r = reflection_matrix(q);
  CHECK(r.rows() == 6);
  CHECK((r.topRows(3).array() == q.q.array()).all());
  CHECK((r.bottomRows(3).array() == (-q.q).array()).all());
}

TEST_CASE("noiseless unquantized acquisition returns Q * zeta exactly") {
  const int p = 16;
  ElementChannel scn;
  scn.zeta = random_channel(p, 41);
  const auto q = hadamard_sensing(p);

  const auto meas = acquire(scn, q, AcquireOptions{}, 5);
  REQUIRE(meas.y.size() == p);
  REQUIRE(meas.patterns.size() == static_cast<std::size_t>(p));
  const auto expected = reference_measurements(q.q, scn);
  for (int i = 0; i < p; ++i) CHECK(meas.y[i] == expected[i]);
  for (int i = 0; i < p; ++i)
    CHECK(meas.patterns[i].beta == pattern_from_row(q.q.row(i)).beta);
}

TEST_CASE("quantized acquisition stays within half a step per component") {
  const int p = 16;
  ElementChannel scn;
  scn.zeta = random_channel(p, 42);
  const auto q = hadamard_sensing(p);
  const auto raw = reference_measurements(q.q, scn);

  double maxc = 0.0;
  for (int i = 0; i < p; ++i)
    maxc = std::max({maxc, std::abs(raw[i].real()), std::abs(raw[i].imag())});

  AcquireOptions opt;
  opt.quant = QuantizerSpec::for_bits(8);
  opt.normalization_scale = 1.3 * maxc;  // keeps every component in range
  const auto meas = acquire(scn, q, opt, 5);
  const double bound = opt.normalization_scale * opt.quant->step / 2.0 + 1e-12;
  for (int i = 0; i < p; ++i) {
    CHECK(std::abs(meas.y[i].real() - raw[i].real()) <= bound);
    CHECK(std::abs(meas.y[i].imag() - raw[i].imag()) <= bound);
  }
}

TEST_CASE("grid emulation and the fast path agree when noiseless") {
  const int p = 8;
  ElementChannel scn;
  scn.zeta = random_channel(p, 43);
  const auto q = hadamard_sensing(p);

  BwpConfig bwp;
  bwp.num_prbs = 12;
  AcquireOptions grid_opt;
  grid_opt.grid_emulation = true;
  grid_opt.csi_cfg = CsiRsConfig::two_port_fd_cdm2(bwp);
  grid_opt.scheduled_fraction = 0.5;

  const auto fast = acquire(scn, q, AcquireOptions{}, 9);
  const auto slow = acquire(scn, q, grid_opt, 9);
  CHECK((fast.y - slow.y).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("hadamard inversion recovers the channel exactly when unquantized") {
  for (int p : {2, 4, 8, 16, 64}) {
    ElementChannel scn;
    scn.zeta = random_channel(p, 100 + p);
    const auto q = hadamard_sensing(p);
    const auto meas = acquire(scn, q, AcquireOptions{}, 1);
    const auto res = hadamard_optimize(meas, p);

    // undo the global phase rotation and compare with the true channel
    const cd rot = std::polar(1.0, res.phase);
    double max_err = 0.0;
    for (int i = 0; i < p; ++i) max_err = std::max(max_err, std::abs(res.g_hat[i] * rot - scn.zeta[i]));
    CHECK(max_err < 1e-10);
  }
}

TEST_CASE("hadamard optimization aligns signs") {
  SUBCASE("all-ones channel keeps all phases at zero") {
    ElementChannel scn;
    scn.zeta.setConstant(8, cd{1.0, 0.0});
    const auto meas = acquire(scn, hadamard_sensing(8), AcquireOptions{}, 2);
    CHECK(hadamard_optimize(meas, 8).beta.beta == PhaseConfig::zeros(8).beta);
  }
  SUBCASE("real channels with mixed signs flip the negatives") {
    ElementChannel scn;
    scn.zeta.resize(8);
    scn.zeta << cd{2, 0}, cd{-1, 0}, cd{3, 0}, cd{-0.5, 0}, cd{1, 0}, cd{-2, 0}, cd{0.25, 0},
        cd{4, 0};
    const auto meas = acquire(scn, hadamard_sensing(8), AcquireOptions{}, 2);
    const auto res = hadamard_optimize(meas, 8);
    double total = 0.0;
    for (int i = 0; i < 8; ++i) total += scn.zeta[i].real();
    const double sign = total >= 0 ? 1.0 : -1.0;
    for (int i = 0; i < 8; ++i)
      CHECK(res.beta.beta[i] == (scn.zeta[i].real() * sign < 0 ? 1 : 0));
  }
  SUBCASE("achieved power beats the coherent floor and random configs") {
    for (uint64_t seed : {7u, 8u, 9u}) {
      ElementChannel scn;
      scn.zeta = random_channel(8, seed);
      const auto meas = acquire(scn, hadamard_sensing(8), AcquireOptions{}, 3);
      const auto res = hadamard_optimize(meas, 8);
      const double achieved = std::norm(effective_channel(scn, res.beta));

      double abs_sum = 0.0;
      for (int i = 0; i < 8; ++i) abs_sum += std::abs(scn.zeta[i]);
      const double floor = std::pow(2.0 / std::numbers::pi, 2) * abs_sum * abs_sum;
      CHECK(achieved >= floor);

      Rng rng(seed + 1000);
      double rand_mean = 0.0;
      for (int t = 0; t < 1000; ++t) {
        PhaseConfig cfg;
        cfg.beta.resize(8);
        for (auto& b : cfg.beta) b = static_cast<uint8_t>(rng.integer(2));
        rand_mean += std::norm(effective_channel(scn, cfg));
      }
      rand_mean /= 1000.0;
      CHECK(achieved >= rand_mean);
    }
  }
}

TEST_CASE("hadamard output power is invariant to scaling the measurements") {
  ElementChannel scn;
  scn.zeta = random_channel(16, 55);
  const auto meas = acquire(scn, hadamard_sensing(16), AcquireOptions{}, 4);
  const auto base = hadamard_optimize(meas, 16);
  const double base_power = std::norm(effective_channel(scn, base.beta));

  for (const cd c : {cd{2.0, 0.0}, cd{0.0, -3.0}, cd{-1.5, 2.5}}) {
    const Eigen::VectorXcd scaled = meas.y * c;
    const auto res = hadamard_optimize(scaled, 16);
    const bool same = res.beta.beta == base.beta.beta;
    const bool complement = res.beta.beta == base.beta.complemented().beta;
    CHECK((same || complement));
    CHECK(std::norm(effective_channel(scn, res.beta)) ==
          doctest::Approx(base_power).epsilon(1e-9));
  }
}

TEST_CASE("hadamard inversion validates sizes") {
  Eigen::VectorXcd y(3);
  y.setZero();
  CHECK_THROWS_AS(hadamard_optimize(y, 3), std::invalid_argument);
  CHECK_THROWS_AS(hadamard_optimize(y, 4), std::invalid_argument);
}

TEST_CASE("OMP recovers a single angular atom and matches the correlation oracle") {
  const auto geom = RisGeometry{4, 4};
  const auto dft = build_dft(geom);
  const int p = geom.total();

  for (int atom = 0; atom < p; atom += 5) {
    Eigen::VectorXcd xi = Eigen::VectorXcd::Zero(p);
    xi[atom] = cd{0.8, -0.6};
    ElementChannel scn;
    scn.zeta = element_from_angular(dft, xi);

    const auto q = bernoulli_sensing(p, p, 900 + atom);
    const auto meas = acquire(scn, q, AcquireOptions{}, 1);
    const auto res = omp_optimize(meas, q, dft, OmpParams{p, 1});

    REQUIRE(res.support.size() == 1);
    CHECK(res.support[0] == atom);
    CHECK(res.trace.back().residual_norm < 1e-10 * res.initial_residual_norm);

    // brute-force correlation oracle over all atoms at the first iteration
    const Eigen::MatrixXcd z = q.q.cast<cd>() * dft.f.conjugate();
    int best_j = 0;
    double best_rho = -1.0;
    for (int j = 0; j < p; ++j) {
      const double rho = std::norm(z.col(j).dot(meas.y)) / z.col(j).squaredNorm();
      if (rho > best_rho) {
        best_rho = rho;
        best_j = j;
      }
    }
    CHECK(res.trace[0].atom == best_j);
  }
}

TEST_CASE("OMP handles the zero measurement vector as a flagged degenerate case") {
  const auto geom = RisGeometry{2, 2};
  const auto dft = build_dft(geom);
  const auto q = bernoulli_sensing(4, 4, 3);
  Eigen::VectorXcd y = Eigen::VectorXcd::Zero(4);
  const auto res = omp_optimize(y, q, dft, OmpParams{4, 1});
  CHECK(res.degenerate);
  CHECK(res.support == std::vector<int>{0});
  CHECK(res.beta.beta == PhaseConfig::zeros(4).beta);
}

TEST_CASE("OMP residuals shrink and stay orthogonal to the active set") {
  const auto geom = RisGeometry{4, 4};
  const auto dft = build_dft(geom);
  const int p = geom.total();
  const int w = p;

  Rng rng(71);
  ElementChannel scn;
  scn.zeta = random_channel(p, 72);
  const auto q = bernoulli_sensing(p, w, 73);
  AcquireOptions opt;
  opt.noise_var = 0.05 * scn.zeta.squaredNorm();
  const auto meas = acquire(scn, q, opt, 74);

  const auto res = omp_optimize(meas, q, dft, OmpParams{w, 8});
  REQUIRE(res.trace.size() == 8);
  double prev = res.initial_residual_norm;
  for (const auto& iter : res.trace) {
    CHECK(iter.residual_norm <= prev + 1e-10);
    CHECK(iter.max_corr_after < 1e-8 * res.initial_residual_norm);
    prev = iter.residual_norm;
  }
}

TEST_CASE("OMP recovers planted supports most of the time") {
  const auto geom = RisGeometry{4, 4};
  const auto dft = build_dft(geom);
  const int p = geom.total();
  int successes = 0;
  const int trials = 40;
  for (int t = 0; t < trials; ++t) {
    const auto ang = draw_sparse_angular(geom, 2, 1.0, 8000 + t);
    ElementChannel scn;
    scn.zeta = element_from_angular(dft, ang.xi);
    const auto q = bernoulli_sensing(p, p, 9000 + t);
    const auto meas = acquire(scn, q, AcquireOptions{}, t);
    const auto res = omp_optimize(meas, q, dft, OmpParams{p, 2});
    auto got = res.support;
    std::sort(got.begin(), got.end());
    if (got == ang.support()) ++successes;
  }
  CHECK(successes >= trials * 9 / 10);
}

TEST_CASE("OMP validates its parameters") {
  const auto geom = RisGeometry{2, 2};
  const auto dft = build_dft(geom);
  const auto q = bernoulli_sensing(4, 3, 1);
  Eigen::VectorXcd y = Eigen::VectorXcd::Zero(3);
  CHECK_THROWS_AS(omp_optimize(y, q, dft, OmpParams{3, 4}), std::invalid_argument);  // S > W
  CHECK_THROWS_AS(omp_optimize(y, q, dft, OmpParams{5, 1}), std::invalid_argument);  // W > P
  Eigen::VectorXcd wrong = Eigen::VectorXcd::Zero(2);
  CHECK_THROWS_AS(omp_optimize(wrong, q, dft, OmpParams{3, 1}), std::invalid_argument);
}

TEST_CASE("pilot accounting: sweeps use exactly the requested number of patterns") {
  ElementChannel scn;
  scn.zeta = random_channel(64, 5);
  const auto had = acquire(scn, hadamard_sensing(64), AcquireOptions{}, 1);
  CHECK(had.y.size() == 64);
  const auto omp = acquire(scn, bernoulli_sensing(64, 16, 2), AcquireOptions{}, 1);
  CHECK(omp.y.size() == 16);
}
