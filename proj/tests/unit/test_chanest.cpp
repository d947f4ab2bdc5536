// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <complex>
#include <sstream>

#include "rissim/chanest.hpp"
#include "rissim/grid.hpp"

using namespace rissim;
using cd = std::complex<double>;

namespace {

BwpConfig bwp(int prbs) {
  BwpConfig b;
  b.num_prbs = prbs;
  return b;
}

}  // namespace

TEST_CASE("LS estimation removes the pilot") {
  const auto cfg = CsiRsConfig::two_port_fd_cdm2(bwp(4));
  const auto pilots = generate_pilots(cfg, 1);
  const auto re_set = enumerate_re_set(cfg, 0);

  const cd h{0.3, -0.4};
  const auto grid = synthesize_received_grid(cfg, pilots, h, 0.0, 0.0, 2);
  const auto ls = ls_estimate(grid, pilots, re_set);
  REQUIRE(ls.entries.size() == re_set.size());
  for (const auto& [c, v] : ls.entries) CHECK(v == h);

  const auto identity = synthesize_received_grid(cfg, pilots, {1.0, 0.0}, 0.0, 0.0, 2);
  for (const auto& [c, v] : ls_estimate(identity, pilots, re_set).entries)
    CHECK(v == cd{1.0, 0.0});
}

TEST_CASE("LS estimation is consistent under noise") {
  const auto cfg = CsiRsConfig::two_port_fd_cdm2(bwp(106));
  const auto pilots = generate_pilots(cfg, 1);
  const auto re_set = enumerate_re_set(cfg, 0);
  const cd h{0.7, 0.2};
  const double noise_var = 0.04;

  cd acc{0.0, 0.0};
  std::size_t n = 0;
  for (int t = 0; t < 60; ++t) {
    const auto grid = synthesize_received_grid(cfg, pilots, h, noise_var, 0.0, 500 + t);
    for (const auto& [c, v] : ls_estimate(grid, pilots, re_set).entries) {
      acc += v;
      ++n;
    }
  }
  REQUIRE(n >= 10000);
  const cd mean = acc / static_cast<double>(n);
  const double bound = 3.0 * std::sqrt(noise_var) / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(mean - h) < 3.0 * bound);
}

TEST_CASE("LS estimation validates pilots") {
  const auto cfg = CsiRsConfig::one_port(bwp(1));
  const auto re_set = enumerate_re_set(cfg, 0);
  const auto pilots = generate_pilots(cfg, 0);
  const auto grid = synthesize_received_grid(cfg, pilots, {1.0, 0.0}, 0.0, 0.0, 0);

  PilotMap zeroed = pilots;
  zeroed.begin()->second = {0.0, 0.0};
  CHECK_THROWS_AS(ls_estimate(grid, zeroed, re_set), std::invalid_argument);

  PilotMap missing;
  CHECK_THROWS_AS(ls_estimate(grid, missing, re_set), std::invalid_argument);
}

TEST_CASE("anchoring averages the RB's estimates onto its lowest subcarrier") {
  const auto cfg = CsiRsConfig::two_port_fd_cdm2(bwp(1));
  LsEstimateSet ls;
  ls.entries[ReCoord{0, 4}] = {1.0, 0.0};
  ls.entries[ReCoord{1, 4}] = {0.0, 1.0};
  const auto series = anchor(ls, cfg);
  REQUIRE(series.anchors.size() == 1);
  CHECK(series.anchors.at(0) == cd{0.5, 0.5});
  CHECK(series.n_grp == 2);

  LsEstimateSet constant;
  constant.entries[ReCoord{0, 4}] = {0.25, -1.5};
  constant.entries[ReCoord{1, 4}] = {0.25, -1.5};
  CHECK(anchor(constant, cfg).anchors.at(0) == cd{0.25, -1.5});

  CHECK_THROWS_AS(anchor(LsEstimateSet{}, cfg), std::invalid_argument);
}

TEST_CASE("noiseless anchors all equal the flat channel") {
  const auto cfg = CsiRsConfig::two_port_fd_cdm2(bwp(20));
  const auto pilots = generate_pilots(cfg, 4);
  const cd h{-0.6, 0.35};
  const auto grid = synthesize_received_grid(cfg, pilots, h, 0.0, 0.5, 6);
  const auto series = anchor(ls_estimate(grid, pilots, enumerate_re_set(cfg, 0)), cfg);
  CHECK(series.anchors.size() == 20);
  for (const auto& [m0, v] : series.anchors) CHECK(std::abs(v - h) < 1e-14);
}

TEST_CASE("interpolation is convex and exact on affine anchors") {
  AnchorSeries series;
  SUBCASE("constant anchors give a constant vector") {
    for (int rb = 0; rb < 6; ++rb) series.anchors[rb * 12] = cd{0.5, -0.25};
    const auto interp = interpolate(series, bwp(6));
    REQUIRE(interp.values.size() == 72);
    for (Eigen::Index k = 0; k < interp.values.size(); ++k)
      CHECK(std::abs(interp.values[k] - cd{0.5, -0.25}) < 1e-15);
  }
  SUBCASE("linear midpoint") {
    series.anchors[0] = cd{0.0, 0.0};
    series.anchors[12] = cd{1.0, 0.0};
    const auto interp = interpolate(series, bwp(2));
    CHECK(interp.values[6] == cd{0.5, 0.0});
    CHECK(interp.values[0] == cd{0.0, 0.0});
    CHECK(interp.values[12] == cd{1.0, 0.0});
    // constant extrapolation past the last anchor
    CHECK(interp.values[23] == cd{1.0, 0.0});
  }
  SUBCASE("affine anchors are reproduced everywhere") {
    const cd a{0.2, -0.1}, b{0.01, 0.02};
    for (int rb = 0; rb < 8; ++rb) {
      const int m0 = rb * 12 + 3;
      series.anchors[m0] = a + b * static_cast<double>(m0);
    }
    const auto interp = interpolate(series, bwp(8));
    for (int k = 3; k < 7 * 12 + 3; ++k) {
      const cd expected = a + b * static_cast<double>(k);
      CHECK(std::abs(interp.values[k] - expected) < 1e-12);
    }
  }
  SUBCASE("single anchor gives a constant vector") {
    series.anchors[36] = cd{2.0, 1.0};
    const auto interp = interpolate(series, bwp(8));
    for (Eigen::Index k = 0; k < interp.values.size(); ++k)
      CHECK(interp.values[k] == cd{2.0, 1.0});
  }
}

TEST_CASE("interpolation weights are normalized for every subcarrier") {
  AnchorSeries series;
  for (int rb = 0; rb < 10; ++rb) series.anchors[rb * 12] = cd{1.0, 0.0};
  for (int k = 0; k < 120; ++k) {
    const auto w = interpolation_weights(series, k, 24);
    CHECK(std::abs(w.w_lo + w.w_hi - 1.0) < 1e-15);
    CHECK(w.w_lo >= 0.0);
    CHECK(w.w_hi >= 0.0);
  }
}

TEST_CASE("wideband average is the complex mean") {
  InterpolatedChannel interp;
  interp.values.resize(2);
  interp.values << cd{1.0, 0.0}, cd{0.0, 0.0};
  CHECK(wideband_average(interp).value == cd{0.5, 0.0});

  interp.values.setConstant(2, cd{0.3, 0.4});
  CHECK(wideband_average(interp).value == cd{0.3, 0.4});

  InterpolatedChannel empty;
  CHECK_THROWS_AS(wideband_average(empty), std::invalid_argument);
}

TEST_CASE("noiseless extraction returns the flat channel end to end") {
  for (int pattern = 0; pattern < 2; ++pattern) {
    const auto cfg = pattern == 0 ? CsiRsConfig::one_port(bwp(106))
                                  : CsiRsConfig::two_port_fd_cdm2(bwp(106));
    const auto pilots = generate_pilots(cfg, 8);
    const cd h{0.37, -0.21};
    const auto grid = synthesize_received_grid(cfg, pilots, h, 0.0, 0.5, 17);
    const auto cci = extract_cci(grid, cfg, pilots);
    CHECK(std::abs(cci.value - h) < 1e-12);
  }
}

TEST_CASE("extraction is linear in the received grid") {
  const auto cfg = CsiRsConfig::two_port_fd_cdm2(bwp(30));
  const auto pilots = generate_pilots(cfg, 13);
  const cd h{0.8, 0.1};
  auto grid = synthesize_received_grid(cfg, pilots, h, 0.002, 0.5, 23);
  const cd base = extract_cci(grid, cfg, pilots).value;

  const cd alpha{-1.5, 2.0};
  grid.data *= alpha;
  const cd scaled = extract_cci(grid, cfg, pilots).value;
  CHECK(std::abs(scaled - alpha * base) < 1e-12 * std::abs(alpha * base) + 1e-15);
}

TEST_CASE("chanest debug dumps carry headers") {
  AnchorSeries series;
  series.anchors[0] = cd{1.0, 2.0};
  std::ostringstream a;
  dump_anchors_csv(series, a);
  CHECK(a.str().rfind("m0,re,im\n", 0) == 0);

  InterpolatedChannel interp;
  interp.values.setConstant(3, cd{0.0, 1.0});
  std::ostringstream b;
  dump_interpolated_csv(interp, b);
  CHECK(b.str().rfind("k,re,im\n", 0) == 0);
}
