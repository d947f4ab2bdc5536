// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rissim/grid.hpp"

namespace rissim {

/// Per-RE least-squares channel estimates for one (antenna, port) pair.
struct LsEstimateSet {
  std::map<ReCoord, std::complex<double>> entries;
  int antenna = 0;
  int port = 0;
};

/// H_ls[m,n] = Y[m,n] * conj(x[m,n]) / |x[m,n]|^2 over the RE set.
LsEstimateSet ls_estimate(const ResourceGrid& grid, const PilotMap& pilots,
                          const std::vector<ReCoord>& re_set);

/// One averaged estimate per RB, keyed by the RB's lowest CSI-RS subcarrier m0.
struct AnchorSeries {
  std::map<int, std::complex<double>> anchors;
  int n_grp = 0;  // LS estimates averaged per anchor
};

AnchorSeries anchor(const LsEstimateSet& ls, const CsiRsConfig& cfg);

/// Channel across the whole BWP, filled in from the anchors.
struct InterpolatedChannel {
  Eigen::VectorXcd values;  // one entry per subcarrier
  int taps = 24;            // window width in subcarriers, symmetric around k
  std::string weights_spec = "linear";
};

/// Interpolation weights at subcarrier k: a convex combination of at most two
/// anchors. w_lo + w_hi == 1 always; a single-anchor result has w_hi == 0.
struct InterpWeights {
  int m_lo = 0;
  int m_hi = 0;
  double w_lo = 1.0;
  double w_hi = 0.0;
};

InterpWeights interpolation_weights(const AnchorSeries& anchors, int k, int taps);

/// Piecewise-linear interpolation between the two nearest anchors inside a
/// symmetric window of `taps` subcarriers, constant beyond the edge anchors.
InterpolatedChannel interpolate(const AnchorSeries& anchors, const BwpConfig& bwp,
                                int taps = 24);

struct WidebandCci {
  std::complex<double> value;
  int antenna = 0;
  int port = 0;
};

/// Complex mean over every subcarrier of the BWP.
WidebandCci wideband_average(const InterpolatedChannel& interp);

/// Full extraction chain: LS -> per-RB anchoring -> interpolation -> wideband mean.
WidebandCci extract_cci(const ResourceGrid& grid, const CsiRsConfig& cfg,
                        const PilotMap& pilots, int port = 0);

/// Debug dumps: anchors as (m0,re,im), interpolated vector as (k,re,im).
void dump_anchors_csv(const AnchorSeries& anchors, std::ostream& os);
void dump_interpolated_csv(const InterpolatedChannel& interp, std::ostream& os);

}  // namespace rissim
