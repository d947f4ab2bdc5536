// SPDX-License-Identifier: Apache-2.0

#include "rissim/chanest.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace rissim {

LsEstimateSet ls_estimate(const ResourceGrid& grid, const PilotMap& pilots,
                          const std::vector<ReCoord>& re_set) {
  LsEstimateSet out;
  for (const ReCoord& c : re_set) {
    if (c.m < 0 || c.m >= grid.num_subcarriers() || c.n < 0 || c.n >= grid.num_symbols())
      throw std::invalid_argument("ls_estimate: RE outside the grid");
    const auto it = pilots.find(c);
    if (it == pilots.end())
      throw std::invalid_argument("ls_estimate: RE has no pilot symbol");
    const std::complex<double> x = it->second;
    const double mag2 = std::norm(x);
    if (mag2 <= 0.0)
      throw std::invalid_argument("ls_estimate: zero-magnitude pilot symbol");
    out.entries[c] = grid.data(c.m, c.n) * std::conj(x) / mag2;
  }
  return out;
}

AnchorSeries anchor(const LsEstimateSet& ls, const CsiRsConfig& cfg) {
  if (ls.entries.empty()) throw std::invalid_argument("anchor: empty LS estimate set");
  struct Acc {
    std::complex<double> sum{0.0, 0.0};
    int count = 0;
    int min_m = 0;
  };
  std::map<int, Acc> per_rb;
  for (const auto& [c, v] : ls.entries) {
    const int rb = (c.m - cfg.bwp.first_subcarrier) / kSubcarriersPerRb;
    auto [it, inserted] = per_rb.try_emplace(rb);
    Acc& acc = it->second;
    acc.sum += v;
    acc.count += 1;
    acc.min_m = inserted ? c.m : std::min(acc.min_m, c.m);
  }
  AnchorSeries out;
  for (const auto& [rb, acc] : per_rb) {
    out.anchors[acc.min_m] = acc.sum / static_cast<double>(acc.count);
    out.n_grp = acc.count;
  }
  return out;
}

InterpWeights interpolation_weights(const AnchorSeries& series, int k, int taps) {
  if (series.anchors.empty())
    throw std::invalid_argument("interpolation_weights: no anchors");
  if (taps < 2) throw std::invalid_argument("interpolation_weights: taps must be >= 2");
  const int half = taps / 2;
  const auto& anchors = series.anchors;

  auto hi = anchors.lower_bound(k);  // first anchor at or above k
  if (hi != anchors.end() && hi->first == k)
    return InterpWeights{k, k, 1.0, 0.0};
  auto lo = hi;
  const bool has_lo = lo != anchors.begin();
  if (has_lo) --lo;  // greatest anchor below k
  const bool has_hi = hi != anchors.end();

  const bool lo_in = has_lo && (k - lo->first) <= half;
  const bool hi_in = has_hi && (hi->first - k) <= half;
  if (lo_in && hi_in) {
    const double span = static_cast<double>(hi->first - lo->first);
    const double w_hi = static_cast<double>(k - lo->first) / span;
    return InterpWeights{lo->first, hi->first, 1.0 - w_hi, w_hi};
  }
  if (lo_in) return InterpWeights{lo->first, lo->first, 1.0, 0.0};
  if (hi_in) return InterpWeights{hi->first, hi->first, 1.0, 0.0};
  // nothing inside the window: constant from the globally nearest anchor
  int best;
  if (!has_lo) {
    best = hi->first;
  } else if (!has_hi) {
    best = lo->first;
  } else {
    best = (k - lo->first) <= (hi->first - k) ? lo->first : hi->first;
  }
  return InterpWeights{best, best, 1.0, 0.0};
}

InterpolatedChannel interpolate(const AnchorSeries& anchors, const BwpConfig& bwp, int taps) {
  bwp.validate();
  if (anchors.anchors.empty()) throw std::invalid_argument("interpolate: no anchors");
  InterpolatedChannel out;
  out.taps = taps;
  out.values.resize(bwp.num_subcarriers());
  for (int k = 0; k < bwp.num_subcarriers(); ++k) {
    const InterpWeights w = interpolation_weights(anchors, k, taps);
    std::complex<double> v = w.w_lo * anchors.anchors.at(w.m_lo);
    if (w.w_hi != 0.0) v += w.w_hi * anchors.anchors.at(w.m_hi);
    out.values[k] = v;
  }
  return out;
}

WidebandCci wideband_average(const InterpolatedChannel& interp) {
  if (interp.values.size() == 0)
    throw std::invalid_argument("wideband_average: empty channel vector");
  std::complex<double> sum{0.0, 0.0};
  for (Eigen::Index k = 0; k < interp.values.size(); ++k) sum += interp.values[k];
  return WidebandCci{sum / static_cast<double>(interp.values.size()), 0, 0};
}

WidebandCci extract_cci(const ResourceGrid& grid, const CsiRsConfig& cfg,
                        const PilotMap& pilots, int port) {
  const auto re_set = enumerate_re_set(cfg, port);
  const auto ls = ls_estimate(grid, pilots, re_set);
  const auto anchors = anchor(ls, cfg);
  const auto interp = interpolate(anchors, cfg.bwp);
  WidebandCci cci = wideband_average(interp);
  cci.port = port;
  return cci;
}

void dump_anchors_csv(const AnchorSeries& anchors, std::ostream& os) {
  os << "m0,re,im\n";
  char buf[80];
  for (const auto& [m0, v] : anchors.anchors) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g\n", m0, v.real(), v.imag());
    os << buf;
  }
}

void dump_interpolated_csv(const InterpolatedChannel& interp, std::ostream& os) {
  os << "k,re,im\n";
  char buf[80];
  for (Eigen::Index k = 0; k < interp.values.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%lld,%.17g,%.17g\n", static_cast<long long>(k),
                  interp.values[k].real(), interp.values[k].imag());
    os << buf;
  }
}

}  // namespace rissim
