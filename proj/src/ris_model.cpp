// SPDX-License-Identifier: Apache-2.0

#include "rissim/ris_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "rissim/rng.hpp"

namespace rissim {

void RisGeometry::validate() const {
  if (x_elems < 1 || y_elems < 1)
    throw std::invalid_argument("RisGeometry: element counts must be >= 1");
}

PhaseConfig PhaseConfig::complemented() const {
  PhaseConfig out = *this;
  for (auto& b : out.beta) b = b ? 0 : 1;
  return out;
}

Bits PhaseConfig::to_bits() const {
  Bits out;
  for (uint8_t b : beta) out.append_bit(b != 0);
  return out;
}

PhaseConfig PhaseConfig::from_bits(const Bits& bits) {
  PhaseConfig out;
  out.beta.resize(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) out.beta[i] = bits.bit(i) ? 1 : 0;
  return out;
}

std::string PhaseConfig::to_string01() const {
  std::string s;
  s.reserve(beta.size());
  for (uint8_t b : beta) s.push_back(b ? '1' : '0');
  return s;
}

namespace {

Eigen::MatrixXcd dft_kernel(int n) {
  Eigen::MatrixXcd f(n, n);
  const double w = -2.0 * std::numbers::pi / static_cast<double>(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      f(a, b) = std::polar(1.0, w * static_cast<double>(a) * static_cast<double>(b));
  return f;
}

}  // namespace

DftMatrix build_dft(const RisGeometry& geom) {
  geom.validate();
  const Eigen::MatrixXcd fx = dft_kernel(geom.x_elems);
  const Eigen::MatrixXcd fy = dft_kernel(geom.y_elems);
  const int x = geom.x_elems, y = geom.y_elems;
  Eigen::MatrixXcd f(x * y, x * y);
  for (int a = 0; a < x; ++a)
    for (int b = 0; b < y; ++b)
      for (int c = 0; c < x; ++c)
        for (int d = 0; d < y; ++d) f(a * y + b, c * y + d) = fx(a, c) * fy(b, d);
  return DftMatrix{std::move(f), geom};
}

Eigen::VectorXcd element_from_angular(const DftMatrix& dft, const Eigen::VectorXcd& xi) {
  if (xi.size() != dft.f.rows())
    throw std::invalid_argument("element_from_angular: size mismatch");
  return dft.f.conjugate() * xi;
}

Eigen::VectorXcd angular_from_element(const DftMatrix& dft, const Eigen::VectorXcd& zeta) {
  if (zeta.size() != dft.f.rows())
    throw std::invalid_argument("angular_from_element: size mismatch");
  return (dft.f * zeta) / static_cast<double>(dft.size());
}

std::vector<int> AngularChannel::support() const {
  std::vector<int> out;
  for (Eigen::Index i = 0; i < xi.size(); ++i)
    if (xi[i] != std::complex<double>{0.0, 0.0}) out.push_back(static_cast<int>(i));
  return out;
}

AngularChannel draw_sparse_angular(const RisGeometry& geom, int sparsity, double amplitude,
                                   uint64_t seed, bool force_dc_atom) {
  geom.validate();
  const int p = geom.total();
  if (sparsity < 1 || sparsity > p)
    throw std::invalid_argument("draw_sparse_angular: sparsity must be in [1, P]");

  Rng rng(seed);
  // partial Fisher-Yates for the support positions
  std::vector<int> idx(p);
  for (int i = 0; i < p; ++i) idx[i] = i;
  const int start = force_dc_atom ? 1 : 0;  // idx[0] == 0 stays put
  for (int i = start; i < sparsity; ++i) {
    const int j = i + static_cast<int>(rng.integer(static_cast<uint64_t>(p - i)));
    std::swap(idx[i], idx[j]);
  }
  std::vector<int> support(idx.begin(), idx.begin() + sparsity);
  std::sort(support.begin(), support.end());

  AngularChannel out;
  out.xi = Eigen::VectorXcd::Zero(p);
  out.sparsity = sparsity;
  for (int s : support) out.xi[s] = amplitude * rng.cgaussian(1.0);
  return out;
}

ElementChannel synthesize_scenario(const RisGeometry& geom, int sparsity, double amplitude,
                                   uint64_t seed) {
  const DftMatrix dft = build_dft(geom);
  const AngularChannel ang = draw_sparse_angular(geom, sparsity, amplitude, seed);
  return ElementChannel{element_from_angular(dft, ang.xi), {0.0, 0.0}};
}

std::complex<double> effective_channel(const ElementChannel& scn, const PhaseConfig& cfg) {
  if (cfg.size() != scn.size())
    throw std::invalid_argument("effective_channel: phase config and channel sizes differ");
  std::complex<double> h = scn.direct;
  for (int i = 0; i < scn.size(); ++i) h += cfg.beta[i] ? -scn.zeta[i] : scn.zeta[i];
  return h;
}

double rsrp_db(const ElementChannel& scn, const PhaseConfig& cfg, double tx_power_db) {
  const double mag = std::abs(effective_channel(scn, cfg));
  const double val = tx_power_db + 20.0 * std::log10(mag);
  return std::max(val, -200.0);
}

ExhaustiveResult exhaustive_best(const ElementChannel& scn) {
  const int p = scn.size();
  if (p < 1 || p > 20)
    throw std::invalid_argument("exhaustive_best: P must be in [1, 20]");

  PhaseConfig cfg = PhaseConfig::zeros(p);
  ExhaustiveResult best{cfg, std::norm(effective_channel(scn, cfg))};
  const uint64_t count = uint64_t{1} << p;
  for (uint64_t c = 1; c < count; ++c) {
    // beta[0] is the most significant bit of c
    for (int i = 0; i < p; ++i) cfg.beta[i] = (c >> (p - 1 - i)) & 1u;
    const double power = std::norm(effective_channel(scn, cfg));
    if (power > best.power) {
      best.best = cfg;
      best.power = power;
    }
  }
  return best;
}

ScenarioSpec ScenarioSpec::from_config(const TextConfig& cfg) {
  try {
    ScenarioSpec spec;
    spec.geom.x_elems = static_cast<int>(cfg.get_int("geometry", "x"));
    spec.geom.y_elems = static_cast<int>(cfg.get_int("geometry", "y"));
    spec.sparsity = static_cast<int>(cfg.get_int("channel", "sparsity"));
    spec.amplitude = cfg.get_double_or("channel", "amplitude", 1.0);
    spec.direct = {cfg.get_double_or("channel", "direct_re", 0.0),
                   cfg.get_double_or("channel", "direct_im", 0.0)};
    spec.seed = cfg.get_uint_or("channel", "seed", 0);
    spec.geom.validate();
    return spec;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid scenario config: ") + e.what());
  }
}

ScenarioSpec ScenarioSpec::load(const std::string& path) {
  return from_config(TextConfig::load(path));
}

TextConfig ScenarioSpec::to_config() const {
  TextConfig cfg;
  char buf[40];
  cfg.set("geometry", "x", std::to_string(geom.x_elems));
  cfg.set("geometry", "y", std::to_string(geom.y_elems));
  cfg.set("channel", "sparsity", std::to_string(sparsity));
  std::snprintf(buf, sizeof(buf), "%.17g", amplitude);
  cfg.set("channel", "amplitude", buf);
  std::snprintf(buf, sizeof(buf), "%.17g", direct.real());
  cfg.set("channel", "direct_re", buf);
  std::snprintf(buf, sizeof(buf), "%.17g", direct.imag());
  cfg.set("channel", "direct_im", buf);
  cfg.set("channel", "seed", std::to_string(seed));
  return cfg;
}

void ScenarioSpec::save(const std::string& path) const { to_config().save(path); }

ElementChannel synthesize_scenario(const ScenarioSpec& spec) {
  ElementChannel scn = synthesize_scenario(spec.geom, spec.sparsity, spec.amplitude, spec.seed);
  scn.direct = spec.direct;
  return scn;
}

}  // namespace rissim
