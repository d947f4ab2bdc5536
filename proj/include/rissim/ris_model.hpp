// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rissim/bits.hpp"
#include "rissim/textconfig.hpp"

namespace rissim {

struct RisGeometry {
  int x_elems = 1;
  int y_elems = 1;

  int total() const { return x_elems * y_elems; }
  void validate() const;
};

/// Binary phase bits: beta[i] == 0 applies phase 0 (gamma +1),
/// beta[i] == 1 applies phase pi (gamma -1). Element i sits at row-major
/// position (x, y) = (i / Y, i % Y).
struct PhaseConfig {
  std::vector<uint8_t> beta;

  static PhaseConfig zeros(int p) { return PhaseConfig{std::vector<uint8_t>(p, 0)}; }
  int size() const { return static_cast<int>(beta.size()); }
  int gamma(int i) const { return beta[i] ? -1 : 1; }
  PhaseConfig complemented() const;

  Bits to_bits() const;
  static PhaseConfig from_bits(const Bits& bits);
  std::string to_string01() const;

  friend bool operator==(const PhaseConfig&, const PhaseConfig&) = default;
};

/// Element-domain channel: one cascaded complex gain per RIS element plus an
/// optional direct Tx-Rx term.
struct ElementChannel {
  Eigen::VectorXcd zeta;
  std::complex<double> direct{0.0, 0.0};

  int size() const { return static_cast<int>(zeta.size()); }
};

struct AngularChannel {
  Eigen::VectorXcd xi;
  int sparsity = 0;

  std::vector<int> support() const;
};

/// 2D-DFT over the RIS aperture: Kronecker product of the unnormalized X- and
/// Y-point DFT kernels, so conj(F) * F == XY * I.
struct DftMatrix {
  Eigen::MatrixXcd f;
  RisGeometry geom;

  int size() const { return static_cast<int>(f.rows()); }
};

DftMatrix build_dft(const RisGeometry& geom);

/// zeta = conj(F) * xi
Eigen::VectorXcd element_from_angular(const DftMatrix& dft, const Eigen::VectorXcd& xi);
/// xi = F * zeta / (XY)
Eigen::VectorXcd angular_from_element(const DftMatrix& dft, const Eigen::VectorXcd& zeta);

/// Draws a sparse angular channel: `sparsity` support positions chosen
/// uniformly without replacement, complex Gaussian values with RMS `amplitude`.
/// With `force_dc_atom` the boresight atom (index 0) is always part of the
/// support; the element sum then stays nonzero, which an anchored-baseline
/// calibration needs (sum(zeta) == XY * xi[0]).
AngularChannel draw_sparse_angular(const RisGeometry& geom, int sparsity, double amplitude,
                                   uint64_t seed, bool force_dc_atom = false);

ElementChannel synthesize_scenario(const RisGeometry& geom, int sparsity, double amplitude,
                                   uint64_t seed);

/// h = sum_i gamma_i * zeta_i + direct
std::complex<double> effective_channel(const ElementChannel& scn, const PhaseConfig& cfg);

/// tx_power_db + 20 log10 |h|, floored at -200 dB.
double rsrp_db(const ElementChannel& scn, const PhaseConfig& cfg, double tx_power_db);

struct ExhaustiveResult {
  PhaseConfig best;
  double power = 0.0;  // |h|^2 at the optimum
};

/// Enumerates all 2^P phase configurations (P <= 20). Ties resolve to the
/// lowest beta read as a binary number with beta[0] most significant.
ExhaustiveResult exhaustive_best(const ElementChannel& scn);

/// Parameters that reproduce a scenario draw; serializable as text.
struct ScenarioSpec {
  RisGeometry geom{8, 8};
  int sparsity = 8;
  double amplitude = 1.0;
  std::complex<double> direct{0.0, 0.0};
  uint64_t seed = 0;

  static ScenarioSpec from_config(const TextConfig& cfg);
  static ScenarioSpec load(const std::string& path);
  TextConfig to_config() const;
  void save(const std::string& path) const;
};

ElementChannel synthesize_scenario(const ScenarioSpec& spec);

}  // namespace rissim
