// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "rissim/grid.hpp"
#include "rissim/report.hpp"
#include "rissim/ris_model.hpp"

namespace rissim {

/// Training patterns, one per row; entries are +1 / -1.
struct SensingMatrix {
  enum class Kind { Hadamard, Bernoulli };
  Eigen::MatrixXd q;
  Kind kind = Kind::Hadamard;

  int pilots() const { return static_cast<int>(q.rows()); }
  int elements() const { return static_cast<int>(q.cols()); }
};

/// Sylvester construction; requires p to be a power of two. Integer exact:
/// transpose(H) * H == p * I.
Eigen::MatrixXd hadamard_matrix(int p);

SensingMatrix hadamard_sensing(int p);

/// w x p matrix of i.i.d. equiprobable +1/-1 entries.
SensingMatrix bernoulli_sensing(int p, int w, uint64_t seed);

/// Stacked training book [Q; -Q] for differential acquisition.
Eigen::MatrixXd reflection_matrix(const SensingMatrix& q);

/// beta[i] = 1 iff q[i] < 0, so the applied gamma equals the row entry.
PhaseConfig pattern_from_row(const Eigen::VectorXd& q_row);

struct OmpParams {
  int pilots = 16;    // W
  int sparsity = 4;   // S

  void validate(int p) const;
};

struct MeasurementVector {
  Eigen::VectorXcd y;                 // one reported CCI per applied pattern
  std::vector<PhaseConfig> patterns;  // pattern used for each entry
  double scale = 1.0;                 // normalization applied before quantizing
};

/// Settings for one training sweep.
struct AcquireOptions {
  std::optional<QuantizerSpec> quant;  // nullopt bypasses quantization
  double noise_var = 0.0;              // fast path: per-measurement; grid path: per-RE
  double normalization_scale = 0.0;    // <= 0 selects sqrt(||zeta||^2 + |direct|^2)
  bool grid_emulation = false;
  std::optional<CsiRsConfig> csi_cfg;  // required when grid_emulation is set
  double scheduled_fraction = 0.0;     // only used by the grid path
};

/// Raw (pre-quantization) sweep: applies each row's pattern and measures the
/// wideband CCI, either directly from the element channel or through the full
/// grid synthesis + extraction chain.
struct RawSweep {
  Eigen::VectorXcd h_raw;
  std::vector<PhaseConfig> patterns;
  double scale = 1.0;
};

RawSweep sweep_measure(const ElementChannel& scn, const SensingMatrix& q,
                       const AcquireOptions& opt, uint64_t seed);

/// Quantizes each raw measurement through the report codec's quantizer (when
/// enabled) and returns the sensing vector in channel units.
MeasurementVector acquire(const ElementChannel& scn, const SensingMatrix& q,
                          const AcquireOptions& opt, uint64_t seed);

/// Applies the same quantize/dequantize step `acquire` uses to one raw value.
std::complex<double> requantize_measurement(std::complex<double> raw,
                                            const std::optional<QuantizerSpec>& quant,
                                            double scale);

struct HadamardResult {
  PhaseConfig beta;
  Eigen::VectorXcd g_hat;  // recovered element channel, global phase removed
  double phase = 0.0;      // removed global phase
};

/// Closed-form inversion of a full Hadamard sweep:
/// g = transpose(H) * y / P, rotate by -angle(sum g), beta = 1[Re g < 0].
HadamardResult hadamard_optimize(const Eigen::VectorXcd& y, int p);
HadamardResult hadamard_optimize(const MeasurementVector& y, int p);

struct OmpIteration {
  int atom = -1;
  double residual_norm = 0.0;    // after the LS update
  double max_corr_after = 0.0;   // max |z_j^H r| over the support, after LS
  Eigen::VectorXcd residual_before;
};

struct OmpResult {
  PhaseConfig beta;
  Eigen::VectorXcd g_hat;  // angular-domain estimate on the support
  Eigen::VectorXcd h_hat;  // element-domain estimate, global phase removed
  std::vector<int> support;
  std::vector<OmpIteration> trace;
  double initial_residual_norm = 0.0;
  double phase = 0.0;
  bool degenerate = false;  // zero correlations or rank-deficient LS hit
};

/// Greedy sparse recovery over the dictionary Z = Q * conj(F), followed by
/// element-domain reconstruction h = adjoint(F) * g and sign quantization.
OmpResult omp_optimize(const Eigen::VectorXcd& y, const SensingMatrix& q, const DftMatrix& dft,
                       const OmpParams& params);
OmpResult omp_optimize(const MeasurementVector& y, const SensingMatrix& q, const DftMatrix& dft,
                       const OmpParams& params);

}  // namespace rissim
