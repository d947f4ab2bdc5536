// SPDX-License-Identifier: Apache-2.0

#include "rissim/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rissim/chanest.hpp"
#include "rissim/rng.hpp"

namespace rissim {

namespace {

bool is_power_of_two(int p) { return p >= 1 && (p & (p - 1)) == 0; }

namespace stream {
constexpr uint64_t kMeasNoise = 0x6d65617301ull;
constexpr uint64_t kPilots = 0x70696c6f01ull;
constexpr uint64_t kGrid = 0x6772696401ull;
}  // namespace stream

// crest-factor headroom of the automatic AGC scale: full scale sits 3.5 dB
// above the sweep RMS so Gaussian-like measurements rarely clip
constexpr double kAgcHeadroom = 1.5;

}  // namespace

Eigen::MatrixXd hadamard_matrix(int p) {
  if (!is_power_of_two(p))
    throw std::invalid_argument("hadamard_matrix: size must be a power of two");
  Eigen::MatrixXd h(1, 1);
  h(0, 0) = 1.0;
  for (int n = 1; n < p; n *= 2) {
    Eigen::MatrixXd next(2 * n, 2 * n);
    next.topLeftCorner(n, n) = h;
    next.topRightCorner(n, n) = h;
    next.bottomLeftCorner(n, n) = h;
    next.bottomRightCorner(n, n) = -h;
    h = std::move(next);
  }
  return h;
}

SensingMatrix hadamard_sensing(int p) {
  return SensingMatrix{hadamard_matrix(p), SensingMatrix::Kind::Hadamard};
}

SensingMatrix bernoulli_sensing(int p, int w, uint64_t seed) {
  if (p < 1) throw std::invalid_argument("bernoulli_sensing: p must be >= 1");
  if (w < 1) throw std::invalid_argument("bernoulli_sensing: w must be >= 1");
  Rng rng(seed);
  Eigen::MatrixXd q(w, p);
  for (int r = 0; r < w; ++r)
    for (int c = 0; c < p; ++c) q(r, c) = rng.integer(2) ? 1.0 : -1.0;
  return SensingMatrix{std::move(q), SensingMatrix::Kind::Bernoulli};
}

Eigen::MatrixXd reflection_matrix(const SensingMatrix& q) {
  Eigen::MatrixXd r(2 * q.pilots(), q.elements());
  r.topRows(q.pilots()) = q.q;
  r.bottomRows(q.pilots()) = -q.q;
  return r;
}

PhaseConfig pattern_from_row(const Eigen::VectorXd& q_row) {
  PhaseConfig cfg;
  cfg.beta.resize(q_row.size());
  for (Eigen::Index i = 0; i < q_row.size(); ++i) {
    if (q_row[i] != 1.0 && q_row[i] != -1.0)
      throw std::invalid_argument("pattern_from_row: entries must be +1 or -1");
    cfg.beta[i] = q_row[i] < 0.0 ? 1 : 0;
  }
  return cfg;
}

void OmpParams::validate(int p) const {
  if (sparsity < 1 || sparsity > pilots || pilots > p)
    throw std::invalid_argument("OmpParams: need 1 <= S <= W <= P");
}

RawSweep sweep_measure(const ElementChannel& scn, const SensingMatrix& q,
                       const AcquireOptions& opt, uint64_t seed) {
  if (q.elements() != scn.size())
    throw std::invalid_argument("sweep_measure: sensing matrix width must equal P");
  if (opt.grid_emulation && !opt.csi_cfg)
    throw std::invalid_argument("sweep_measure: grid emulation needs a CSI-RS config");

  RawSweep sweep;
  sweep.scale = opt.normalization_scale > 0.0
                    ? opt.normalization_scale
                    : kAgcHeadroom * std::sqrt(scn.zeta.squaredNorm() + std::norm(scn.direct));
  if (!(sweep.scale > 0.0)) sweep.scale = 1.0;

  const int w = q.pilots();
  sweep.h_raw.resize(w);
  sweep.patterns.reserve(w);

  Rng noise_rng(derive_seed(seed, stream::kMeasNoise));
  PilotMap pilots;
  if (opt.grid_emulation)
    pilots = generate_pilots(*opt.csi_cfg, derive_seed(seed, stream::kPilots));

  for (int i = 0; i < w; ++i) {
    PhaseConfig pattern = pattern_from_row(q.q.row(i));
    std::complex<double> h = effective_channel(scn, pattern);
    if (opt.grid_emulation) {
      const ResourceGrid grid =
          synthesize_received_grid(*opt.csi_cfg, pilots, h, opt.noise_var,
                                   opt.scheduled_fraction, derive_seed(seed, stream::kGrid, i));
      h = extract_cci(grid, *opt.csi_cfg, pilots).value;
    } else if (opt.noise_var > 0.0) {
      h += noise_rng.cgaussian(opt.noise_var);
    }
    sweep.h_raw[i] = h;
    sweep.patterns.push_back(std::move(pattern));
  }
  return sweep;
}

std::complex<double> requantize_measurement(std::complex<double> raw,
                                            const std::optional<QuantizerSpec>& quant,
                                            double scale) {
  if (!quant) return raw;
  return dequantize(quantize(raw / scale, *quant)) * scale;
}

MeasurementVector acquire(const ElementChannel& scn, const SensingMatrix& q,
                          const AcquireOptions& opt, uint64_t seed) {
  RawSweep sweep = sweep_measure(scn, q, opt, seed);
  MeasurementVector out;
  out.patterns = std::move(sweep.patterns);
  out.scale = sweep.scale;
  out.y.resize(sweep.h_raw.size());
  for (Eigen::Index i = 0; i < sweep.h_raw.size(); ++i)
    out.y[i] = requantize_measurement(sweep.h_raw[i], opt.quant, sweep.scale);
  return out;
}

namespace {

// Rotates so the component sum lands on the positive real axis; a zero sum
// leaves the vector untouched.
double remove_global_phase(Eigen::VectorXcd& v) {
  std::complex<double> sum{0.0, 0.0};
  for (Eigen::Index i = 0; i < v.size(); ++i) sum += v[i];
  if (sum == std::complex<double>{0.0, 0.0}) return 0.0;
  const double phase = std::arg(sum);
  const std::complex<double> rot = std::polar(1.0, -phase);
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] *= rot;
  return phase;
}

PhaseConfig sign_quantize(const Eigen::VectorXcd& v) {
  PhaseConfig cfg;
  cfg.beta.resize(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) cfg.beta[i] = v[i].real() < 0.0 ? 1 : 0;
  return cfg;
}

}  // namespace

HadamardResult hadamard_optimize(const Eigen::VectorXcd& y, int p) {
  if (!is_power_of_two(p))
    throw std::invalid_argument("hadamard_optimize: P must be a power of two");
  if (y.size() != p)
    throw std::invalid_argument("hadamard_optimize: measurement count must equal P");

  const Eigen::MatrixXd h = hadamard_matrix(p);
  HadamardResult res;
  res.g_hat.resize(p);
  for (int i = 0; i < p; ++i) {
    std::complex<double> acc{0.0, 0.0};
    for (int w = 0; w < p; ++w) acc += h(w, i) * y[w];  // transpose(H) * y
    res.g_hat[i] = acc / static_cast<double>(p);
  }
  res.phase = remove_global_phase(res.g_hat);
  res.beta = sign_quantize(res.g_hat);
  return res;
}

HadamardResult hadamard_optimize(const MeasurementVector& y, int p) {
  return hadamard_optimize(y.y, p);
}

OmpResult omp_optimize(const Eigen::VectorXcd& y, const SensingMatrix& q, const DftMatrix& dft,
                       const OmpParams& params) {
  const int p = dft.size();
  params.validate(p);
  if (q.elements() != p)
    throw std::invalid_argument("omp_optimize: sensing matrix width must equal P");
  if (q.pilots() != params.pilots || y.size() != params.pilots)
    throw std::invalid_argument("omp_optimize: measurement count must equal W");

  // dictionary: one column per angular atom
  const Eigen::MatrixXcd z = q.q.cast<std::complex<double>>() * dft.f.conjugate();
  Eigen::VectorXd col_norms(p);
  for (int j = 0; j < p; ++j) col_norms[j] = z.col(j).squaredNorm();

  OmpResult res;
  Eigen::VectorXcd residual = y;
  res.initial_residual_norm = residual.norm();
  Eigen::VectorXcd solution;

  for (int s = 0; s < params.sparsity; ++s) {
    OmpIteration iter;
    iter.residual_before = residual;

    // correlation rho_j = |z_j^H r|^2 / (z_j^H z_j); ties resolve to the
    // lowest atom index
    int best_atom = 0;
    double best_rho = -1.0;
    for (int j = 0; j < p; ++j) {
      const double rho =
          col_norms[j] > 0.0 ? std::norm(z.col(j).dot(residual)) / col_norms[j] : 0.0;
      if (rho > best_rho) {
        best_rho = rho;
        best_atom = j;
      }
    }
    if (best_rho <= 0.0) res.degenerate = true;
    iter.atom = best_atom;
    if (std::find(res.support.begin(), res.support.end(), best_atom) == res.support.end())
      res.support.push_back(best_atom);

    // least squares on the active set via normal equations
    const int k = static_cast<int>(res.support.size());
    Eigen::MatrixXcd z_act(params.pilots, k);
    for (int c = 0; c < k; ++c) z_act.col(c) = z.col(res.support[c]);
    Eigen::MatrixXcd gram = z_act.adjoint() * z_act;
    const Eigen::VectorXcd rhs = z_act.adjoint() * y;

    Eigen::LDLT<Eigen::MatrixXcd> ldlt(gram);
    bool deficient = ldlt.info() != Eigen::Success;
    if (!deficient) {
      const Eigen::VectorXd d = ldlt.vectorD().real();
      const double dmax = d.cwiseAbs().maxCoeff();
      if (!(d.cwiseAbs().minCoeff() > 1e-12 * std::max(1.0, dmax))) deficient = true;
    }
    if (deficient) {
      res.degenerate = true;
      gram.diagonal().array() += 1e-12;  // ridge
      ldlt.compute(gram);
    }
    solution = ldlt.solve(rhs);

    residual = y - z_act * solution;
    iter.residual_norm = residual.norm();
    double max_corr = 0.0;
    for (int c = 0; c < k; ++c)
      max_corr = std::max(max_corr, std::abs(z_act.col(c).dot(residual)));
    iter.max_corr_after = max_corr;
    res.trace.push_back(std::move(iter));
  }

  res.g_hat = Eigen::VectorXcd::Zero(p);
  for (std::size_t c = 0; c < res.support.size(); ++c)
    res.g_hat[res.support[c]] = solution[static_cast<Eigen::Index>(c)];

  res.h_hat = dft.f.adjoint() * res.g_hat;
  res.phase = remove_global_phase(res.h_hat);
  res.beta = sign_quantize(res.h_hat);
  return res;
}

OmpResult omp_optimize(const MeasurementVector& y, const SensingMatrix& q, const DftMatrix& dft,
                       const OmpParams& params) {
  return omp_optimize(y.y, q, dft, params);
}

}  // namespace rissim
