// SPDX-License-Identifier: Apache-2.0

#include "rissim/ric_sim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "rissim/chanest.hpp"
#include "rissim/rng.hpp"

namespace rissim {

namespace {

namespace stream {
constexpr uint64_t kScenario = 0x7363656e01ull;
constexpr uint64_t kEpisode = 0x6570697301ull;
constexpr uint64_t kSensing = 0x73656e7301ull;
constexpr uint64_t kSweep = 0x7377656501ull;
constexpr uint64_t kPdfPhase = 0x7064665001ull;
constexpr uint64_t kPdfPilot = 0x7064665101ull;
constexpr uint64_t kPdfGrid = 0x7064665201ull;
}  // namespace stream

void append_u32_be(std::vector<uint8_t>& buf, uint32_t v) {
  buf.push_back(static_cast<uint8_t>(v >> 24));
  buf.push_back(static_cast<uint8_t>(v >> 16));
  buf.push_back(static_cast<uint8_t>(v >> 8));
  buf.push_back(static_cast<uint8_t>(v));
}

}  // namespace

std::vector<uint8_t> encode_frame(const E2Frame& frame) {
  if (frame.payload.size() > 0xFFFF)
    throw std::invalid_argument("encode_frame: payload too long");
  std::vector<uint8_t> buf;
  buf.reserve(7 + frame.payload.bytes().size());
  buf.push_back(static_cast<uint8_t>(frame.msg_type));
  append_u32_be(buf, frame.seq);
  buf.push_back(static_cast<uint8_t>(frame.payload.size() >> 8));
  buf.push_back(static_cast<uint8_t>(frame.payload.size() & 0xFF));
  const auto& bytes = frame.payload.bytes();
  buf.insert(buf.end(), bytes.begin(), bytes.end());
  return buf;
}

E2Frame decode_frame(const std::vector<uint8_t>& buf, std::size_t& offset) {
  if (offset + 7 > buf.size()) throw DecodeError("decode_frame: truncated header");
  const uint8_t type = buf[offset];
  if (type < 1 || type > 3) throw DecodeError("decode_frame: unknown message type");
  const uint32_t seq = (static_cast<uint32_t>(buf[offset + 1]) << 24) |
                       (static_cast<uint32_t>(buf[offset + 2]) << 16) |
                       (static_cast<uint32_t>(buf[offset + 3]) << 8) |
                       static_cast<uint32_t>(buf[offset + 4]);
  const std::size_t nbits = (static_cast<std::size_t>(buf[offset + 5]) << 8) |
                            static_cast<std::size_t>(buf[offset + 6]);
  const std::size_t nbytes = (nbits + 7) / 8;
  if (offset + 7 + nbytes > buf.size()) throw DecodeError("decode_frame: truncated payload");
  std::vector<uint8_t> payload(buf.begin() + offset + 7, buf.begin() + offset + 7 + nbytes);
  offset += 7 + nbytes;
  return E2Frame{static_cast<E2MsgType>(type), seq, Bits::from_bytes(payload, nbits)};
}

uint32_t E2Channel::send(E2MsgType type, Bits payload) {
  const uint32_t seq = next_seq_++;
  queue_.push_back(E2Frame{type, seq, std::move(payload)});
  return seq;
}

void E2Channel::push_frame(E2Frame frame) {
  next_seq_ = std::max(next_seq_, frame.seq + 1);
  queue_.push_back(std::move(frame));
}

E2Frame E2Channel::recv() {
  if (queue_.empty()) throw std::runtime_error("E2Channel::recv: no frame pending");
  E2Frame frame = std::move(queue_.front());
  queue_.pop_front();
  if (frame.seq <= last_delivered_)
    throw DecodeError("E2Channel::recv: sequence number not increasing");
  last_delivered_ = frame.seq;
  return frame;
}

void write_frames(const std::string& path, const std::vector<E2Frame>& frames) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_frames: cannot open " + path);
  for (const E2Frame& f : frames) {
    const auto buf = encode_frame(f);
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  }
}

std::vector<E2Frame> read_frames(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_frames: cannot open " + path);
  std::vector<uint8_t> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::vector<E2Frame> frames;
  std::size_t offset = 0;
  while (offset < buf.size()) frames.push_back(decode_frame(buf, offset));
  return frames;
}

std::string MethodSpec::name() const {
  if (kind == Kind::Hadamard) return "hadamard";
  return "omp(" + std::to_string(pilots) + "," + std::to_string(sparsity) + ")";
}

MethodSpec MethodSpec::parse(const std::string& text) {
  std::string s;
  for (char c : text)
    if (c != ' ' && c != '\t') s.push_back(c);
  if (s == "hadamard") return MethodSpec{Kind::Hadamard, 0, 0};
  if (s.rfind("omp(", 0) == 0 && s.back() == ')') {
    const auto comma = s.find(',');
    if (comma != std::string::npos && comma > 4) {
      try {
        const int w = std::stoi(s.substr(4, comma - 4));
        const int sp = std::stoi(s.substr(comma + 1, s.size() - comma - 2));
        if (w >= 1 && sp >= 1) return MethodSpec{Kind::Omp, w, sp};
      } catch (const std::exception&) {
        // fall through to the error below
      }
    }
  }
  throw ConfigError("unknown method '" + text + "'; expected hadamard or omp(W,S)");
}

void calibrate_to_baseline(ElementChannel& scn, double baseline_rsrp_db, double tx_power_db) {
  const double mag = std::abs(effective_channel(scn, PhaseConfig::zeros(scn.size())));
  const double scale = scn.zeta.norm() + std::abs(scn.direct);
  if (!(mag > 1e-12 * scale) || !(mag > 0.0))
    throw std::runtime_error("calibrate_to_baseline: baseline channel is (numerically) zero");
  const double target = std::pow(10.0, (baseline_rsrp_db - tx_power_db) / 20.0);
  const double k = target / mag;
  scn.zeta *= k;
  scn.direct *= k;
}

namespace {

Bits encode_raw_cci(std::complex<double> v) {
  Bits b;
  b.append(std::bit_cast<uint64_t>(v.real()), 64);
  b.append(std::bit_cast<uint64_t>(v.imag()), 64);
  return b;
}

std::complex<double> decode_raw_cci(const Bits& b) {
  if (b.size() != 128) throw DecodeError("raw CCI payload must be 128 bits");
  BitReader in(b);
  const double re = std::bit_cast<double>(in.read(64));
  const double im = std::bit_cast<double>(in.read(64));
  return {re, im};
}

}  // namespace

ResultRow run_episode(const ElementChannel& scn, const MethodSpec& method,
                      const EpisodeOptions& opt, uint64_t seed) {
  opt.geom.validate();
  const int p = scn.size();
  if (opt.geom.total() != p)
    throw std::invalid_argument("run_episode: geometry does not match the channel length");
  if (opt.grid_emulation && !opt.csi_cfg)
    throw std::invalid_argument("run_episode: grid emulation needs a CSI-RS config");

  ResultRow row;
  row.method = method.name();
  row.cci_bits = opt.quant ? opt.quant->bits : 0;
  row.seed = seed;

  const double baseline = rsrp_db(scn, PhaseConfig::zeros(p), opt.tx_power_db);

  SensingMatrix q;
  if (method.kind == MethodSpec::Kind::Hadamard) {
    q = hadamard_sensing(p);
    row.w = p;
    row.s = 0;
  } else {
    OmpParams params{method.pilots, method.sparsity};
    params.validate(p);
    q = bernoulli_sensing(p, method.pilots, derive_seed(seed, stream::kSensing));
    row.w = method.pilots;
    row.s = method.sparsity;
  }

  // noise is set relative to the sweep RMS; the AGC scale is chosen by acquire
  const double rms = std::sqrt(scn.zeta.squaredNorm() + std::norm(scn.direct));
  AcquireOptions aopt;
  aopt.quant = opt.quant;
  aopt.grid_emulation = opt.grid_emulation;
  aopt.csi_cfg = opt.csi_cfg;
  aopt.scheduled_fraction = opt.scheduled_fraction;
  aopt.noise_var =
      std::isinf(opt.meas_snr_db) ? 0.0 : rms * rms * std::pow(10.0, -opt.meas_snr_db / 10.0);

  const RawSweep sweep = sweep_measure(scn, q, aopt, derive_seed(seed, stream::kSweep));

  // UE -> CM xApp: baseline RSRP, then one CCI report per applied pattern.
  E2Channel uplink;
  {
    Bits b;
    b.append(static_cast<uint64_t>(rsrp_to_index(baseline)), 7);
    uplink.send(E2MsgType::RsrpReport, std::move(b));
  }
  for (Eigen::Index i = 0; i < sweep.h_raw.size(); ++i) {
    if (opt.quant) {
      CsiReport rep;
      rep.variant = ReportVariant::Ris;
      rep.cri = 0;
      rep.ri = 0;
      rep.cqi = 0;
      const double meas_rsrp =
          opt.tx_power_db + 20.0 * std::log10(std::max(std::abs(sweep.h_raw[i]), 1e-300));
      rep.rsrp_idx = static_cast<uint8_t>(rsrp_to_index(meas_rsrp));
      rep.cci = quantize(sweep.h_raw[i] / sweep.scale, *opt.quant);
      uplink.send(E2MsgType::CciReport, pack(rep));
    } else {
      uplink.send(E2MsgType::CciReport, encode_raw_cci(sweep.h_raw[i]));
    }
  }

  // CM xApp side: drain the channel into the sensing vector.
  const E2Frame rsrp_frame = uplink.recv();
  if (rsrp_frame.msg_type != E2MsgType::RsrpReport)
    throw DecodeError("run_episode: expected the baseline RSRP report first");
  Eigen::VectorXcd y(sweep.h_raw.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const E2Frame f = uplink.recv();
    if (f.msg_type != E2MsgType::CciReport)
      throw DecodeError("run_episode: expected a CCI report frame");
    if (opt.quant) {
      const CsiReport rep = unpack(f.payload, ReportVariant::Ris, opt.quant);
      y[i] = dequantize(*rep.cci) * sweep.scale;
    } else {
      y[i] = decode_raw_cci(f.payload);
    }
  }

  // RO xApp side: recover a phase configuration and command it.
  PhaseConfig beta;
  if (method.kind == MethodSpec::Kind::Hadamard) {
    beta = hadamard_optimize(y, p).beta;
  } else {
    const DftMatrix dft = build_dft(opt.geom);
    beta = omp_optimize(y, q, dft, OmpParams{method.pilots, method.sparsity}).beta;
  }

  E2Channel downlink;
  downlink.send(E2MsgType::RisCommand, beta.to_bits());
  const E2Frame cmd = downlink.recv();
  if (cmd.msg_type != E2MsgType::RisCommand)
    throw DecodeError("run_episode: expected a RIS command frame");
  const PhaseConfig applied = PhaseConfig::from_bits(cmd.payload);

  row.baseline_rsrp_db = baseline;
  row.optimized_rsrp_db = rsrp_db(scn, applied, opt.tx_power_db);
  row.gain_db = row.optimized_rsrp_db - row.baseline_rsrp_db;
  row.measurements_used = static_cast<int>(y.size());
  row.ok = true;
  return row;
}

ExperimentPlan ExperimentPlan::from_config(const TextConfig& cfg) {
  try {
    ExperimentPlan plan;
    plan.scenario.geom.x_elems = static_cast<int>(cfg.get_int_or("scenario", "x", 8));
    plan.scenario.geom.y_elems = static_cast<int>(cfg.get_int_or("scenario", "y", 8));
    plan.scenario.sparsity = static_cast<int>(cfg.get_int_or("scenario", "sparsity", 8));
    plan.scenario.amplitude = cfg.get_double_or("scenario", "amplitude", 1.0);
    plan.scenario.dc_gain = cfg.get_double_or("scenario", "dc_gain", 0.35);
    plan.scenario.direct = {cfg.get_double_or("scenario", "direct_re", 0.0),
                            cfg.get_double_or("scenario", "direct_im", 0.0)};
    plan.scenario.meas_snr_db = cfg.get_double_or("scenario", "meas_snr_db",
                                                  std::numeric_limits<double>::infinity());
    plan.scenario.baseline_rsrp_db = cfg.get_double_or("scenario", "baseline_rsrp_db", -110.0);

    if (cfg.has("plan", "methods")) {
      plan.methods.clear();
      for (const auto& m : cfg.get_list("plan", "methods"))
        plan.methods.push_back(MethodSpec::parse(m));
    }
    if (cfg.has("plan", "cci_bits")) plan.cci_bits = cfg.get_int_list("plan", "cci_bits");
    plan.trials = static_cast<int>(cfg.get_int_or("plan", "trials", 25));
    plan.master_seed = cfg.get_uint_or("plan", "seed", 1);
    plan.grid_emulation = cfg.get_bool_or("plan", "grid_emulation", false);
    plan.scheduled_fraction = cfg.get_double_or("plan", "scheduled_fraction", 0.5);
    plan.grid_num_prbs = static_cast<int>(cfg.get_int_or("plan", "grid_num_prbs", 106));
    plan.validate();
    return plan;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid plan: ") + e.what());
  }
}

ExperimentPlan ExperimentPlan::load(const std::string& path) {
  return from_config(TextConfig::load(path));
}

void ExperimentPlan::validate() const {
  scenario.geom.validate();
  if (methods.empty()) throw std::invalid_argument("ExperimentPlan: no methods");
  if (cci_bits.empty()) throw std::invalid_argument("ExperimentPlan: no cci_bits");
  for (int b : cci_bits)
    if (b < 0 || b > 8)
      throw std::invalid_argument("ExperimentPlan: cci_bits entries must be in [0, 8]");
  if (trials < 1) throw std::invalid_argument("ExperimentPlan: trials must be >= 1");
  const int p = scenario.geom.total();
  if (scenario.sparsity < 1 || scenario.sparsity > p)
    throw std::invalid_argument("ExperimentPlan: sparsity must be in [1, P]");
  if (!(scenario.dc_gain > 0.0))
    throw std::invalid_argument("ExperimentPlan: dc_gain must be > 0");
}

PlanResult run_plan(const ExperimentPlan& plan) {
  plan.validate();
  PlanResult out;
  const DftMatrix dft = build_dft(plan.scenario.geom);

  std::optional<CsiRsConfig> csi_cfg;
  if (plan.grid_emulation) {
    BwpConfig bwp;
    bwp.num_prbs = plan.grid_num_prbs;
    csi_cfg = CsiRsConfig::two_port_fd_cdm2(bwp);
  }

  for (std::size_t mi = 0; mi < plan.methods.size(); ++mi) {
    const MethodSpec& method = plan.methods[mi];
    for (int bits : plan.cci_bits) {
      CellSummary cell;
      cell.method = method.name();
      cell.cci_bits = bits;
      double gain_sum = 0.0;
      int gain_count = 0;
      for (int t = 0; t < plan.trials; ++t) {
        const uint64_t scn_seed = derive_seed(plan.master_seed, stream::kScenario, t);
        const uint64_t ep_seed = derive_seed(plan.master_seed, stream::kEpisode, mi, t);
        ResultRow row;
        try {
          // the harness keeps an attenuated boresight atom in the support so
          // the all-zeros baseline is weak but nonzero and can be pinned to
          // the anchor
          AngularChannel ang =
              draw_sparse_angular(plan.scenario.geom, plan.scenario.sparsity,
                                  plan.scenario.amplitude, scn_seed, /*force_dc_atom=*/true);
          ang.xi[0] *= plan.scenario.dc_gain;
          ElementChannel scn{element_from_angular(dft, ang.xi), plan.scenario.direct};
          calibrate_to_baseline(scn, plan.scenario.baseline_rsrp_db, 0.0);

          EpisodeOptions opt;
          opt.geom = plan.scenario.geom;
          if (bits > 0) opt.quant = QuantizerSpec::for_bits(bits);
          opt.meas_snr_db = plan.scenario.meas_snr_db;
          opt.grid_emulation = plan.grid_emulation;
          opt.csi_cfg = csi_cfg;
          opt.scheduled_fraction = plan.scheduled_fraction;
          row = run_episode(scn, method, opt, ep_seed);
        } catch (const std::exception& e) {
          row.method = method.name();
          row.cci_bits = bits;
          row.seed = ep_seed;
          row.ok = false;
          row.error = e.what();
          row.baseline_rsrp_db = row.optimized_rsrp_db = row.gain_db =
              std::numeric_limits<double>::quiet_NaN();
        }
        row.trial = t;
        cell.rows += 1;
        if (row.ok) {
          gain_sum += row.gain_db;
          gain_count += 1;
        } else {
          cell.failures += 1;
        }
        out.rows.push_back(std::move(row));
      }
      cell.mean_gain_db = gain_count > 0 ? gain_sum / gain_count
                                         : std::numeric_limits<double>::quiet_NaN();
      out.summary.push_back(std::move(cell));
    }
  }
  return out;
}

void write_results_csv(const std::vector<ResultRow>& rows, std::ostream& os) {
  os << "method,W,S,cci_bits,trial,seed,baseline_rsrp_db,optimized_rsrp_db,gain_db,"
        "measurements_used\n";
  char buf[256];
  for (const ResultRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%d,%d,%d,%d,%llu,%.6f,%.6f,%.6f,%d\n",
                  r.method.c_str(), r.w, r.s, r.cci_bits, r.trial,
                  static_cast<unsigned long long>(r.seed), r.baseline_rsrp_db,
                  r.optimized_rsrp_db, r.gain_db, r.measurements_used);
    os << buf;
  }
}

void write_summary_csv(const std::vector<CellSummary>& summary, std::ostream& os) {
  os << "method,cci_bits,rows,failures,mean_gain_db\n";
  char buf[160];
  for (const CellSummary& c : summary) {
    std::snprintf(buf, sizeof(buf), "%s,%d,%d,%d,%.6f\n", c.method.c_str(), c.cci_bits, c.rows,
                  c.failures, c.mean_gain_db);
    os << buf;
  }
}

int Histogram::peak_bin(double min_edge) const {
  int best = -1;
  double best_mass = -1.0;
  for (std::size_t i = 0; i < mass.size(); ++i) {
    if (edges[i] < min_edge) continue;
    if (mass[i] > best_mass) {
      best_mass = mass[i];
      best = static_cast<int>(i);
    }
  }
  return best;
}

Histogram pdf_experiment(const CsiRsConfig& cfg, double scheduled_fraction, int trials,
                         double amplitude, double noise_var, int bins, uint64_t seed) {
  cfg.validate();
  if (trials < 1) throw std::invalid_argument("pdf_experiment: trials must be >= 1");
  if (bins < 2) throw std::invalid_argument("pdf_experiment: bins must be >= 2");
  if (!(amplitude > 0.0)) throw std::invalid_argument("pdf_experiment: amplitude must be > 0");

  Histogram hist;
  const double hi = 2.0 * amplitude;
  const double width = hi / bins;
  hist.edges.resize(bins + 1);
  for (int i = 0; i <= bins; ++i) hist.edges[i] = i * width;
  std::vector<uint64_t> counts(bins, 0);

  for (int t = 0; t < trials; ++t) {
    Rng phase_rng(derive_seed(seed, stream::kPdfPhase, t));
    const std::complex<double> h =
        std::polar(amplitude, 2.0 * std::numbers::pi * phase_rng.uniform());
    const PilotMap pilots = generate_pilots(cfg, derive_seed(seed, stream::kPdfPilot, t));
    const ResourceGrid grid = synthesize_received_grid(
        cfg, pilots, h, noise_var, scheduled_fraction, derive_seed(seed, stream::kPdfGrid, t));
    for (int n = 0; n < grid.num_symbols(); ++n) {
      for (int m = 0; m < grid.num_subcarriers(); ++m) {
        const double v = std::abs(grid.data(m, n));
        int b = static_cast<int>(v / width);
        b = std::min(std::max(b, 0), bins - 1);
        counts[b] += 1;
        hist.total_count += 1;
      }
    }
  }
  hist.mass.resize(bins);
  for (int i = 0; i < bins; ++i)
    hist.mass[i] = static_cast<double>(counts[i]) / static_cast<double>(hist.total_count);
  return hist;
}

void write_histogram_csv(const Histogram& hist, std::ostream& os) {
  os << "bin_lo,bin_hi,mass\n";
  char buf[120];
  for (std::size_t i = 0; i < hist.mass.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g\n", hist.edges[i], hist.edges[i + 1],
                  hist.mass[i]);
    os << buf;
  }
}

void write_gain_plot_script(std::ostream& os, const std::string& summary_csv,
                            const std::vector<std::string>& methods) {
  os << "# gnuplot script: mean optimization gain per method and CCI bit depth\n"
        "set datafile separator \",\"\n"
        "set key autotitle columnhead\n"
        "set xlabel \"CCI bits per component\"\n"
        "set ylabel \"mean gain [dB]\"\n"
        "set key left top\n"
        "set grid\n";
  if (methods.empty()) {
    os << "plot \"" << summary_csv << "\" using 2:5 with points pt 7 title \"mean gain\"\n";
    return;
  }
  os << "plot ";
  for (std::size_t i = 0; i < methods.size(); ++i) {
    if (i > 0) os << ", \\\n     ";
    os << "\"" << summary_csv << "\" using 2:(strcol(1) eq \"" << methods[i]
       << "\" ? $5 : 1/0) with linespoints title \"" << methods[i] << "\"";
  }
  os << "\n";
}

void write_pdf_plot_script(std::ostream& os, const std::string& histogram_csv) {
  os << "# gnuplot script: empirical amplitude PDF\n"
        "set datafile separator \",\"\n"
        "set key autotitle columnhead\n"
        "set xlabel \"|H|\"\n"
        "set ylabel \"probability mass\"\n"
        "set style fill solid 0.6\n"
        "plot \""
     << histogram_csv << "\" using (($1+$2)/2):3 with boxes title \"empirical PDF\"\n";
}

}  // namespace rissim
