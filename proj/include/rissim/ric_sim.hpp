// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <deque>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rissim/bits.hpp"
#include "rissim/grid.hpp"
#include "rissim/optimize.hpp"
#include "rissim/report.hpp"
#include "rissim/ris_model.hpp"
#include "rissim/textconfig.hpp"

namespace rissim {

enum class E2MsgType : uint8_t {
  CciReport = 1,
  RsrpReport = 2,
  RisCommand = 3,
};

/// Length-prefixed message on the controller interface. Payload is an opaque
/// bit string (a packed CSI report, a raw CCI sample or a phase-bit vector).
struct E2Frame {
  E2MsgType msg_type = E2MsgType::CciReport;
  uint32_t seq = 0;
  Bits payload;

  friend bool operator==(const E2Frame&, const E2Frame&) = default;
};

/// Wire format: type (1 byte), seq (4 bytes BE), payload bit count
/// (2 bytes BE), payload bytes zero-padded to a byte boundary.
std::vector<uint8_t> encode_frame(const E2Frame& frame);
E2Frame decode_frame(const std::vector<uint8_t>& buf, std::size_t& offset);

/// In-process frame queue with strictly increasing sequence numbers.
class E2Channel {
 public:
  uint32_t send(E2MsgType type, Bits payload);
  void push_frame(E2Frame frame);  // transport-side injection
  E2Frame recv();
  bool empty() const { return queue_.empty(); }

 private:
  std::deque<E2Frame> queue_;
  uint32_t next_seq_ = 1;
  uint32_t last_delivered_ = 0;
};

/// File transport with the same framing, for cross-process experiments.
void write_frames(const std::string& path, const std::vector<E2Frame>& frames);
std::vector<E2Frame> read_frames(const std::string& path);

struct MethodSpec {
  enum class Kind { Hadamard, Omp };
  Kind kind = Kind::Hadamard;
  int pilots = 0;    // W, OMP only
  int sparsity = 0;  // S, OMP only

  std::string name() const;
  static MethodSpec parse(const std::string& text);
};

struct EpisodeOptions {
  RisGeometry geom{8, 8};
  std::optional<QuantizerSpec> quant;  // nullopt bypasses quantization
  double meas_snr_db = std::numeric_limits<double>::infinity();
  double tx_power_db = 0.0;
  bool grid_emulation = false;
  std::optional<CsiRsConfig> csi_cfg;
  double scheduled_fraction = 0.0;
};

struct ResultRow {
  std::string method;
  int w = 0;
  int s = 0;
  int cci_bits = 0;  // 0 means unquantized
  int trial = 0;
  uint64_t seed = 0;
  double baseline_rsrp_db = 0.0;
  double optimized_rsrp_db = 0.0;
  double gain_db = 0.0;
  int measurements_used = 0;
  bool ok = false;
  std::string error;
};

/// Scales the channel so the all-zeros configuration hits the requested RSRP.
void calibrate_to_baseline(ElementChannel& scn, double baseline_rsrp_db, double tx_power_db);

/// One optimization episode: sweep the training patterns, report each CCI over
/// the E2 channel, run the optimizer, command the chosen pattern and evaluate.
ResultRow run_episode(const ElementChannel& scn, const MethodSpec& method,
                      const EpisodeOptions& opt, uint64_t seed);

struct ScenarioParams {
  RisGeometry geom{8, 8};
  int sparsity = 8;
  double amplitude = 1.0;
  // amplitude ratio of the boresight atom kept in every harness draw; < 1
  // models a user off the specular direction, whose unoptimized baseline is
  // weak but never exactly zero
  double dc_gain = 0.35;
  std::complex<double> direct{0.0, 0.0};
  double meas_snr_db = std::numeric_limits<double>::infinity();
  double baseline_rsrp_db = -110.0;
};

struct ExperimentPlan {
  ScenarioParams scenario;
  std::vector<MethodSpec> methods;
  std::vector<int> cci_bits{8};  // 0 means unquantized
  int trials = 25;
  uint64_t master_seed = 1;
  bool grid_emulation = false;
  double scheduled_fraction = 0.5;
  int grid_num_prbs = 106;

  static ExperimentPlan from_config(const TextConfig& cfg);
  static ExperimentPlan load(const std::string& path);
  void validate() const;
};

struct CellSummary {
  std::string method;
  int cci_bits = 0;
  int rows = 0;
  int failures = 0;
  double mean_gain_db = 0.0;
};

struct PlanResult {
  std::vector<ResultRow> rows;
  std::vector<CellSummary> summary;
};

/// Executes every (method, bits, trial) cell. Channel draws are keyed by the
/// trial index alone, so sweeps over methods and bit depths see the same
/// channels; per-cell failures are recorded and do not stop the plan.
PlanResult run_plan(const ExperimentPlan& plan);

void write_results_csv(const std::vector<ResultRow>& rows, std::ostream& os);
void write_summary_csv(const std::vector<CellSummary>& summary, std::ostream& os);

struct Histogram {
  std::vector<double> edges;  // bins + 1 entries
  std::vector<double> mass;   // normalized to sum 1
  uint64_t total_count = 0;

  double bin_width() const { return edges[1] - edges[0]; }
  double bin_center(int i) const { return 0.5 * (edges[i] + edges[i + 1]); }
  /// Highest-mass bin whose lower edge is at least `min_edge`.
  int peak_bin(double min_edge = 0.0) const;
};

/// Replays slot synthesis over time and histograms the per-RE amplitude
/// estimates: a zero lobe from unscheduled REs and a signal lobe near |h|.
Histogram pdf_experiment(const CsiRsConfig& cfg, double scheduled_fraction, int trials,
                         double amplitude, double noise_var, int bins, uint64_t seed);

void write_histogram_csv(const Histogram& hist, std::ostream& os);

/// Standalone gnuplot scripts referencing a results/histogram CSV.
void write_gain_plot_script(std::ostream& os, const std::string& summary_csv,
                            const std::vector<std::string>& methods = {});
void write_pdf_plot_script(std::ostream& os, const std::string& histogram_csv);

}  // namespace rissim
