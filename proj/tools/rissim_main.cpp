// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "rissim/chanest.hpp"
#include "rissim/grid.hpp"
#include "rissim/optimize.hpp"
#include "rissim/report.hpp"
#include "rissim/ric_sim.hpp"
#include "rissim/ris_model.hpp"

namespace {

using namespace rissim;

// --out defaults land in $RISSIM_OUT_DIR when it is set
std::string default_out(const std::string& filename) {
  const char* dir = std::getenv("RISSIM_OUT_DIR");
  if (dir == nullptr || *dir == '\0') return filename;
  return (std::filesystem::path(dir) / filename).string();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write output file: " + path);
  out << content;
}

struct SimulateArgs {
  std::string plan_path;
  std::string out_path;
  std::vector<std::string> methods;
  std::vector<int> cci_bits;
  int pilots = 16;
  int sparsity = 8;
  int trials = -1;
  uint64_t seed = 0;
  bool seed_set = false;
  bool grid_emulation = false;
  bool emit_plot = false;
  bool verbose = false;
};

int run_simulate(const SimulateArgs& args) {
  ExperimentPlan plan;
  plan.methods = {MethodSpec::parse("hadamard")};
  if (!args.plan_path.empty()) plan = ExperimentPlan::load(args.plan_path);

  if (!args.methods.empty()) {
    plan.methods.clear();
    for (const auto& m : args.methods) {
      if (m == "omp") {
        plan.methods.push_back(MethodSpec{MethodSpec::Kind::Omp, args.pilots, args.sparsity});
      } else {
        plan.methods.push_back(MethodSpec::parse(m));
      }
    }
  }
  if (!args.cci_bits.empty()) plan.cci_bits = args.cci_bits;
  if (args.trials > 0) plan.trials = args.trials;
  if (args.seed_set) plan.master_seed = args.seed;
  if (args.grid_emulation) plan.grid_emulation = true;
  plan.validate();

  const PlanResult res = run_plan(plan);

  const std::string out_path = args.out_path.empty() ? default_out("results.csv") : args.out_path;
  std::ostringstream csv;
  write_results_csv(res.rows, csv);
  write_text_file(out_path, csv.str());

  std::printf("wrote %zu result rows to %s\n", res.rows.size(), out_path.c_str());
  std::printf("%-12s %8s %8s %10s %9s\n", "method", "cci_bits", "rows", "failures", "gain_db");
  for (const auto& cell : res.summary)
    std::printf("%-12s %8d %8d %10d %9.3f\n", cell.method.c_str(), cell.cci_bits, cell.rows,
                cell.failures, cell.mean_gain_db);

  if (args.emit_plot) {
    const std::string summary_path = out_path + ".summary.csv";
    std::ostringstream summary;
    write_summary_csv(res.summary, summary);
    write_text_file(summary_path, summary.str());

    std::vector<std::string> method_names;
    for (const auto& m : plan.methods) method_names.push_back(m.name());
    std::ostringstream gp;
    write_gain_plot_script(gp, std::filesystem::path(summary_path).filename().string(),
                           method_names);
    write_text_file(out_path + ".gp", gp.str());
    std::printf("wrote %s and %s\n", summary_path.c_str(), (out_path + ".gp").c_str());
  }
  if (args.verbose) {
    for (const auto& row : res.rows)
      if (!row.ok) std::fprintf(stderr, "episode failed (%s, b=%d, trial %d): %s\n",
                                row.method.c_str(), row.cci_bits, row.trial, row.error.c_str());
  }
  return 0;
}

struct PdfArgs {
  double fraction = 0.5;
  double amplitude = 0.06;
  double noise_var = 1e-6;
  int trials = 40;
  int bins = 25;
  int prbs = 106;
  std::string pattern = "one_port";
  std::string out_path;
  uint64_t seed = 1;
  bool emit_plot = false;
};

int run_pdf(const PdfArgs& args) {
  BwpConfig bwp;
  bwp.num_prbs = args.prbs;
  const CsiRsConfig cfg = args.pattern == "two_port_fdcdm2"
                              ? CsiRsConfig::two_port_fd_cdm2(bwp)
                              : CsiRsConfig::one_port(bwp);
  const Histogram hist = pdf_experiment(cfg, args.fraction, args.trials, args.amplitude,
                                        args.noise_var, args.bins, args.seed);

  const std::string out_path =
      args.out_path.empty() ? default_out("histogram.csv") : args.out_path;
  std::ostringstream csv;
  write_histogram_csv(hist, csv);
  write_text_file(out_path, csv.str());

  const int lobe = hist.peak_bin(args.amplitude / 2);
  std::printf("wrote %d bins to %s\n", static_cast<int>(hist.mass.size()), out_path.c_str());
  std::printf("zero_bin_mass=%.6f\n", hist.mass[0]);
  if (lobe >= 0)
    std::printf("signal_lobe_center=%.6f signal_lobe_mass=%.6f\n", hist.bin_center(lobe),
                hist.mass[lobe]);
  if (args.emit_plot) {
    std::ostringstream gp;
    write_pdf_plot_script(gp, std::filesystem::path(out_path).filename().string());
    write_text_file(out_path + ".gp", gp.str());
    std::printf("wrote %s\n", (out_path + ".gp").c_str());
  }
  return 0;
}

struct CodecArgs {
  std::string variant = "ris";
  int cri = 0;
  int ri = 0;
  int cqi = 0;
  int rsrp_idx = 0;
  int cci_bits = 8;
  double cci_step = 0.0;  // 0 selects the default full-scale step
  int cci_re = 0;
  int cci_im = 0;
  int i1 = 0;
  unsigned long long pmi = 0;
  int pmi_width = 4;
  std::string hex;
  int nbits = 0;
};

ReportVariant parse_variant(const std::string& v) {
  if (v == "siso") return ReportVariant::Siso;
  if (v == "mimo") return ReportVariant::Mimo;
  if (v == "ris") return ReportVariant::Ris;
  throw ConfigError("unknown report variant: " + v);
}

QuantizerSpec quant_from_args(const CodecArgs& args) {
  QuantizerSpec spec = QuantizerSpec::for_bits(args.cci_bits);
  if (args.cci_step > 0.0) spec.step = args.cci_step;
  return spec;
}

int run_codec_pack(const CodecArgs& args) {
  CsiReport rep;
  rep.variant = parse_variant(args.variant);
  rep.cri = static_cast<uint8_t>(args.cri);
  rep.ri = static_cast<uint8_t>(args.ri);
  rep.cqi = static_cast<uint8_t>(args.cqi);
  rep.rsrp_idx = static_cast<uint8_t>(args.rsrp_idx);
  if (rep.variant == ReportVariant::Mimo) {
    rep.i1 = static_cast<uint8_t>(args.i1);
    rep.pmi = static_cast<uint32_t>(args.pmi);
    rep.pmi_width = args.pmi_width;
  }
  if (rep.variant == ReportVariant::Ris)
    rep.cci = QuantizedCci{args.cci_re, args.cci_im, quant_from_args(args)};
  const Bits bits = pack(rep);
  std::printf("bits=%s\n", bits.to_string01().c_str());
  std::printf("hex=%s nbits=%d\n", bits.to_hex().c_str(), static_cast<int>(bits.size()));
  return 0;
}

int run_codec_unpack(const CodecArgs& args) {
  if (args.hex.empty()) throw ConfigError("unpack needs --hex");
  if (args.hex.size() % 2 != 0) throw ConfigError("--hex must contain whole bytes");
  std::vector<uint8_t> bytes;
  for (std::size_t i = 0; i < args.hex.size(); i += 2) {
    const std::string byte = args.hex.substr(i, 2);
    char* end = nullptr;
    const long v = std::strtol(byte.c_str(), &end, 16);
    if (end != byte.c_str() + 2) throw ConfigError("--hex is not valid hexadecimal");
    bytes.push_back(static_cast<uint8_t>(v));
  }
  const ReportVariant variant = parse_variant(args.variant);
  int nbits = args.nbits;
  if (nbits == 0) {
    CsiReport probe;
    probe.variant = variant;
    probe.pmi_width = args.pmi_width;
    if (variant == ReportVariant::Ris)
      probe.cci = QuantizedCci{0, 0, quant_from_args(args)};
    nbits = probe.packed_length();
  }
  const Bits bits = Bits::from_bytes(bytes, static_cast<std::size_t>(nbits));

  CsiReport rep;
  if (variant == ReportVariant::Ris) {
    rep = unpack(bits, variant, quant_from_args(args));
  } else if (variant == ReportVariant::Mimo) {
    rep = unpack(bits, variant, std::nullopt, args.pmi_width);
  } else {
    rep = unpack(bits, variant);
  }
  std::printf("cri=%d ri=%d cqi=%d rsrp_idx=%d rsrp_dbm=%.1f\n", rep.cri, rep.ri, rep.cqi,
              rep.rsrp_idx, rsrp_from_index(rep.rsrp_idx));
  if (rep.variant == ReportVariant::Mimo)
    std::printf("i1=%d pmi=0x%x pmi_width=%d\n", rep.i1, rep.pmi, rep.pmi_width);
  if (rep.variant == ReportVariant::Ris) {
    const auto v = dequantize(*rep.cci);
    std::printf("cci_re=%d cci_im=%d dequantized=(%.9g,%.9g)\n", rep.cci->re_code,
                rep.cci->im_code, v.real(), v.imag());
  }
  return 0;
}

struct OracleArgs {
  int p = 0;
  int x = 0;
  int y = 0;
  int sparsity = 4;
  double amplitude = 1.0;
  uint64_t seed = 1;
  std::string scenario_path;
  std::string save_scenario_path;
};

int run_oracle(const OracleArgs& args) {
  ScenarioSpec spec;
  if (!args.scenario_path.empty()) {
    spec = ScenarioSpec::load(args.scenario_path);
  } else {
    if (args.x > 0 && args.y > 0) {
      spec.geom = RisGeometry{args.x, args.y};
    } else if (args.p > 0) {
      spec.geom = RisGeometry{args.p, 1};
    } else {
      spec.geom = RisGeometry{4, 1};
    }
    spec.sparsity = std::min(args.sparsity, spec.geom.total());
    spec.amplitude = args.amplitude;
    spec.seed = args.seed;
  }
  if (spec.geom.total() > 20)
    throw ConfigError("exhaustive search supports at most 20 elements");

  if (!args.save_scenario_path.empty()) spec.save(args.save_scenario_path);

  const ElementChannel scn = synthesize_scenario(spec);
  const ExhaustiveResult res = exhaustive_best(scn);
  const double baseline = std::norm(effective_channel(scn, PhaseConfig::zeros(scn.size())));
  std::printf("beta=%s\n", res.best.to_string01().c_str());
  std::printf("power=%.12g\n", res.power);
  std::printf("baseline_power=%.12g\n", baseline);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Link-level simulator: CSI-RS based CCI reporting and binary-phase RIS optimization"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run an experiment plan and write a result CSV");
  simulate->add_option("--plan", sim.plan_path, "Plan file (INI-style)");
  simulate->add_option("--out", sim.out_path, "Output CSV path");
  simulate->add_option("--method", sim.methods,
                       "Optimizer: hadamard, omp(W,S) or omp with --pilots/--sparsity");
  simulate->add_option("--pilots", sim.pilots, "W for --method omp")->check(CLI::PositiveNumber);
  simulate->add_option("--sparsity", sim.sparsity, "S for --method omp")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--cci-bits", sim.cci_bits, "CCI bits per component (0 = unquantized)")
      ->delimiter(',');
  simulate->add_option("--trials", sim.trials, "Trials per cell")->check(CLI::PositiveNumber);
  auto* seed_opt = simulate->add_option("--seed", sim.seed, "Master seed");
  simulate->add_flag("--grid-emulation", sim.grid_emulation,
                     "Measure through full grid synthesis and extraction");
  simulate->add_flag("--emit-plot", sim.emit_plot, "Also write a summary CSV and gnuplot script");
  simulate->add_flag("-v,--verbose", sim.verbose, "Report per-episode failures on stderr");

  PdfArgs pdf;
  auto* pdf_cmd = app.add_subcommand("pdf", "Amplitude-PDF experiment over synthesized slots");
  pdf_cmd->add_option("--fraction", pdf.fraction, "Scheduled fraction of non-pilot REs")
      ->check(CLI::Range(0.0, 1.0));
  pdf_cmd->add_option("--amp", pdf.amplitude, "Flat channel magnitude |h|");
  pdf_cmd->add_option("--noise-var", pdf.noise_var, "Per-RE noise variance");
  pdf_cmd->add_option("--trials", pdf.trials, "Number of slots")->check(CLI::PositiveNumber);
  pdf_cmd->add_option("--bins", pdf.bins, "Histogram bins")->check(CLI::Range(2, 10000));
  pdf_cmd->add_option("--prbs", pdf.prbs, "BWP size in PRBs")->check(CLI::PositiveNumber);
  pdf_cmd->add_option("--pattern", pdf.pattern, "CSI-RS pattern: one_port or two_port_fdcdm2");
  pdf_cmd->add_option("--out", pdf.out_path, "Histogram CSV path");
  pdf_cmd->add_option("--seed", pdf.seed, "Seed");
  pdf_cmd->add_flag("--emit-plot", pdf.emit_plot, "Also write a gnuplot script");

  CodecArgs codec;
  auto* codec_cmd = app.add_subcommand("codec", "Pack or unpack CSI report bitmaps");
  codec_cmd->require_subcommand(1);
  auto* pack_cmd = codec_cmd->add_subcommand("pack", "Pack fields into a report bit string");
  auto* unpack_cmd = codec_cmd->add_subcommand("unpack", "Decode a report from hex");
  for (auto* cmd : {pack_cmd, unpack_cmd}) {
    cmd->add_option("--variant", codec.variant, "siso, mimo or ris");
    cmd->add_option("--cci-bits", codec.cci_bits, "CCI bits per component (ris)")
        ->check(CLI::Range(1, 8));
    cmd->add_option("--cci-step", codec.cci_step, "Quantizer step (ris)");
    cmd->add_option("--pmi-width", codec.pmi_width, "PMI width in bits (mimo)")
        ->check(CLI::Range(0, 32));
  }
  pack_cmd->add_option("--cri", codec.cri)->check(CLI::Range(0, 7));
  pack_cmd->add_option("--ri", codec.ri)->check(CLI::Range(0, 3));
  pack_cmd->add_option("--cqi", codec.cqi)->check(CLI::Range(0, 15));
  pack_cmd->add_option("--rsrp-idx", codec.rsrp_idx)->check(CLI::Range(0, 127));
  pack_cmd->add_option("--cci-re", codec.cci_re, "Real CCI code (ris)");
  pack_cmd->add_option("--cci-im", codec.cci_im, "Imaginary CCI code (ris)");
  pack_cmd->add_option("--i1", codec.i1, "(mimo)")->check(CLI::Range(0, 7));
  pack_cmd->add_option("--pmi", codec.pmi, "(mimo)");
  unpack_cmd->add_option("--hex", codec.hex, "Byte-padded payload in hex")->required();
  unpack_cmd->add_option("--nbits", codec.nbits, "Payload bit count (default: from variant)");

  OracleArgs oracle;
  auto* oracle_cmd =
      app.add_subcommand("oracle", "Exhaustive binary-phase search over a scenario (P <= 20)");
  oracle_cmd->add_option("--p", oracle.p, "Element count (line geometry P x 1)")
      ->check(CLI::Range(1, 20));
  oracle_cmd->add_option("--x", oracle.x, "Vertical elements")->check(CLI::PositiveNumber);
  oracle_cmd->add_option("--y", oracle.y, "Horizontal elements")->check(CLI::PositiveNumber);
  oracle_cmd->add_option("--sparsity", oracle.sparsity, "Angular sparsity")
      ->check(CLI::PositiveNumber);
  oracle_cmd->add_option("--amplitude", oracle.amplitude, "Angular amplitude scale");
  oracle_cmd->add_option("--seed", oracle.seed, "Scenario seed");
  oracle_cmd->add_option("--scenario", oracle.scenario_path, "Load a scenario file");
  oracle_cmd->add_option("--save-scenario", oracle.save_scenario_path,
                         "Write the scenario file used");

  try {
    app.parse(argc, argv);
    if (*simulate) {
      sim.seed_set = seed_opt->count() > 0;
      return run_simulate(sim);
    }
    if (*pdf_cmd) return run_pdf(pdf);
    if (*codec_cmd) return *pack_cmd ? run_codec_pack(codec) : run_codec_unpack(codec);
    if (*oracle_cmd) return run_oracle(oracle);
    return 2;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 3;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
