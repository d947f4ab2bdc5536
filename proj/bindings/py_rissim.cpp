// SPDX-License-Identifier: Apache-2.0

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

#include "rissim/chanest.hpp"
#include "rissim/grid.hpp"
#include "rissim/optimize.hpp"
#include "rissim/report.hpp"
#include "rissim/ric_sim.hpp"
#include "rissim/ris_model.hpp"

PYBIND11_MAKE_OPAQUE(std::map<rissim::ReCoord, std::complex<double>>);

namespace py = pybind11;
using namespace rissim;

namespace {

py::bytes bits_to_bytes(const Bits& bits) {
  const auto& raw = bits.bytes();
  return py::bytes(reinterpret_cast<const char*>(raw.data()), raw.size());
}

Bits bytes_to_bits(const py::bytes& data, std::size_t nbits) {
  const std::string raw = data;
  return Bits::from_bytes(std::vector<uint8_t>(raw.begin(), raw.end()), nbits);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "CSI-RS based CCI reporting and binary-phase RIS optimization";

  // ---- grid ----------------------------------------------------------
  py::class_<BwpConfig>(m, "BwpConfig")
      .def(py::init([](int num_prbs, int scs_khz, int first_subcarrier) {
             BwpConfig b;
             b.num_prbs = num_prbs;
             b.scs_khz = scs_khz;
             b.first_subcarrier = first_subcarrier;
             b.validate();
             return b;
           }),
           py::arg("num_prbs"), py::arg("scs_khz") = 30, py::arg("first_subcarrier") = 0)
      .def_readwrite("num_prbs", &BwpConfig::num_prbs)
      .def_readwrite("scs_khz", &BwpConfig::scs_khz)
      .def_readwrite("first_subcarrier", &BwpConfig::first_subcarrier)
      .def("num_subcarriers", &BwpConfig::num_subcarriers);

  py::class_<CsiRsConfig>(m, "CsiRsConfig")
      .def_static("one_port", &CsiRsConfig::one_port, py::arg("bwp"), py::arg("k_bar") = 0,
                  py::arg("l_bar") = 4)
      .def_static("two_port_fd_cdm2", &CsiRsConfig::two_port_fd_cdm2, py::arg("bwp"),
                  py::arg("k_bar") = 0, py::arg("l_bar") = 4)
      .def_static("load", &CsiRsConfig::load, py::arg("path"))
      .def_readonly("ports", &CsiRsConfig::ports)
      .def_readonly("bwp", &CsiRsConfig::bwp)
      .def("res_per_rb", &CsiRsConfig::res_per_rb);

  m.def(
      "enumerate_re_set",
      [](const CsiRsConfig& cfg, int port) {
        std::vector<std::pair<int, int>> out;
        for (const ReCoord& c : enumerate_re_set(cfg, port)) out.emplace_back(c.m, c.n);
        return out;
      },
      py::arg("cfg"), py::arg("port") = 0,
      "CSI-RS RE coordinates (subcarrier, symbol) sorted by (symbol, subcarrier)");

  py::class_<PilotMap>(m, "PilotMap")
      .def("__len__", [](const PilotMap& p) { return p.size(); })
      .def("items", [](const PilotMap& p) {
        std::vector<std::pair<std::pair<int, int>, std::complex<double>>> out;
        for (const auto& [c, x] : p) out.push_back({{c.m, c.n}, x});
        return out;
      });
  m.def("generate_pilots", &generate_pilots, py::arg("cfg"), py::arg("seed"));

  py::class_<ResourceGrid>(m, "ResourceGrid")
      .def_readonly("data", &ResourceGrid::data)
      .def_property_readonly("pilot_mask", [](const ResourceGrid& g) { return g.pilot; })
      .def_property_readonly("scheduled_mask", [](const ResourceGrid& g) { return g.scheduled; })
      .def("num_subcarriers", &ResourceGrid::num_subcarriers)
      .def("num_symbols", &ResourceGrid::num_symbols);

  m.def("synthesize_received_grid", &synthesize_received_grid, py::arg("cfg"), py::arg("pilots"),
        py::arg("h"), py::arg("noise_var"), py::arg("scheduled_fraction"), py::arg("seed"));

  // ---- chanest --------------------------------------------------------
  py::class_<WidebandCci>(m, "WidebandCci")
      .def_readonly("value", &WidebandCci::value)
      .def_readonly("antenna", &WidebandCci::antenna)
      .def_readonly("port", &WidebandCci::port);
  m.def("extract_cci", &extract_cci, py::arg("grid"), py::arg("cfg"), py::arg("pilots"),
        py::arg("port") = 0, "LS -> anchoring -> interpolation -> wideband mean");

  // ---- report ---------------------------------------------------------
  py::class_<QuantizerSpec>(m, "QuantizerSpec")
      .def(py::init([](int bits, double step) {
             QuantizerSpec s;
             s.bits = bits;
             s.step = step;
             s.validate();
             return s;
           }),
           py::arg("bits"), py::arg("step"))
      .def_static("for_bits", &QuantizerSpec::for_bits, py::arg("bits"),
                  py::arg("full_scale") = 1.0)
      .def_readonly("bits", &QuantizerSpec::bits)
      .def_readonly("step", &QuantizerSpec::step)
      .def("min_code", &QuantizerSpec::min_code)
      .def("max_code", &QuantizerSpec::max_code);

  py::class_<QuantizedCci>(m, "QuantizedCci")
      .def_readonly("re_code", &QuantizedCci::re_code)
      .def_readonly("im_code", &QuantizedCci::im_code)
      .def_readonly("spec", &QuantizedCci::spec);
  m.def("quantize", &quantize, py::arg("value"), py::arg("spec"));
  m.def("dequantize", &dequantize, py::arg("q"));

  py::enum_<ReportVariant>(m, "ReportVariant")
      .value("SISO", ReportVariant::Siso)
      .value("MIMO", ReportVariant::Mimo)
      .value("RIS", ReportVariant::Ris);

  py::class_<CsiReport>(m, "CsiReport")
      .def(py::init<>())
      .def_readwrite("variant", &CsiReport::variant)
      .def_readwrite("cri", &CsiReport::cri)
      .def_readwrite("ri", &CsiReport::ri)
      .def_readwrite("cqi", &CsiReport::cqi)
      .def_readwrite("rsrp_idx", &CsiReport::rsrp_idx)
      .def_readwrite("i1", &CsiReport::i1)
      .def_readwrite("pmi", &CsiReport::pmi)
      .def_readwrite("pmi_width", &CsiReport::pmi_width)
      .def_readwrite("cci", &CsiReport::cci)
      .def("packed_length", &CsiReport::packed_length);

  m.def(
      "pack",
      [](const CsiReport& report) {
        const Bits bits = pack(report);
        return py::make_tuple(bits_to_bytes(bits), bits.size());
      },
      py::arg("report"), "Returns (payload_bytes, bit_count)");
  m.def(
      "unpack",
      [](const py::bytes& payload, std::size_t nbits, ReportVariant variant,
         std::optional<QuantizerSpec> spec, int pmi_width) {
        return unpack(bytes_to_bits(payload, nbits), variant, spec, pmi_width);
      },
      py::arg("payload"), py::arg("nbits"), py::arg("variant"),
      py::arg("spec") = std::nullopt, py::arg("pmi_width") = 0);

  m.def("rsrp_to_index", &rsrp_to_index, py::arg("rsrp_dbm"));
  m.def("rsrp_from_index", &rsrp_from_index, py::arg("index"));

  // ---- ris model ------------------------------------------------------
  py::class_<RisGeometry>(m, "RisGeometry")
      .def(py::init([](int x, int y) {
             RisGeometry g{x, y};
             g.validate();
             return g;
           }),
           py::arg("x"), py::arg("y"))
      .def_readonly("x_elems", &RisGeometry::x_elems)
      .def_readonly("y_elems", &RisGeometry::y_elems)
      .def("total", &RisGeometry::total);

  py::class_<PhaseConfig>(m, "PhaseConfig")
      .def(py::init([](const std::vector<uint8_t>& beta) { return PhaseConfig{beta}; }),
           py::arg("beta"))
      .def_static("zeros", &PhaseConfig::zeros, py::arg("p"))
      .def_readwrite("beta", &PhaseConfig::beta)
      .def("__len__", &PhaseConfig::size)
      .def("gamma", &PhaseConfig::gamma, py::arg("i"))
      .def("complemented", &PhaseConfig::complemented)
      .def("__str__", &PhaseConfig::to_string01)
      .def("__eq__", [](const PhaseConfig& a, const PhaseConfig& b) { return a == b; });

  py::class_<ElementChannel>(m, "ElementChannel")
      .def(py::init([](const Eigen::VectorXcd& zeta, std::complex<double> direct) {
             return ElementChannel{zeta, direct};
           }),
           py::arg("zeta"), py::arg("direct") = std::complex<double>{0.0, 0.0})
      .def_readwrite("zeta", &ElementChannel::zeta)
      .def_readwrite("direct", &ElementChannel::direct)
      .def("__len__", &ElementChannel::size);

  py::class_<AngularChannel>(m, "AngularChannel")
      .def_readonly("xi", &AngularChannel::xi)
      .def_readonly("sparsity", &AngularChannel::sparsity)
      .def("support", &AngularChannel::support);

  py::class_<DftMatrix>(m, "DftMatrix")
      .def_readonly("f", &DftMatrix::f)
      .def("__len__", &DftMatrix::size);

  m.def("build_dft", &build_dft, py::arg("geom"));
  m.def("element_from_angular", &element_from_angular, py::arg("dft"), py::arg("xi"));
  m.def("angular_from_element", &angular_from_element, py::arg("dft"), py::arg("zeta"));
  m.def("draw_sparse_angular", &draw_sparse_angular, py::arg("geom"), py::arg("sparsity"),
        py::arg("amplitude"), py::arg("seed"), py::arg("force_dc_atom") = false);
  m.def("synthesize_scenario",
        py::overload_cast<const RisGeometry&, int, double, uint64_t>(&synthesize_scenario),
        py::arg("geom"), py::arg("sparsity"), py::arg("amplitude"), py::arg("seed"));
  m.def("effective_channel", &effective_channel, py::arg("scn"), py::arg("cfg"));
  m.def("rsrp_db", &rsrp_db, py::arg("scn"), py::arg("cfg"), py::arg("tx_power_db"));

  py::class_<ExhaustiveResult>(m, "ExhaustiveResult")
      .def_readonly("best", &ExhaustiveResult::best)
      .def_readonly("power", &ExhaustiveResult::power);
  m.def("exhaustive_best", &exhaustive_best, py::arg("scn"),
        "Global optimum over all 2^P binary phase configurations (P <= 20)");

  // ---- optimize -------------------------------------------------------
  py::class_<SensingMatrix>(m, "SensingMatrix")
      .def_readonly("q", &SensingMatrix::q)
      .def("pilots", &SensingMatrix::pilots)
      .def("elements", &SensingMatrix::elements);

  m.def("hadamard_matrix", &hadamard_matrix, py::arg("p"));
  m.def("hadamard_sensing", &hadamard_sensing, py::arg("p"));
  m.def("bernoulli_sensing", &bernoulli_sensing, py::arg("p"), py::arg("w"), py::arg("seed"));
  m.def("reflection_matrix", &reflection_matrix, py::arg("q"));
  m.def("pattern_from_row", &pattern_from_row, py::arg("q_row"));

  py::class_<OmpParams>(m, "OmpParams")
      .def(py::init([](int pilots, int sparsity) { return OmpParams{pilots, sparsity}; }),
           py::arg("pilots"), py::arg("sparsity"))
      .def_readwrite("pilots", &OmpParams::pilots)
      .def_readwrite("sparsity", &OmpParams::sparsity);

  py::class_<AcquireOptions>(m, "AcquireOptions")
      .def(py::init<>())
      .def_readwrite("quant", &AcquireOptions::quant)
      .def_readwrite("noise_var", &AcquireOptions::noise_var)
      .def_readwrite("normalization_scale", &AcquireOptions::normalization_scale)
      .def_readwrite("grid_emulation", &AcquireOptions::grid_emulation)
      .def_readwrite("csi_cfg", &AcquireOptions::csi_cfg)
      .def_readwrite("scheduled_fraction", &AcquireOptions::scheduled_fraction);

  py::class_<MeasurementVector>(m, "MeasurementVector")
      .def_readonly("y", &MeasurementVector::y)
      .def_readonly("patterns", &MeasurementVector::patterns)
      .def_readonly("scale", &MeasurementVector::scale);

  m.def("acquire", &acquire, py::arg("scn"), py::arg("q"), py::arg("options"), py::arg("seed"));

  py::class_<HadamardResult>(m, "HadamardResult")
      .def_readonly("beta", &HadamardResult::beta)
      .def_readonly("g_hat", &HadamardResult::g_hat)
      .def_readonly("phase", &HadamardResult::phase);
  m.def("hadamard_optimize",
        py::overload_cast<const Eigen::VectorXcd&, int>(&hadamard_optimize), py::arg("y"),
        py::arg("p"));

  py::class_<OmpResult>(m, "OmpResult")
      .def_readonly("beta", &OmpResult::beta)
      .def_readonly("g_hat", &OmpResult::g_hat)
      .def_readonly("h_hat", &OmpResult::h_hat)
      .def_readonly("support", &OmpResult::support)
      .def_readonly("degenerate", &OmpResult::degenerate)
      .def_readonly("phase", &OmpResult::phase);
  m.def("omp_optimize",
        py::overload_cast<const Eigen::VectorXcd&, const SensingMatrix&, const DftMatrix&,
                          const OmpParams&>(&omp_optimize),
        py::arg("y"), py::arg("q"), py::arg("dft"), py::arg("params"));

  // ---- ric sim --------------------------------------------------------
  py::class_<MethodSpec>(m, "MethodSpec")
      .def_static("parse", &MethodSpec::parse, py::arg("text"))
      .def("name", &MethodSpec::name);

  py::class_<EpisodeOptions>(m, "EpisodeOptions")
      .def(py::init<>())
      .def_readwrite("geom", &EpisodeOptions::geom)
      .def_readwrite("quant", &EpisodeOptions::quant)
      .def_readwrite("meas_snr_db", &EpisodeOptions::meas_snr_db)
      .def_readwrite("tx_power_db", &EpisodeOptions::tx_power_db)
      .def_readwrite("grid_emulation", &EpisodeOptions::grid_emulation)
      .def_readwrite("csi_cfg", &EpisodeOptions::csi_cfg)
      .def_readwrite("scheduled_fraction", &EpisodeOptions::scheduled_fraction);

  py::class_<ResultRow>(m, "ResultRow")
      .def_readonly("method", &ResultRow::method)
      .def_readonly("w", &ResultRow::w)
      .def_readonly("s", &ResultRow::s)
      .def_readonly("cci_bits", &ResultRow::cci_bits)
      .def_readonly("trial", &ResultRow::trial)
      .def_readonly("seed", &ResultRow::seed)
      .def_readonly("baseline_rsrp_db", &ResultRow::baseline_rsrp_db)
      .def_readonly("optimized_rsrp_db", &ResultRow::optimized_rsrp_db)
      .def_readonly("gain_db", &ResultRow::gain_db)
      .def_readonly("measurements_used", &ResultRow::measurements_used)
      .def_readonly("ok", &ResultRow::ok)
      .def_readonly("error", &ResultRow::error);

  m.def("calibrate_to_baseline", &calibrate_to_baseline, py::arg("scn"),
        py::arg("baseline_rsrp_db"), py::arg("tx_power_db") = 0.0);
  m.def("run_episode", &run_episode, py::arg("scn"), py::arg("method"), py::arg("options"),
        py::arg("seed"));

  py::class_<ScenarioParams>(m, "ScenarioParams")
      .def(py::init<>())
      .def_readwrite("geom", &ScenarioParams::geom)
      .def_readwrite("sparsity", &ScenarioParams::sparsity)
      .def_readwrite("amplitude", &ScenarioParams::amplitude)
      .def_readwrite("dc_gain", &ScenarioParams::dc_gain)
      .def_readwrite("direct", &ScenarioParams::direct)
      .def_readwrite("meas_snr_db", &ScenarioParams::meas_snr_db)
      .def_readwrite("baseline_rsrp_db", &ScenarioParams::baseline_rsrp_db);

  py::class_<ExperimentPlan>(m, "ExperimentPlan")
      .def(py::init<>())
      .def_static("load", &ExperimentPlan::load, py::arg("path"))
      .def_readwrite("scenario", &ExperimentPlan::scenario)
      .def_readwrite("methods", &ExperimentPlan::methods)
      .def_readwrite("cci_bits", &ExperimentPlan::cci_bits)
      .def_readwrite("trials", &ExperimentPlan::trials)
      .def_readwrite("master_seed", &ExperimentPlan::master_seed)
      .def_readwrite("grid_emulation", &ExperimentPlan::grid_emulation);

  py::class_<CellSummary>(m, "CellSummary")
      .def_readonly("method", &CellSummary::method)
      .def_readonly("cci_bits", &CellSummary::cci_bits)
      .def_readonly("rows", &CellSummary::rows)
      .def_readonly("failures", &CellSummary::failures)
      .def_readonly("mean_gain_db", &CellSummary::mean_gain_db);

  py::class_<PlanResult>(m, "PlanResult")
      .def_readonly("rows", &PlanResult::rows)
      .def_readonly("summary", &PlanResult::summary);

  m.def("run_plan", &run_plan, py::arg("plan"));
  m.def(
      "run_plan_file",
      [](const std::string& plan_path, const std::string& out_csv) {
        const PlanResult res = run_plan(ExperimentPlan::load(plan_path));
        std::ofstream out(out_csv, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + out_csv);
        std::ostringstream buf;
        write_results_csv(res.rows, buf);
        out << buf.str();
        return res;
      },
      py::arg("plan_path"), py::arg("out_csv"));

  py::class_<Histogram>(m, "Histogram")
      .def_readonly("edges", &Histogram::edges)
      .def_readonly("mass", &Histogram::mass)
      .def_readonly("total_count", &Histogram::total_count)
      .def("bin_width", &Histogram::bin_width)
      .def("bin_center", &Histogram::bin_center, py::arg("i"))
      .def("peak_bin", &Histogram::peak_bin, py::arg("min_edge") = 0.0);

  m.def("pdf_experiment", &pdf_experiment, py::arg("cfg"), py::arg("scheduled_fraction"),
        py::arg("trials"), py::arg("amplitude"), py::arg("noise_var"), py::arg("bins"),
        py::arg("seed"));

#ifdef RISSIM_VERSION
  m.attr("__version__") = RISSIM_VERSION;
#else
  m.attr("__version__") = "dev";
#endif
}
