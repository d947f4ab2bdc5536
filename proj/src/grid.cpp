// SPDX-License-Identifier: Apache-2.0

#include "rissim/grid.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "rissim/rng.hpp"

namespace rissim {

namespace {

constexpr std::complex<double> kQpsk[4] = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};

}  // namespace

void BwpConfig::validate() const {
  if (num_prbs < 1) throw std::invalid_argument("BwpConfig: num_prbs must be >= 1");
  if (scs_khz != 15 && scs_khz != 30 && scs_khz != 60)
    throw std::invalid_argument("BwpConfig: scs_khz must be 15, 30 or 60");
  if (first_subcarrier < 0)
    throw std::invalid_argument("BwpConfig: first_subcarrier must be >= 0");
}

CsiRsConfig CsiRsConfig::one_port(const BwpConfig& bwp, int k_bar, int l_bar) {
  CsiRsConfig cfg;
  cfg.row = CsiRsRow::OnePort;
  cfg.cdm_type = CdmType::NoCdm;
  cfg.ports = 1;
  cfg.base_freq_offsets = {k_bar};
  cfg.base_time_offsets = {l_bar};
  cfg.intra_offsets_k = {0};
  cfg.intra_offsets_l = {0};
  cfg.bwp = bwp;
  cfg.validate();
  return cfg;
}

CsiRsConfig CsiRsConfig::two_port_fd_cdm2(const BwpConfig& bwp, int k_bar, int l_bar) {
  CsiRsConfig cfg;
  cfg.row = CsiRsRow::TwoPortFdCdm2;
  cfg.cdm_type = CdmType::FdCdm2;
  cfg.ports = 2;
  cfg.base_freq_offsets = {k_bar};
  cfg.base_time_offsets = {l_bar};
  cfg.intra_offsets_k = {0, 1};
  cfg.intra_offsets_l = {0};
  cfg.bwp = bwp;
  cfg.validate();
  return cfg;
}

CsiRsConfig CsiRsConfig::from_config(const TextConfig& cfg) {
  try {
    BwpConfig bwp;
    bwp.num_prbs = static_cast<int>(cfg.get_int("bwp", "num_prbs"));
    bwp.scs_khz = static_cast<int>(cfg.get_int_or("bwp", "scs_khz", 30));
    bwp.first_subcarrier = static_cast<int>(cfg.get_int_or("bwp", "first_subcarrier", 0));

    const std::string pattern = cfg.get_or("csirs", "pattern", "one_port");
    const int k_bar = static_cast<int>(cfg.get_int_or("csirs", "base_freq_offset", 0));
    const int l_bar = static_cast<int>(cfg.get_int_or("csirs", "base_time_offset", 4));
    CsiRsConfig out;
    if (pattern == "one_port") {
      out = one_port(bwp, k_bar, l_bar);
    } else if (pattern == "two_port_fdcdm2") {
      out = two_port_fd_cdm2(bwp, k_bar, l_bar);
    } else {
      throw ConfigError("unknown CSI-RS pattern: " + pattern);
    }
    return out;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid CSI-RS config: ") + e.what());
  }
}

CsiRsConfig CsiRsConfig::load(const std::string& path) {
  return from_config(TextConfig::load(path));
}

int CsiRsConfig::res_per_rb() const {
  return static_cast<int>(base_freq_offsets.size() * intra_offsets_k.size() *
                          intra_offsets_l.size());
}

void CsiRsConfig::validate() const {
  bwp.validate();
  if (ports != 1 && ports != 2) throw std::invalid_argument("CsiRsConfig: ports must be 1 or 2");
  if (base_freq_offsets.empty() || base_freq_offsets.size() != base_time_offsets.size())
    throw std::invalid_argument("CsiRsConfig: need matching non-empty CDM group offset lists");
  if (intra_offsets_k.empty() || intra_offsets_l.empty())
    throw std::invalid_argument("CsiRsConfig: intra-pattern offset sets must be non-empty");
  // each RE must stay inside its own RB and inside the slot
  for (std::size_t j = 0; j < base_freq_offsets.size(); ++j) {
    for (int kp : intra_offsets_k) {
      const int k = base_freq_offsets[j] + kp;
      if (k < 0 || k >= kSubcarriersPerRb)
        throw std::invalid_argument("CsiRsConfig: frequency offsets leave the RB");
    }
    for (int lp : intra_offsets_l) {
      const int l = base_time_offsets[j] + lp;
      if (l < 0 || l >= kSymbolsPerSlot)
        throw std::invalid_argument("CsiRsConfig: time offsets leave the slot");
    }
  }
}

std::vector<ReCoord> enumerate_re_set(const CsiRsConfig& cfg, int port) {
  cfg.validate();
  if (port < 0 || port >= cfg.ports)
    throw std::invalid_argument("enumerate_re_set: port index out of range");

  const int num_sc = cfg.bwp.num_subcarriers();
  std::vector<ReCoord> out;
  out.reserve(static_cast<std::size_t>(cfg.bwp.num_prbs) * cfg.res_per_rb());
  for (int rb = 0; rb < cfg.bwp.num_prbs; ++rb) {
    const int m_rb = cfg.bwp.first_subcarrier + rb * kSubcarriersPerRb;
    for (std::size_t j = 0; j < cfg.base_freq_offsets.size(); ++j) {
      for (int lp : cfg.intra_offsets_l) {
        for (int kp : cfg.intra_offsets_k) {
          const ReCoord c{m_rb + cfg.base_freq_offsets[j] + kp,
                          cfg.base_time_offsets[j] + lp};
          if (c.m < 0 || c.m >= num_sc || c.n < 0 || c.n >= kSymbolsPerSlot)
            throw std::invalid_argument(
                "enumerate_re_set: offsets place an RE outside the grid");
          out.push_back(c);
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end())
    throw std::invalid_argument("enumerate_re_set: CDM groups overlap");
  return out;
}

PilotMap generate_pilots(const CsiRsConfig& cfg, uint64_t seed) {
  const auto res = enumerate_re_set(cfg, 0);
  Rng rng(seed);
  PilotMap pilots;
  for (const ReCoord& c : res) pilots.emplace(c, kQpsk[rng.integer(4)]);
  return pilots;
}

ResourceGrid synthesize_received_grid(const CsiRsConfig& cfg, const PilotMap& pilots,
                                      std::complex<double> h, double noise_var,
                                      double scheduled_fraction, uint64_t seed) {
  cfg.validate();
  if (noise_var < 0) throw std::invalid_argument("synthesize_received_grid: noise_var < 0");
  if (!(scheduled_fraction >= 0.0 && scheduled_fraction <= 1.0))
    throw std::invalid_argument("synthesize_received_grid: scheduled_fraction outside [0, 1]");

  const int num_sc = cfg.bwp.num_subcarriers();
  ResourceGrid grid;
  grid.data = Eigen::MatrixXcd::Zero(num_sc, kSymbolsPerSlot);
  grid.scheduled.setZero(num_sc, kSymbolsPerSlot);
  grid.pilot.setZero(num_sc, kSymbolsPerSlot);
  for (const auto& [c, x] : pilots) {
    if (c.m < 0 || c.m >= num_sc || c.n < 0 || c.n >= kSymbolsPerSlot)
      throw std::invalid_argument("synthesize_received_grid: pilot outside the grid");
    grid.pilot(c.m, c.n) = 1;
  }

  Rng rng(seed);
  for (int n = 0; n < kSymbolsPerSlot; ++n) {
    for (int m = 0; m < num_sc; ++m) {
      std::complex<double> val{0.0, 0.0};
      if (grid.pilot(m, n)) {
        val = h * pilots.at(ReCoord{m, n});
      } else if (scheduled_fraction > 0.0 && rng.coin(scheduled_fraction)) {
        grid.scheduled(m, n) = 1;
        val = h * kQpsk[rng.integer(4)];
      }
      if (noise_var > 0.0) val += rng.cgaussian(noise_var);
      grid.data(m, n) = val;
    }
  }
  return grid;
}

void dump_grid_csv(const ResourceGrid& grid, std::ostream& os) {
  os << "m,n,re,im,is_pilot,is_scheduled\n";
  char buf[96];
  for (int n = 0; n < grid.num_symbols(); ++n) {
    for (int m = 0; m < grid.num_subcarriers(); ++m) {
      const auto v = grid.data(m, n);
      std::snprintf(buf, sizeof(buf), "%d,%d,%.17g,%.17g,%d,%d\n", m, n, v.real(), v.imag(),
                    static_cast<int>(grid.pilot(m, n)), static_cast<int>(grid.scheduled(m, n)));
      os << buf;
    }
  }
}

}  // namespace rissim
