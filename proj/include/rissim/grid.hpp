// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rissim/textconfig.hpp"

namespace rissim {

inline constexpr int kSymbolsPerSlot = 14;
inline constexpr int kSubcarriersPerRb = 12;

struct BwpConfig {
  int num_prbs = 1;
  int scs_khz = 30;
  int first_subcarrier = 0;  // subcarrier index where the first RB starts

  int num_subcarriers() const { return num_prbs * kSubcarriersPerRb; }
  void validate() const;
};

enum class CdmType { NoCdm, FdCdm2 };

enum class CsiRsRow { OnePort, TwoPortFdCdm2 };

/// CSI-RS pattern description: per CDM group j a base offset pair
/// (k_bar[j], l_bar[j]) plus the intra-pattern offsets k' and l' shared by
/// all groups. RE coordinates are m = m_RB + k_bar + k', n = l_bar + l'.
struct CsiRsConfig {
  CsiRsRow row = CsiRsRow::OnePort;
  CdmType cdm_type = CdmType::NoCdm;
  int ports = 1;
  std::vector<int> base_freq_offsets{0};  // k_bar per CDM group
  std::vector<int> base_time_offsets{4};  // l_bar per CDM group
  std::vector<int> intra_offsets_k{0};    // k'
  std::vector<int> intra_offsets_l{0};    // l'
  BwpConfig bwp;

  static CsiRsConfig one_port(const BwpConfig& bwp, int k_bar = 0, int l_bar = 4);
  static CsiRsConfig two_port_fd_cdm2(const BwpConfig& bwp, int k_bar = 0, int l_bar = 4);
  static CsiRsConfig from_config(const TextConfig& cfg);
  static CsiRsConfig load(const std::string& path);

  int res_per_rb() const;
  void validate() const;
};

struct ReCoord {
  int m = 0;  // subcarrier
  int n = 0;  // OFDM symbol

  friend bool operator==(const ReCoord&, const ReCoord&) = default;
  // time-first ordering: (n, m)
  friend bool operator<(const ReCoord& a, const ReCoord& b) {
    return a.n != b.n ? a.n < b.n : a.m < b.m;
  }
};

/// Enumerates the CSI-RS RE set S_p for one port over all RBs of the BWP,
/// sorted by (symbol, subcarrier). Pure function of the configuration.
std::vector<ReCoord> enumerate_re_set(const CsiRsConfig& cfg, int port);

using PilotMap = std::map<ReCoord, std::complex<double>>;

/// Seeded pseudorandom QPSK pilots, one unit-modulus symbol per CSI-RS RE.
PilotMap generate_pilots(const CsiRsConfig& cfg, uint64_t seed);

struct ResourceGrid {
  Eigen::MatrixXcd data;  // subcarriers x symbols
  Eigen::Matrix<uint8_t, Eigen::Dynamic, Eigen::Dynamic> scheduled;
  Eigen::Matrix<uint8_t, Eigen::Dynamic, Eigen::Dynamic> pilot;

  int num_subcarriers() const { return static_cast<int>(data.rows()); }
  int num_symbols() const { return static_cast<int>(data.cols()); }
};

/// Builds one received slot under a flat channel h: pilot REs carry h*x + noise,
/// remaining REs carry either a data symbol through the same channel
/// (with probability scheduled_fraction) or nothing.
ResourceGrid synthesize_received_grid(const CsiRsConfig& cfg, const PilotMap& pilots,
                                      std::complex<double> h, double noise_var,
                                      double scheduled_fraction, uint64_t seed);

/// Debug dump: m,n,re,im,is_pilot,is_scheduled
void dump_grid_csv(const ResourceGrid& grid, std::ostream& os);

}  // namespace rissim
