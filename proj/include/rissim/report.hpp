// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>

#include "rissim/bits.hpp"

namespace rissim {

struct DecodeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Uniform symmetric quantizer over one real component: round half away from
/// zero, then clip to the signed b-bit code range.
struct QuantizerSpec {
  int bits = 8;       // b, per component; payload is 2b bits
  double step = 1.0;  // delta

  int min_code() const { return -(1 << (bits - 1)); }
  int max_code() const { return (1 << (bits - 1)) - 1; }
  void validate() const;

  /// step = full_scale / 2^(b-1), so codes span [-full_scale, full_scale).
  static QuantizerSpec for_bits(int b, double full_scale = 1.0);
};

struct QuantizedCci {
  int re_code = 0;
  int im_code = 0;
  QuantizerSpec spec;
};

QuantizedCci quantize(std::complex<double> value, const QuantizerSpec& spec);
std::complex<double> dequantize(const QuantizedCci& q);

enum class ReportVariant { Siso, Mimo, Ris };

/// Field widths: CRI 3, RI 1 (2 for MIMO), CQI 4, RSRP 7, i1 3, PMI variable,
/// CCI 2b in two's complement. Packed MSB-first in that order.
struct CsiReport {
  ReportVariant variant = ReportVariant::Siso;
  uint8_t cri = 0;       // 3 bits
  uint8_t ri = 0;        // 1 bit (SISO/RIS) or 2 bits (MIMO)
  uint8_t cqi = 0;       // 4 bits
  uint8_t rsrp_idx = 0;  // 7 bits
  uint8_t i1 = 0;        // 3 bits, MIMO only, opaque
  uint32_t pmi = 0;      // MIMO only, opaque
  int pmi_width = 0;     // MIMO only
  std::optional<QuantizedCci> cci;  // RIS only

  int packed_length() const;
};

inline constexpr int kMaxRisReportBits = 32;

Bits pack(const CsiReport& report);
CsiReport unpack(const Bits& bits, ReportVariant variant,
                 std::optional<QuantizerSpec> spec = std::nullopt, int pmi_width = 0);

/// Clamped affine RSRP mapping: [-140, -44] dBm to indices [0, 96], 1 dB steps.
int rsrp_to_index(double rsrp_dbm);
double rsrp_from_index(int index);

struct UciBudget {
  enum class Format { Pucch2, Pucch3 };
  Format format = Format::Pucch2;
  int min_bits = 20;
  int max_bits = 50;

  static UciBudget pucch2() { return {Format::Pucch2, 20, 50}; }
  static UciBudget pucch3() { return {Format::Pucch3, 160, 200}; }
  bool fits(int nbits) const { return nbits <= max_bits; }
};

}  // namespace rissim
