// SPDX-License-Identifier: Apache-2.0

#include "rissim/report.hpp"

#include <cmath>

namespace rissim {

void QuantizerSpec::validate() const {
  if (bits < 1 || bits > 8)
    throw std::invalid_argument("QuantizerSpec: bits must be in [1, 8]");
  if (!(step > 0.0)) throw std::invalid_argument("QuantizerSpec: step must be > 0");
}

QuantizerSpec QuantizerSpec::for_bits(int b, double full_scale) {
  QuantizerSpec spec;
  spec.bits = b;
  spec.step = full_scale / static_cast<double>(1 << (b - 1));
  spec.validate();
  return spec;
}

namespace {

int quantize_component(double c, const QuantizerSpec& spec) {
  if (!std::isfinite(c))
    throw std::invalid_argument("quantize: component must be finite");
  // std::round rounds half away from zero
  double r = std::round(c / spec.step);
  r = std::min(r, static_cast<double>(spec.max_code()));
  r = std::max(r, static_cast<double>(spec.min_code()));
  return static_cast<int>(r);
}

}  // namespace

QuantizedCci quantize(std::complex<double> value, const QuantizerSpec& spec) {
  spec.validate();
  return QuantizedCci{quantize_component(value.real(), spec),
                      quantize_component(value.imag(), spec), spec};
}

std::complex<double> dequantize(const QuantizedCci& q) {
  return {q.re_code * q.spec.step, q.im_code * q.spec.step};
}

int CsiReport::packed_length() const {
  switch (variant) {
    case ReportVariant::Siso:
      return 3 + 1 + 4 + 7;
    case ReportVariant::Mimo:
      return 3 + 2 + 4 + 7 + 3 + pmi_width;
    case ReportVariant::Ris:
      if (!cci) throw std::invalid_argument("CsiReport: RIS variant requires a CCI field");
      return 3 + 1 + 4 + 7 + 2 * cci->spec.bits;
  }
  throw std::invalid_argument("CsiReport: unknown variant");
}

namespace {

void check_width(uint64_t value, int width, const char* what) {
  if (width < 64 && value >= (uint64_t{1} << width))
    throw std::invalid_argument(std::string("pack: field exceeds its width: ") + what);
}

uint64_t twos_complement(int code, int bits) {
  return static_cast<uint64_t>(code) & ((uint64_t{1} << bits) - 1);
}

int sign_extend(uint64_t raw, int bits) {
  const uint64_t sign = uint64_t{1} << (bits - 1);
  return static_cast<int>((raw ^ sign) - sign);
}

}  // namespace

Bits pack(const CsiReport& report) {
  Bits out;
  check_width(report.cri, 3, "cri");
  check_width(report.cqi, 4, "cqi");
  check_width(report.rsrp_idx, 7, "rsrp_idx");
  out.append(report.cri, 3);
  switch (report.variant) {
    case ReportVariant::Siso: {
      check_width(report.ri, 1, "ri");
      out.append(report.ri, 1);
      out.append(report.cqi, 4);
      out.append(report.rsrp_idx, 7);
      break;
    }
    case ReportVariant::Mimo: {
      check_width(report.ri, 2, "ri");
      if (report.pmi_width < 0 || report.pmi_width > 32)
        throw std::invalid_argument("pack: pmi_width must be in [0, 32]");
      check_width(report.i1, 3, "i1");
      if (report.pmi_width < 32) check_width(report.pmi, report.pmi_width, "pmi");
      out.append(report.ri, 2);
      out.append(report.cqi, 4);
      out.append(report.rsrp_idx, 7);
      out.append(report.i1, 3);
      out.append(report.pmi, report.pmi_width);
      break;
    }
    case ReportVariant::Ris: {
      check_width(report.ri, 1, "ri");
      if (!report.cci) throw std::invalid_argument("pack: RIS variant requires a CCI field");
      const QuantizerSpec& spec = report.cci->spec;
      spec.validate();
      if (report.cci->re_code < spec.min_code() || report.cci->re_code > spec.max_code() ||
          report.cci->im_code < spec.min_code() || report.cci->im_code > spec.max_code())
        throw std::invalid_argument("pack: CCI code outside the quantizer range");
      if (report.packed_length() > kMaxRisReportBits)
        throw std::invalid_argument("pack: RIS report exceeds the 32-bit cap");
      out.append(report.ri, 1);
      out.append(report.cqi, 4);
      out.append(report.rsrp_idx, 7);
      out.append(twos_complement(report.cci->re_code, spec.bits), spec.bits);
      out.append(twos_complement(report.cci->im_code, spec.bits), spec.bits);
      break;
    }
  }
  return out;
}

CsiReport unpack(const Bits& bits, ReportVariant variant, std::optional<QuantizerSpec> spec,
                 int pmi_width) {
  CsiReport report;
  report.variant = variant;
  int expected = 0;
  switch (variant) {
    case ReportVariant::Siso:
      expected = 15;
      break;
    case ReportVariant::Mimo:
      if (pmi_width < 0 || pmi_width > 32)
        throw std::invalid_argument("unpack: pmi_width must be in [0, 32]");
      expected = 19 + pmi_width;
      break;
    case ReportVariant::Ris:
      if (!spec) throw std::invalid_argument("unpack: RIS variant requires a quantizer spec");
      spec->validate();
      expected = 15 + 2 * spec->bits;
      break;
  }
  if (static_cast<int>(bits.size()) != expected)
    throw DecodeError("unpack: payload length " + std::to_string(bits.size()) +
                      " does not match expected " + std::to_string(expected));

  BitReader in(bits);
  report.cri = static_cast<uint8_t>(in.read(3));
  switch (variant) {
    case ReportVariant::Siso: {
      report.ri = static_cast<uint8_t>(in.read(1));
      report.cqi = static_cast<uint8_t>(in.read(4));
      report.rsrp_idx = static_cast<uint8_t>(in.read(7));
      break;
    }
    case ReportVariant::Mimo: {
      report.ri = static_cast<uint8_t>(in.read(2));
      report.cqi = static_cast<uint8_t>(in.read(4));
      report.rsrp_idx = static_cast<uint8_t>(in.read(7));
      report.i1 = static_cast<uint8_t>(in.read(3));
      report.pmi = static_cast<uint32_t>(in.read(pmi_width));
      report.pmi_width = pmi_width;
      break;
    }
    case ReportVariant::Ris: {
      report.ri = static_cast<uint8_t>(in.read(1));
      report.cqi = static_cast<uint8_t>(in.read(4));
      report.rsrp_idx = static_cast<uint8_t>(in.read(7));
      QuantizedCci cci;
      cci.spec = *spec;
      cci.re_code = sign_extend(in.read(spec->bits), spec->bits);
      cci.im_code = sign_extend(in.read(spec->bits), spec->bits);
      report.cci = cci;
      break;
    }
  }
  return report;
}

int rsrp_to_index(double rsrp_dbm) {
  const double idx = std::round(rsrp_dbm + 140.0);
  return static_cast<int>(std::min(96.0, std::max(0.0, idx)));
}

double rsrp_from_index(int index) {
  const int clamped = std::min(96, std::max(0, index));
  return -140.0 + static_cast<double>(clamped);
}

}  // namespace rissim
