// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rissim {

/// MSB-first bit string. Fields appended first occupy the most significant
/// positions, matching the over-the-air field order of the report bitmaps.
class Bits {
 public:
  Bits() = default;

  void append_bit(bool b) {
    const std::size_t off = nbits_ % 8;
    if (off == 0) bytes_.push_back(0);
    if (b) bytes_[nbits_ / 8] |= static_cast<uint8_t>(0x80u >> off);
    ++nbits_;
  }

  /// Appends the low `width` bits of `value`, most significant bit first.
  void append(uint64_t value, int width) {
    if (width < 0 || width > 64) throw std::invalid_argument("Bits::append: width must be in [0, 64]");
    for (int i = width - 1; i >= 0; --i) append_bit((value >> i) & 1u);
  }

  std::size_t size() const { return nbits_; }
  bool empty() const { return nbits_ == 0; }

  bool bit(std::size_t i) const {
    if (i >= nbits_) throw std::out_of_range("Bits::bit: index out of range");
    return (bytes_[i / 8] >> (7 - i % 8)) & 1u;
  }

  /// Backing bytes, zero-padded to a whole byte.
  const std::vector<uint8_t>& bytes() const { return bytes_; }

  /// Reconstructs a bit string from padded bytes; padding bits are ignored.
  static Bits from_bytes(const std::vector<uint8_t>& bytes, std::size_t nbits) {
    if (bytes.size() != (nbits + 7) / 8)
      throw std::invalid_argument("Bits::from_bytes: byte count does not match bit length");
    Bits out;
    out.bytes_ = bytes;
    out.nbits_ = nbits;
    if (nbits % 8 != 0 && !out.bytes_.empty()) {
      // clear padding so equality is well defined
      out.bytes_.back() &= static_cast<uint8_t>(0xFF00u >> (nbits % 8));
    }
    return out;
  }

  std::string to_string01() const {
    std::string s;
    s.reserve(nbits_);
    for (std::size_t i = 0; i < nbits_; ++i) s.push_back(bit(i) ? '1' : '0');
    return s;
  }

  std::string to_hex() const {
    static const char* digits = "0123456789abcdef";
    std::string s;
    s.reserve(bytes_.size() * 2);
    for (uint8_t b : bytes_) {
      s.push_back(digits[b >> 4]);
      s.push_back(digits[b & 0xF]);
    }
    return s;
  }

  friend bool operator==(const Bits& a, const Bits& b) {
    return a.nbits_ == b.nbits_ && a.bytes_ == b.bytes_;
  }

 private:
  std::vector<uint8_t> bytes_;
  std::size_t nbits_ = 0;
};

class BitReader {
 public:
  explicit BitReader(const Bits& bits) : bits_(bits) {}

  uint64_t read(int width) {
    if (width < 0 || width > 64) throw std::invalid_argument("BitReader::read: width must be in [0, 64]");
    if (pos_ + static_cast<std::size_t>(width) > bits_.size())
      throw std::out_of_range("BitReader::read: past end of bit string");
    uint64_t v = 0;
    for (int i = 0; i < width; ++i) v = (v << 1) | static_cast<uint64_t>(bits_.bit(pos_++));
    return v;
  }

  std::size_t remaining() const { return bits_.size() - pos_; }
  bool done() const { return pos_ == bits_.size(); }

 private:
  const Bits& bits_;
  std::size_t pos_ = 0;
};

}  // namespace rissim
