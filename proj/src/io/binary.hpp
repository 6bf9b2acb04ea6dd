// SPDX-License-Identifier: Apache-2.0
// Little-endian primitives shared by the binary formats.
#pragma once

#include <hapnet/errors.hpp>

#include <bit>
#include <cstdint>
#include <cstring>
#include <string>
#include <string_view>
#include <vector>

namespace hapnet::io::detail {

class ByteWriter {
public:
  void raw(std::string_view s) { buf_.append(s); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i)
      buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void f32(double v) { u32(std::bit_cast<std::uint32_t>(static_cast<float>(v))); }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    raw(s);
  }
  const std::string &bytes() const { return buf_; }

private:
  std::string buf_;
};

/// Bounds-checked reader; every overrun is an UnsupportedFormat error.
class ByteReader {
public:
  ByteReader(std::string_view data, std::string what)
      : data_(data), what_(std::move(what)) {}

  std::string_view raw(std::size_t n) {
    need(n);
    auto s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint32_t u32() {
    auto s = raw(4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i)
      v = (v << 8) | static_cast<unsigned char>(s[i]);
    return v;
  }
  double f32() { return static_cast<double>(std::bit_cast<float>(u32())); }
  std::string str(std::size_t max_len = 1 << 20) {
    const auto n = u32();
    if (n > max_len)
      throw UnsupportedFormat(what_ + ": implausible string length " +
                              std::to_string(n));
    return std::string(raw(n));
  }
  bool at_end() const { return pos_ == data_.size(); }
  std::size_t remaining() const { return data_.size() - pos_; }
  void expect_end() const {
    if (!at_end())
      throw UnsupportedFormat(what_ + ": " + std::to_string(remaining()) +
                              " trailing bytes");
  }
  /// Fails early when a declared element count cannot fit in what is left.
  void need(std::size_t n) const {
    if (n > data_.size() - pos_)
      throw UnsupportedFormat(what_ + ": truncated (needs " +
                              std::to_string(n) + " more bytes, " +
                              std::to_string(data_.size() - pos_) + " left)");
  }

private:
  std::string_view data_;
  std::string what_;
  std::size_t pos_ = 0;
};

} // namespace hapnet::io::detail
