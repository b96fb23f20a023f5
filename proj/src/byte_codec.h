/*
 * Copyright 2026 The rankfuse Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Little-endian byte packing shared by the binary file formats.

#ifndef RANKFUSE_SRC_BYTE_CODEC_H_
#define RANKFUSE_SRC_BYTE_CODEC_H_

#include <bit>
#include <cstdint>
#include <string>
#include <string_view>

#include "rankfuse/error.h"

namespace rankfuse::internal {

class ByteWriter {
 public:
  void Raw(std::string_view bytes) { out_.append(bytes); }
  void U16(std::uint16_t v) { Unsigned(v, 2); }
  void U32(std::uint32_t v) { Unsigned(v, 4); }
  void U64(std::uint64_t v) { Unsigned(v, 8); }
  void F32(float v) { U32(std::bit_cast<std::uint32_t>(v)); }
  void F64(double v) { U64(std::bit_cast<std::uint64_t>(v)); }
  void String16(std::string_view s) {
    if (s.size() > 0xFFFF) {
      throw InvalidArgument("id longer than 65535 bytes");
    }
    U16(static_cast<std::uint16_t>(s.size()));
    Raw(s);
  }

  std::string Take() { return std::move(out_); }

 private:
  void Unsigned(std::uint64_t v, int width) {
    for (int b = 0; b < width; ++b) {
      out_.push_back(static_cast<char>((v >> (8 * b)) & 0xFF));
    }
  }

  std::string out_;
};

class ByteReader {
 public:
  ByteReader(std::string_view bytes, std::string what)
      : bytes_(bytes), what_(std::move(what)) {}

  std::string_view Raw(std::size_t n) {
    Need(n);
    std::string_view s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint16_t U16() { return static_cast<std::uint16_t>(Unsigned(2)); }
  std::uint32_t U32() { return static_cast<std::uint32_t>(Unsigned(4)); }
  std::uint64_t U64() { return Unsigned(8); }
  float F32() { return std::bit_cast<float>(U32()); }
  double F64() { return std::bit_cast<double>(U64()); }
  std::string String16() { return std::string(Raw(U16())); }

  std::size_t remaining() const { return bytes_.size() - pos_; }

  // Verifies the payload holds at least `count` items of `width` bytes
  // before anything is allocated for them.
  void NeedItems(std::uint64_t count, std::size_t width) {
    if (width != 0 && count > remaining() / width) Fail();
  }

  void ExpectMagic(std::string_view magic) {
    if (bytes_.size() < magic.size() ||
        bytes_.substr(0, magic.size()) != magic) {
      throw FormatError(FormatErrorKind::kBadMagic,
                        what_ + ": expected magic '" + std::string(magic) + "'");
    }
    pos_ = magic.size();
  }

  void ExpectVersion(std::uint32_t expected) {
    const std::uint32_t v = U32();
    if (v != expected) {
      throw FormatError(FormatErrorKind::kVersionMismatch,
                        what_ + ": version " + std::to_string(v) +
                            ", expected " + std::to_string(expected));
    }
  }

  void ExpectEnd() const {
    if (remaining() != 0) {
      throw FormatError(FormatErrorKind::kTrailingData,
                        what_ + ": " + std::to_string(remaining()) +
                            " unexpected bytes after payload");
    }
  }

 private:
  void Need(std::size_t n) {
    if (n > remaining()) Fail();
  }
  [[noreturn]] void Fail() const {
    throw FormatError(FormatErrorKind::kTruncated,
                      what_ + ": file ends at byte " +
                          std::to_string(bytes_.size()) + " inside the payload");
  }
  std::uint64_t Unsigned(int width) {
    const std::string_view s = Raw(static_cast<std::size_t>(width));
    std::uint64_t v = 0;
    for (int b = 0; b < width; ++b) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(s[b])) << (8 * b);
    }
    return v;
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
  std::string what_;
};

}  // namespace rankfuse::internal

#endif  // RANKFUSE_SRC_BYTE_CODEC_H_
