// Copyright 2026 The Shufflestack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SHUFFLESTACK_COMMON_H_
#define SHUFFLESTACK_COMMON_H_

#include <cstddef>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace shufflestack {

using Bytes = std::vector<uint8_t>;
using PartyId = uint32_t;

// The relaying server always has this id; clients are numbered from 0.
inline constexpr PartyId kServer = 0xffffffffu;

// Base class for every error raised by the library. The `kind` string is the
// stable name used in CLI reports.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

#define SHUFFLESTACK_DEFINE_ERROR(Name)                             \
  class Name : public Error {                                       \
   public:                                                          \
    explicit Name(const std::string& what) : Error(#Name, what) {}  \
  }

SHUFFLESTACK_DEFINE_ERROR(PayloadTooLarge);
SHUFFLESTACK_DEFINE_ERROR(InvalidThreshold);
SHUFFLESTACK_DEFINE_ERROR(NotEnoughShares);
SHUFFLESTACK_DEFINE_ERROR(LengthMismatch);
SHUFFLESTACK_DEFINE_ERROR(SizeMismatch);
SHUFFLESTACK_DEFINE_ERROR(TooLarge);
SHUFFLESTACK_DEFINE_ERROR(ConfigInvalid);
SHUFFLESTACK_DEFINE_ERROR(DomainError);
SHUFFLESTACK_DEFINE_ERROR(PreconditionViolated);
SHUFFLESTACK_DEFINE_ERROR(TooManyCorruptions);
SHUFFLESTACK_DEFINE_ERROR(NotSquare);
SHUFFLESTACK_DEFINE_ERROR(Infeasible);
SHUFFLESTACK_DEFINE_ERROR(DecodeError);

#undef SHUFFLESTACK_DEFINE_ERROR

inline std::string ToHex(const uint8_t* data, size_t len) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(2 * len, '0');
  for (size_t i = 0; i < len; ++i) {
    out[2 * i] = kDigits[data[i] >> 4];
    out[2 * i + 1] = kDigits[data[i] & 15];
  }
  return out;
}

inline std::string ToHex(const Bytes& b) { return ToHex(b.data(), b.size()); }

inline Bytes FromHex(std::string_view hex) {
  if (hex.size() % 2 != 0) throw DecodeError("odd-length hex string");
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw DecodeError("bad hex digit");
  };
  Bytes out(hex.size() / 2);
  for (size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<uint8_t>(nibble(hex[2 * i]) << 4 |
                                  nibble(hex[2 * i + 1]));
  }
  return out;
}

// Little-endian append-only serializer. Every wire format in the library is
// built from these primitives so sizes are easy to account for.
class ByteWriter {
 public:
  void U8(uint8_t v) { buf_.push_back(v); }
  void U16(uint16_t v) { Fixed(v, 2); }
  void U32(uint32_t v) { Fixed(v, 4); }
  void U64(uint64_t v) { Fixed(v, 8); }
  void Raw(const uint8_t* p, size_t n) { buf_.insert(buf_.end(), p, p + n); }
  void Raw(const Bytes& b) { Raw(b.data(), b.size()); }
  // Length-prefixed blob (u32 length).
  void Blob(const Bytes& b) {
    U32(static_cast<uint32_t>(b.size()));
    Raw(b);
  }
  const Bytes& bytes() const { return buf_; }
  Bytes Take() { return std::move(buf_); }
  size_t size() const { return buf_.size(); }

 private:
  void Fixed(uint64_t v, int n) {
    for (int i = 0; i < n; ++i) buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
  }
  Bytes buf_;
};

// Bounds-checked reader matching ByteWriter. Throws DecodeError on
// truncation so malformed messages surface as a single exception type.
class ByteReader {
 public:
  ByteReader(const uint8_t* p, size_t n) : p_(p), n_(n) {}
  explicit ByteReader(const Bytes& b) : ByteReader(b.data(), b.size()) {}

  uint8_t U8() { return static_cast<uint8_t>(Fixed(1)); }
  uint16_t U16() { return static_cast<uint16_t>(Fixed(2)); }
  uint32_t U32() { return static_cast<uint32_t>(Fixed(4)); }
  uint64_t U64() { return Fixed(8); }
  const uint8_t* Raw(size_t n) {
    Need(n);
    const uint8_t* r = p_ + pos_;
    pos_ += n;
    return r;
  }
  Bytes Blob() {
    uint32_t len = U32();
    const uint8_t* r = Raw(len);
    return Bytes(r, r + len);
  }
  size_t remaining() const { return n_ - pos_; }
  bool done() const { return pos_ == n_; }
  void ExpectDone() const {
    if (!done()) throw DecodeError("trailing bytes in message");
  }

 private:
  void Need(size_t k) const {
    if (n_ - pos_ < k) throw DecodeError("truncated message");
  }
  uint64_t Fixed(int k) {
    Need(k);
    uint64_t v = 0;
    for (int i = 0; i < k; ++i) v |= static_cast<uint64_t>(p_[pos_ + i]) << (8 * i);
    pos_ += k;
    return v;
  }
  const uint8_t* p_;
  size_t n_;
  size_t pos_ = 0;
};

}  // namespace shufflestack

#endif  // SHUFFLESTACK_COMMON_H_
