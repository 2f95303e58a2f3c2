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

#ifndef SHUFFLESTACK_RISTRETTO255_H_
#define SHUFFLESTACK_RISTRETTO255_H_

#include <sodium.h>

#include <array>
#include <cstdint>
#include <cstring>
#include <memory>

#include "shufflestack/common.h"
#include "shufflestack/exp_counter.h"
#include "shufflestack/field25519.h"
#include "shufflestack/rng.h"

namespace shufflestack {

// The prime-order group ristretto255 (order 2^252 + 2774...). Scalars use
// libsodium's reduction routines; points use the projective arithmetic in
// field25519.h and are only encoded for serialization and hashing.
struct Ristretto255 {
  static constexpr const char* kName = "ristretto255";
  static constexpr size_t kScalarBytes = 32;
  static constexpr size_t kElementBytes = 32;
  // Chunk width for exponent encoding and bytes carried by one embedded
  // element.
  static constexpr int kChunkBits = 32;
  static constexpr bool kHasEmbedding = true;
  static constexpr size_t kEmbedCapacity = 16;

  struct Scalar {
    std::array<uint8_t, 32> b{};
    friend bool operator==(const Scalar& x, const Scalar& y) { return x.b == y.b; }
    friend bool operator<(const Scalar& x, const Scalar& y) { return x.b < y.b; }
    friend Scalar operator+(const Scalar& x, const Scalar& y) {
      Scalar r;
      crypto_core_ristretto255_scalar_add(r.b.data(), x.b.data(), y.b.data());
      return r;
    }
    friend Scalar operator-(const Scalar& x, const Scalar& y) {
      Scalar r;
      crypto_core_ristretto255_scalar_sub(r.b.data(), x.b.data(), y.b.data());
      return r;
    }
    friend Scalar operator*(const Scalar& x, const Scalar& y) {
      Scalar r;
      crypto_core_ristretto255_scalar_mul(r.b.data(), x.b.data(), y.b.data());
      return r;
    }
    friend Scalar operator-(const Scalar& x) {
      Scalar r;
      crypto_core_ristretto255_scalar_negate(r.b.data(), x.b.data());
      return r;
    }
    Scalar& operator+=(const Scalar& y) { return *this = *this + y; }
    Scalar& operator-=(const Scalar& y) { return *this = *this - y; }
    Scalar& operator*=(const Scalar& y) { return *this = *this * y; }
  };

  struct Element {
    internal::EdPoint p = internal::EdIdentity();
    friend bool operator==(const Element& x, const Element& y) {
      return internal::RistrettoEqual(x.p, y.p);
    }
    friend bool operator!=(const Element& x, const Element& y) { return !(x == y); }
    friend Element operator*(const Element& x, const Element& y) {
      return {internal::EdAdd(x.p, y.p)};
    }
    friend Element operator/(const Element& x, const Element& y) {
      return {internal::EdSub(x.p, internal::EdToCached(y.p))};
    }
    Element& operator*=(const Element& y) { return *this = *this * y; }
  };

  static Scalar SZero() { return Scalar{}; }
  static Scalar SFromU64(uint64_t v) {
    Scalar s;
    for (int i = 0; i < 8; ++i) s.b[i] = static_cast<uint8_t>(v >> (8 * i));
    return s;
  }
  static Scalar SOne() { return SFromU64(1); }
  static bool SIsZero(const Scalar& s) { return s == Scalar{}; }
  static Scalar SInv(const Scalar& s) {
    Scalar r;
    if (crypto_core_ristretto255_scalar_invert(r.b.data(), s.b.data()) != 0) {
      throw DomainError("inverse of zero scalar");
    }
    return r;
  }
  // Reduces 64 uniform bytes; statistical distance from uniform ~2^-260.
  static Scalar SFromWide(const uint8_t wide[64]) {
    Scalar r;
    uint8_t tmp[64];
    std::memcpy(tmp, wide, 64);
    crypto_core_ristretto255_scalar_reduce(r.b.data(), tmp);
    return r;
  }
  static Scalar SRandom(Rng& rng) {
    uint8_t wide[64];
    rng.Fill(wide, 64);
    return SFromWide(wide);
  }
  static void SEncode(const Scalar& s, uint8_t out[32]) {
    std::memcpy(out, s.b.data(), 32);
  }
  static bool SDecode(const uint8_t in[32], Scalar* out) {
    uint8_t wide[64] = {0};
    std::memcpy(wide, in, 32);
    Scalar r;
    crypto_core_ristretto255_scalar_reduce(r.b.data(), wide);
    if (std::memcmp(r.b.data(), in, 32) != 0) return false;
    *out = r;
    return true;
  }

  static Element Identity() { return Element{}; }
  static const Element& Generator() {
    static const Element g = [] {
      static constexpr uint8_t kBase[32] = {
          0xe2, 0xf2, 0xae, 0x0a, 0x6a, 0xbc, 0x4e, 0x71, 0xa8, 0x84, 0xa9,
          0x61, 0xc5, 0x00, 0x51, 0x5f, 0x58, 0xe3, 0x0b, 0x6a, 0xa5, 0x82,
          0xdd, 0x8d, 0xb6, 0xa6, 0x59, 0x45, 0xe0, 0x8d, 0x2d, 0x76};
      Element e;
      internal::RistrettoDecode(kBase, &e.p);
      return e;
    }();
    return g;
  }
  static Element Inverse(const Element& x) { return {internal::EdNeg(x.p)}; }

  static Element Exp(const Element& base, const Scalar& s) {
    CountExp();
    return {internal::EdScalarMul(base.p, s.b.data())};
  }
  static Element ExpG(const Scalar& s) {
    CountExp();
    return {GeneratorTable().Mul(s.b.data())};
  }

  // Precomputed powers of a fixed base; worth building once a base is used
  // for more than a handful of exponentiations.
  class FixedBase {
   public:
    explicit FixedBase(const Element& base)
        : table_(std::make_shared<internal::EdFixedBase>(base.p)) {}
    Element Exp(const Scalar& s) const {
      CountExp();
      return {table_->Mul(s.b.data())};
    }

   private:
    std::shared_ptr<const internal::EdFixedBase> table_;
  };

  static void Encode(const Element& e, uint8_t out[32]) {
    internal::RistrettoEncode(out, e.p);
  }
  static bool Decode(const uint8_t in[32], Element* out) {
    return internal::RistrettoDecode(in, &out->p);
  }

  // Invertible embedding of up to kEmbedCapacity bytes: byte 0 is zero,
  // bytes 1..16 carry the payload, and bytes 17..24 are a counter bumped
  // until the string is a valid encoding (about one try in eight succeeds).
  // Extract insists bytes 25..31 are zero.
  static bool Embed(const uint8_t* payload, size_t len, Element* out) {
    if (len > kEmbedCapacity) return false;
    uint8_t buf[32] = {0};
    std::memcpy(buf + 1, payload, len);
    for (uint64_t ctr = 0; ctr < (uint64_t{1} << 40); ++ctr) {
      for (int i = 0; i < 8; ++i) buf[17 + i] = static_cast<uint8_t>(ctr >> (8 * i));
      if (Decode(buf, out)) return true;
    }
    return false;
  }
  static bool Extract(const Element& e, uint8_t out[kEmbedCapacity]) {
    uint8_t buf[32];
    Encode(e, buf);
    if (buf[0] != 0 || buf[31] != 0) return false;
    for (int i = 25; i < 31; ++i) {
      if (buf[i] != 0) return false;
    }
    std::memcpy(out, buf + 1, kEmbedCapacity);
    return true;
  }

 private:
  static const internal::EdFixedBase& GeneratorTable() {
    static const internal::EdFixedBase* table =
        new internal::EdFixedBase(Generator().p);
    return *table;
  }
};

}  // namespace shufflestack

#endif  // SHUFFLESTACK_RISTRETTO255_H_
