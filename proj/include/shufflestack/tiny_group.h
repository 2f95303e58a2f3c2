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

#ifndef SHUFFLESTACK_TINY_GROUP_H_
#define SHUFFLESTACK_TINY_GROUP_H_

#include <cstdint>
#include <cstring>

#include "shufflestack/common.h"
#include "shufflestack/exp_counter.h"
#include "shufflestack/rng.h"

namespace shufflestack {

// Quadratic residues modulo the safe prime P = 2q + 1 = 2147483579, a cyclic
// group of prime order q = 1073741789 generated by 4. Small enough for
// brute-force oracles; offers no security.
struct TinyGroup {
  static constexpr const char* kName = "tiny31";
  static constexpr uint64_t kModulus = 2147483579ULL;
  static constexpr uint64_t kOrder = 1073741789ULL;
  static constexpr uint64_t kGenerator = 4;
  static constexpr size_t kScalarBytes = 32;
  static constexpr size_t kElementBytes = 32;
  static constexpr int kChunkBits = 16;
  static constexpr bool kHasEmbedding = false;
  static constexpr size_t kEmbedCapacity = 0;

  struct Scalar {
    uint64_t v = 0;
    friend bool operator==(const Scalar& x, const Scalar& y) { return x.v == y.v; }
    friend bool operator<(const Scalar& x, const Scalar& y) { return x.v < y.v; }
    friend Scalar operator+(const Scalar& x, const Scalar& y) {
      return {(x.v + y.v) % kOrder};
    }
    friend Scalar operator-(const Scalar& x, const Scalar& y) {
      return {(x.v + kOrder - y.v) % kOrder};
    }
    friend Scalar operator*(const Scalar& x, const Scalar& y) {
      return {(x.v * y.v) % kOrder};
    }
    friend Scalar operator-(const Scalar& x) { return {(kOrder - x.v) % kOrder}; }
    Scalar& operator+=(const Scalar& y) { return *this = *this + y; }
    Scalar& operator-=(const Scalar& y) { return *this = *this - y; }
    Scalar& operator*=(const Scalar& y) { return *this = *this * y; }
  };

  struct Element {
    uint64_t v = 1;
    friend bool operator==(const Element& x, const Element& y) { return x.v == y.v; }
    friend bool operator!=(const Element& x, const Element& y) { return x.v != y.v; }
    friend bool operator<(const Element& x, const Element& y) { return x.v < y.v; }
    friend Element operator*(const Element& x, const Element& y) {
      return {(x.v * y.v) % kModulus};
    }
    friend Element operator/(const Element& x, const Element& y) {
      return x * Inverse(y);
    }
    Element& operator*=(const Element& y) { return *this = *this * y; }
  };

  static uint64_t PowMod(uint64_t b, uint64_t e, uint64_t m) {
    uint64_t r = 1;
    b %= m;
    while (e) {
      if (e & 1) r = r * b % m;
      b = b * b % m;
      e >>= 1;
    }
    return r;
  }

  static Scalar SZero() { return {0}; }
  static Scalar SOne() { return {1}; }
  static Scalar SFromU64(uint64_t v) { return {v % kOrder}; }
  static bool SIsZero(const Scalar& s) { return s.v == 0; }
  static Scalar SInv(const Scalar& s) {
    if (s.v == 0) throw DomainError("inverse of zero scalar");
    return {PowMod(s.v, kOrder - 2, kOrder)};
  }
  static Scalar SFromWide(const uint8_t wide[64]) {
    unsigned __int128 acc = 0;
    for (int i = 15; i >= 0; --i) acc = (acc << 8) | wide[i];
    return {static_cast<uint64_t>(acc % kOrder)};
  }
  static Scalar SRandom(Rng& rng) { return {rng.UniformBelow(kOrder)}; }
  static void SEncode(const Scalar& s, uint8_t out[32]) {
    std::memset(out, 0, 32);
    for (int i = 0; i < 8; ++i) out[i] = static_cast<uint8_t>(s.v >> (8 * i));
  }
  static bool SDecode(const uint8_t in[32], Scalar* out) {
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(in[i]) << (8 * i);
    for (int i = 8; i < 32; ++i) {
      if (in[i] != 0) return false;
    }
    if (v >= kOrder) return false;
    out->v = v;
    return true;
  }

  static Element Identity() { return {1}; }
  static const Element& Generator() {
    static const Element g{kGenerator};
    return g;
  }
  static Element Inverse(const Element& x) {
    return {PowMod(x.v, kModulus - 2, kModulus)};
  }
  static Element Exp(const Element& base, const Scalar& s) {
    CountExp();
    return {PowMod(base.v, s.v, kModulus)};
  }
  static Element ExpG(const Scalar& s) { return Exp(Generator(), s); }

  class FixedBase {
   public:
    explicit FixedBase(const Element& base) : base_(base) {}
    Element Exp(const Scalar& s) const { return TinyGroup::Exp(base_, s); }

   private:
    Element base_;
  };

  static void Encode(const Element& e, uint8_t out[32]) {
    std::memset(out, 0, 32);
    for (int i = 0; i < 8; ++i) out[i] = static_cast<uint8_t>(e.v >> (8 * i));
  }
  // Canonical: the upper bytes are zero and the value is a nonzero residue
  // of order dividing q.
  static bool Decode(const uint8_t in[32], Element* out) {
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(in[i]) << (8 * i);
    for (int i = 8; i < 32; ++i) {
      if (in[i] != 0) return false;
    }
    if (v == 0 || v >= kModulus) return false;
    if (PowMod(v, kOrder, kModulus) != 1) return false;
    out->v = v;
    return true;
  }

  static bool Embed(const uint8_t*, size_t, Element*) { return false; }
  static bool Extract(const Element&, uint8_t*) { return false; }
};

}  // namespace shufflestack

#endif  // SHUFFLESTACK_TINY_GROUP_H_
