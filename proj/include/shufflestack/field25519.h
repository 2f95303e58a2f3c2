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

// Arithmetic in GF(2^255 - 19) with five 51-bit limbs, and the extended
// twisted Edwards point operations that back the ristretto255 group.
//
// libsodium exposes ristretto255 only through encoded points, so every group
// operation pays for a square root and an inversion. Keeping points in
// projective form makes a multiplication roughly fifty times cheaper, which
// is what lets the shuffle arguments run at the sizes the tests need.
// Nothing here is constant time.

#ifndef SHUFFLESTACK_FIELD25519_H_
#define SHUFFLESTACK_FIELD25519_H_

#include <array>
#include <cstdint>
#include <cstring>

namespace shufflestack::internal {

using u128 = unsigned __int128;

inline constexpr uint64_t kMask51 = (uint64_t{1} << 51) - 1;

struct Fe {
  uint64_t v[5];
};

inline constexpr Fe kFeZero = {{0, 0, 0, 0, 0}};
inline constexpr Fe kFeOne = {{1, 0, 0, 0, 0}};
// Edwards d, 2d and sqrt(-1), plus 1/sqrt(a - d) for the ristretto encoder.
inline constexpr Fe kFeD = {{929955233495203ULL, 466365720129213ULL,
                             1662059464998953ULL, 2033849074728123ULL,
                             1442794654840575ULL}};
inline constexpr Fe kFeD2 = {{1859910466990425ULL, 932731440258426ULL,
                              1072319116312658ULL, 1815898335770999ULL,
                              633789495995903ULL}};
inline constexpr Fe kFeSqrtM1 = {{1718705420411056ULL, 234908883556509ULL,
                                  2233514472574048ULL, 2117202627021982ULL,
                                  765476049583133ULL}};
inline constexpr Fe kFeInvSqrtAMinusD = {
    {278908739862762ULL, 821645201101625ULL, 8113234426968ULL,
     1777959178193151ULL, 2118520810568447ULL}};

inline Fe FeCarry(Fe a) {
  uint64_t c;
  c = a.v[0] >> 51; a.v[0] &= kMask51; a.v[1] += c;
  c = a.v[1] >> 51; a.v[1] &= kMask51; a.v[2] += c;
  c = a.v[2] >> 51; a.v[2] &= kMask51; a.v[3] += c;
  c = a.v[3] >> 51; a.v[3] &= kMask51; a.v[4] += c;
  c = a.v[4] >> 51; a.v[4] &= kMask51; a.v[0] += 19 * c;
  return a;
}

inline Fe FeAdd(const Fe& a, const Fe& b) {
  Fe r;
  for (int i = 0; i < 5; ++i) r.v[i] = a.v[i] + b.v[i];
  return FeCarry(r);
}

// a - b computed as a + 4p - b; b may have limbs up to 2^53.
inline Fe FeSub(const Fe& a, const Fe& b) {
  Fe r;
  r.v[0] = a.v[0] + 0x1FFFFFFFFFFFB4ULL - b.v[0];
  for (int i = 1; i < 5; ++i) r.v[i] = a.v[i] + 0x1FFFFFFFFFFFFCULL - b.v[i];
  return FeCarry(r);
}

inline Fe FeNeg(const Fe& a) { return FeSub(kFeZero, a); }

inline Fe FeMul(const Fe& a, const Fe& b) {
  const uint64_t b1_19 = 19 * b.v[1], b2_19 = 19 * b.v[2],
                 b3_19 = 19 * b.v[3], b4_19 = 19 * b.v[4];
  u128 t0 = (u128)a.v[0] * b.v[0] + (u128)a.v[1] * b4_19 +
            (u128)a.v[2] * b3_19 + (u128)a.v[3] * b2_19 +
            (u128)a.v[4] * b1_19;
  u128 t1 = (u128)a.v[0] * b.v[1] + (u128)a.v[1] * b.v[0] +
            (u128)a.v[2] * b4_19 + (u128)a.v[3] * b3_19 +
            (u128)a.v[4] * b2_19;
  u128 t2 = (u128)a.v[0] * b.v[2] + (u128)a.v[1] * b.v[1] +
            (u128)a.v[2] * b.v[0] + (u128)a.v[3] * b4_19 +
            (u128)a.v[4] * b3_19;
  u128 t3 = (u128)a.v[0] * b.v[3] + (u128)a.v[1] * b.v[2] +
            (u128)a.v[2] * b.v[1] + (u128)a.v[3] * b.v[0] +
            (u128)a.v[4] * b4_19;
  u128 t4 = (u128)a.v[0] * b.v[4] + (u128)a.v[1] * b.v[3] +
            (u128)a.v[2] * b.v[2] + (u128)a.v[3] * b.v[1] +
            (u128)a.v[4] * b.v[0];
  Fe r;
  t1 += t0 >> 51;
  r.v[0] = static_cast<uint64_t>(t0) & kMask51;
  t2 += t1 >> 51;
  r.v[1] = static_cast<uint64_t>(t1) & kMask51;
  t3 += t2 >> 51;
  r.v[2] = static_cast<uint64_t>(t2) & kMask51;
  t4 += t3 >> 51;
  r.v[3] = static_cast<uint64_t>(t3) & kMask51;
  u128 top = t4 >> 51;
  r.v[4] = static_cast<uint64_t>(t4) & kMask51;
  u128 x = (u128)r.v[0] + top * 19;
  r.v[0] = static_cast<uint64_t>(x) & kMask51;
  r.v[1] += static_cast<uint64_t>(x >> 51);
  return r;
}

inline Fe FeSq(const Fe& a) { return FeMul(a, a); }

inline Fe FeSqN(Fe a, int n) {
  for (int i = 0; i < n; ++i) a = FeSq(a);
  return a;
}

inline Fe FeFromBytes(const uint8_t s[32]) {
  auto load = [&](int off) {
    uint64_t v;
    std::memcpy(&v, s + off, 8);
    return v;
  };
  Fe r;
  r.v[0] = load(0) & kMask51;
  r.v[1] = (load(6) >> 3) & kMask51;
  r.v[2] = (load(12) >> 6) & kMask51;
  r.v[3] = (load(19) >> 1) & kMask51;
  r.v[4] = (load(24) >> 12) & kMask51;
  return r;
}

inline void FeToBytes(uint8_t out[32], const Fe& in) {
  Fe h = FeCarry(FeCarry(in));
  // h < 2^255 + small; subtract p once if h >= p.
  uint64_t q = (h.v[0] + 19) >> 51;
  q = (h.v[1] + q) >> 51;
  q = (h.v[2] + q) >> 51;
  q = (h.v[3] + q) >> 51;
  q = (h.v[4] + q) >> 51;
  h.v[0] += 19 * q;
  uint64_t c;
  c = h.v[0] >> 51; h.v[0] &= kMask51; h.v[1] += c;
  c = h.v[1] >> 51; h.v[1] &= kMask51; h.v[2] += c;
  c = h.v[2] >> 51; h.v[2] &= kMask51; h.v[3] += c;
  c = h.v[3] >> 51; h.v[3] &= kMask51; h.v[4] += c;
  h.v[4] &= kMask51;
  uint64_t w[4] = {h.v[0] | (h.v[1] << 51), (h.v[1] >> 13) | (h.v[2] << 38),
                   (h.v[2] >> 26) | (h.v[3] << 25),
                   (h.v[3] >> 39) | (h.v[4] << 12)};
  std::memcpy(out, w, 32);
}

inline bool FeIsZero(const Fe& a) {
  uint8_t b[32];
  FeToBytes(b, a);
  uint8_t acc = 0;
  for (uint8_t x : b) acc |= x;
  return acc == 0;
}

inline bool FeEqual(const Fe& a, const Fe& b) { return FeIsZero(FeSub(a, b)); }

inline bool FeIsNegative(const Fe& a) {
  uint8_t b[32];
  FeToBytes(b, a);
  return b[0] & 1;
}

inline Fe FeAbs(const Fe& a) { return FeIsNegative(a) ? FeNeg(a) : a; }

inline Fe FeInvert(const Fe& z) {
  Fe t0 = FeSq(z);
  Fe t1 = FeSqN(t0, 2);
  t1 = FeMul(z, t1);
  t0 = FeMul(t0, t1);
  Fe t2 = FeSq(t0);
  t1 = FeMul(t1, t2);
  t2 = FeSqN(t1, 5);
  t1 = FeMul(t2, t1);
  t2 = FeSqN(t1, 10);
  t2 = FeMul(t2, t1);
  Fe t3 = FeSqN(t2, 20);
  t2 = FeMul(t3, t2);
  t2 = FeSqN(t2, 10);
  t1 = FeMul(t2, t1);
  t2 = FeSqN(t1, 50);
  t2 = FeMul(t2, t1);
  t3 = FeSqN(t2, 100);
  t2 = FeMul(t3, t2);
  t2 = FeSqN(t2, 50);
  t1 = FeMul(t2, t1);
  t1 = FeSqN(t1, 5);
  return FeMul(t1, t0);
}

// z^((p-5)/8)
inline Fe FePow22523(const Fe& z) {
  Fe t0 = FeSq(z);
  Fe t1 = FeSqN(t0, 2);
  t1 = FeMul(z, t1);
  t0 = FeMul(t0, t1);
  t0 = FeSq(t0);
  t0 = FeMul(t1, t0);
  t1 = FeSqN(t0, 5);
  t0 = FeMul(t1, t0);
  t1 = FeSqN(t0, 10);
  t1 = FeMul(t1, t0);
  Fe t2 = FeSqN(t1, 20);
  t1 = FeMul(t2, t1);
  t1 = FeSqN(t1, 10);
  t0 = FeMul(t1, t0);
  t1 = FeSqN(t0, 50);
  t1 = FeMul(t1, t0);
  t2 = FeSqN(t1, 100);
  t1 = FeMul(t2, t1);
  t1 = FeSqN(t1, 50);
  t0 = FeMul(t1, t0);
  t0 = FeSqN(t0, 2);
  return FeMul(t0, z);
}

// Returns (was_square, r) with r the non-negative square root of u/v when it
// exists, and of sqrt(-1)*u/v otherwise.
inline bool FeSqrtRatioM1(const Fe& u, const Fe& v, Fe* out) {
  Fe v3 = FeMul(FeSq(v), v);
  Fe v7 = FeMul(FeSq(v3), v);
  Fe r = FeMul(FeMul(u, v3), FePow22523(FeMul(u, v7)));
  Fe check = FeMul(v, FeSq(r));
  Fe neg_u = FeNeg(u);
  bool correct = FeEqual(check, u);
  bool flipped = FeEqual(check, neg_u);
  bool flipped_i = FeEqual(check, FeMul(neg_u, kFeSqrtM1));
  if (flipped || flipped_i) r = FeMul(r, kFeSqrtM1);
  *out = FeAbs(r);
  return correct || flipped;
}

// Extended coordinates (X:Y:Z:T) with x = X/Z, y = Y/Z, xy = T/Z.
struct EdPoint {
  Fe X, Y, Z, T;
};

// Precomputed addend (Y+X, Y-X, Z, 2dT).
struct EdCached {
  Fe YpX, YmX, Z, T2d;
};

inline EdPoint EdIdentity() { return {kFeZero, kFeOne, kFeOne, kFeZero}; }

inline EdCached EdToCached(const EdPoint& p) {
  return {FeAdd(p.Y, p.X), FeSub(p.Y, p.X), p.Z, FeMul(p.T, kFeD2)};
}

inline EdPoint EdCompletedToExtended(const Fe& x, const Fe& y, const Fe& z,
                                     const Fe& t) {
  return {FeMul(x, t), FeMul(y, z), FeMul(z, t), FeMul(x, y)};
}

inline EdPoint EdAdd(const EdPoint& p, const EdCached& q) {
  Fe pp = FeMul(FeAdd(p.Y, p.X), q.YpX);
  Fe mm = FeMul(FeSub(p.Y, p.X), q.YmX);
  Fe tt = FeMul(p.T, q.T2d);
  Fe zz = FeMul(p.Z, q.Z);
  Fe zz2 = FeAdd(zz, zz);
  return EdCompletedToExtended(FeSub(pp, mm), FeAdd(pp, mm), FeAdd(zz2, tt),
                               FeSub(zz2, tt));
}

inline EdPoint EdSub(const EdPoint& p, const EdCached& q) {
  Fe pp = FeMul(FeAdd(p.Y, p.X), q.YmX);
  Fe mm = FeMul(FeSub(p.Y, p.X), q.YpX);
  Fe tt = FeMul(p.T, q.T2d);
  Fe zz = FeMul(p.Z, q.Z);
  Fe zz2 = FeAdd(zz, zz);
  return EdCompletedToExtended(FeSub(pp, mm), FeAdd(pp, mm), FeSub(zz2, tt),
                               FeAdd(zz2, tt));
}

inline EdPoint EdAdd(const EdPoint& p, const EdPoint& q) {
  return EdAdd(p, EdToCached(q));
}

inline EdPoint EdDouble(const EdPoint& p) {
  Fe xx = FeSq(p.X);
  Fe yy = FeSq(p.Y);
  Fe zz2 = FeSq(p.Z);
  zz2 = FeAdd(zz2, zz2);
  Fe xpy2 = FeSq(FeAdd(p.X, p.Y));
  Fe yy_plus_xx = FeAdd(yy, xx);
  Fe yy_minus_xx = FeSub(yy, xx);
  return EdCompletedToExtended(FeSub(xpy2, yy_plus_xx), yy_plus_xx,
                               yy_minus_xx, FeSub(zz2, yy_minus_xx));
}

inline EdPoint EdNeg(const EdPoint& p) {
  return {FeNeg(p.X), p.Y, p.Z, FeNeg(p.T)};
}

// Signed radix-16 digits in [-8, 8] of a scalar below 2^255.
inline std::array<int8_t, 64> RecodeRadix16(const uint8_t s[32]) {
  std::array<int8_t, 64> e;
  for (int i = 0; i < 32; ++i) {
    e[2 * i] = s[i] & 15;
    e[2 * i + 1] = (s[i] >> 4) & 15;
  }
  int carry = 0;
  for (int i = 0; i < 63; ++i) {
    e[i] = static_cast<int8_t>(e[i] + carry);
    carry = (e[i] + 8) >> 4;
    e[i] = static_cast<int8_t>(e[i] - (carry << 4));
  }
  e[63] = static_cast<int8_t>(e[63] + carry);
  return e;
}

inline EdPoint EdScalarMul(const EdPoint& p, const uint8_t s[32]) {
  EdCached table[8];
  EdPoint acc = p;
  table[0] = EdToCached(p);
  for (int j = 1; j < 8; ++j) {
    acc = EdAdd(acc, table[0]);
    table[j] = EdToCached(acc);
  }
  auto e = RecodeRadix16(s);
  // Short exponents (share indices, Lagrange numerators) skip the leading
  // zero digits.
  int top = 63;
  while (top >= 0 && e[top] == 0) --top;
  EdPoint q = EdIdentity();
  for (int i = top; i >= 0; --i) {
    if (i != top) q = EdDouble(EdDouble(EdDouble(EdDouble(q))));
    int d = e[i];
    if (d > 0) q = EdAdd(q, table[d - 1]);
    if (d < 0) q = EdSub(q, table[-d - 1]);
  }
  return q;
}

// Table of j * 16^i * P for i < 64, 1 <= j <= 8; an exponentiation becomes
// 64 additions and no doublings.
class EdFixedBase {
 public:
  explicit EdFixedBase(const EdPoint& p) {
    EdPoint base = p;
    for (int i = 0; i < 64; ++i) {
      EdPoint acc = base;
      rows_[i][0] = EdToCached(base);
      for (int j = 1; j < 8; ++j) {
        acc = EdAdd(acc, rows_[i][0]);
        rows_[i][j] = EdToCached(acc);
      }
      base = EdDouble(EdDouble(EdDouble(EdDouble(base))));
    }
  }

  EdPoint Mul(const uint8_t s[32]) const {
    auto e = RecodeRadix16(s);
    EdPoint q = EdIdentity();
    for (int i = 0; i < 64; ++i) {
      int d = e[i];
      if (d > 0) q = EdAdd(q, rows_[i][d - 1]);
      if (d < 0) q = EdSub(q, rows_[i][-d - 1]);
    }
    return q;
  }

 private:
  EdCached rows_[64][8];
};

// Ristretto equality: x1*y2 == y1*x2 or y1*y2 == x1*x2.
inline bool RistrettoEqual(const EdPoint& a, const EdPoint& b) {
  return FeEqual(FeMul(a.X, b.Y), FeMul(a.Y, b.X)) ||
         FeEqual(FeMul(a.Y, b.Y), FeMul(a.X, b.X));
}

inline void RistrettoEncode(uint8_t out[32], const EdPoint& p) {
  Fe u1 = FeMul(FeAdd(p.Z, p.Y), FeSub(p.Z, p.Y));
  Fe u2 = FeMul(p.X, p.Y);
  Fe invsqrt;
  FeSqrtRatioM1(kFeOne, FeMul(u1, FeSq(u2)), &invsqrt);
  Fe den1 = FeMul(invsqrt, u1);
  Fe den2 = FeMul(invsqrt, u2);
  Fe z_inv = FeMul(FeMul(den1, den2), p.T);
  Fe x = p.X, y = p.Y, den_inv = den2;
  if (FeIsNegative(FeMul(p.T, z_inv))) {
    x = FeMul(p.Y, kFeSqrtM1);
    y = FeMul(p.X, kFeSqrtM1);
    den_inv = FeMul(den1, kFeInvSqrtAMinusD);
  }
  if (FeIsNegative(FeMul(x, z_inv))) y = FeNeg(y);
  Fe s = FeAbs(FeMul(den_inv, FeSub(p.Z, y)));
  FeToBytes(out, s);
}

// Accepts only canonical encodings.
inline bool RistrettoDecode(const uint8_t in[32], EdPoint* out) {
  Fe s = FeFromBytes(in);
  uint8_t check[32];
  FeToBytes(check, s);
  if (std::memcmp(check, in, 32) != 0) return false;
  if (check[0] & 1) return false;
  Fe ss = FeSq(s);
  Fe u1 = FeSub(kFeOne, ss);
  Fe u2 = FeAdd(kFeOne, ss);
  Fe u2_sq = FeSq(u2);
  Fe v = FeSub(FeNeg(FeMul(kFeD, FeSq(u1))), u2_sq);
  Fe invsqrt;
  bool was_square = FeSqrtRatioM1(kFeOne, FeMul(v, u2_sq), &invsqrt);
  Fe den_x = FeMul(invsqrt, u2);
  Fe den_y = FeMul(FeMul(invsqrt, den_x), v);
  Fe x = FeAbs(FeMul(FeAdd(s, s), den_x));
  Fe y = FeMul(u1, den_y);
  Fe t = FeMul(x, y);
  if (!was_square || FeIsNegative(t) || FeIsZero(y)) return false;
  *out = {x, y, kFeOne, t};
  return true;
}

}  // namespace shufflestack::internal

#endif  // SHUFFLESTACK_FIELD25519_H_
