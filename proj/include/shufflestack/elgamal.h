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

#ifndef SHUFFLESTACK_ELGAMAL_H_
#define SHUFFLESTACK_ELGAMAL_H_

#include <array>
#include <cstdint>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "shufflestack/common.h"
#include "shufflestack/rng.h"

namespace shufflestack {

template <class G>
using ScalarOf = typename G::Scalar;
template <class G>
using ElementOf = typename G::Element;

template <class G>
struct KeyPair {
  ScalarOf<G> sk;
  ElementOf<G> pk;
};

template <class G>
struct Ciphertext {
  ElementOf<G> c1;  // m * pk^r
  ElementOf<G> c2;  // g^r
  friend bool operator==(const Ciphertext& a, const Ciphertext& b) {
    return a.c1 == b.c1 && a.c2 == b.c2;
  }
  friend bool operator!=(const Ciphertext& a, const Ciphertext& b) {
    return !(a == b);
  }
};

// ---------------------------------------------------------------------------
// Canonical serialization. Elements and scalars are 32 bytes each; a
// ciphertext is c1 || c2.

template <class G>
std::array<uint8_t, 32> EncodeElement(const ElementOf<G>& e) {
  std::array<uint8_t, 32> out;
  G::Encode(e, out.data());
  return out;
}

template <class G>
void WriteElement(ByteWriter& w, const ElementOf<G>& e) {
  auto b = EncodeElement<G>(e);
  w.Raw(b.data(), b.size());
}

template <class G>
ElementOf<G> ReadElement(ByteReader& r) {
  ElementOf<G> e;
  if (!G::Decode(r.Raw(G::kElementBytes), &e)) {
    throw DecodeError("non-canonical group element");
  }
  return e;
}

template <class G>
void WriteScalar(ByteWriter& w, const ScalarOf<G>& s) {
  uint8_t b[32];
  G::SEncode(s, b);
  w.Raw(b, 32);
}

template <class G>
ScalarOf<G> ReadScalar(ByteReader& r) {
  ScalarOf<G> s;
  if (!G::SDecode(r.Raw(G::kScalarBytes), &s)) {
    throw DecodeError("non-canonical scalar");
  }
  return s;
}

template <class G>
void WriteCiphertext(ByteWriter& w, const Ciphertext<G>& ct) {
  WriteElement<G>(w, ct.c1);
  WriteElement<G>(w, ct.c2);
}

template <class G>
Ciphertext<G> ReadCiphertext(ByteReader& r) {
  Ciphertext<G> ct;
  ct.c1 = ReadElement<G>(r);
  ct.c2 = ReadElement<G>(r);
  return ct;
}

// ---------------------------------------------------------------------------
// ElGamal over G.

template <class G>
KeyPair<G> Keygen(Rng& rng) {
  KeyPair<G> kp;
  kp.sk = G::SRandom(rng);
  kp.pk = G::ExpG(kp.sk);
  return kp;
}

template <class G>
Ciphertext<G> EncryptWith(const ElementOf<G>& pk, const ElementOf<G>& m,
                          const ScalarOf<G>& r) {
  return {m * G::Exp(pk, r), G::ExpG(r)};
}

template <class G>
Ciphertext<G> Encrypt(const ElementOf<G>& pk, const ElementOf<G>& m, Rng& rng) {
  return EncryptWith<G>(pk, m, G::SRandom(rng));
}

template <class G>
ElementOf<G> Decrypt(const ScalarOf<G>& sk, const Ciphertext<G>& ct) {
  return ct.c1 / G::Exp(ct.c2, sk);
}

// (c1 * c2^a, c2): decrypts under sk + a to what ct decrypts to under sk.
template <class G>
Ciphertext<G> ShiftKey(const Ciphertext<G>& ct, const ScalarOf<G>& a) {
  return {ct.c1 * G::Exp(ct.c2, a), ct.c2};
}

// Multiplies ct by an encryption of the identity with randomness r.
template <class G>
Ciphertext<G> RerandomizeWith(const ElementOf<G>& pk, const Ciphertext<G>& ct,
                              const ScalarOf<G>& r) {
  return {ct.c1 * G::Exp(pk, r), ct.c2 * G::ExpG(r)};
}

template <class G>
Ciphertext<G> Rerandomize(const ElementOf<G>& pk, const Ciphertext<G>& ct,
                          Rng& rng) {
  return RerandomizeWith<G>(pk, ct, G::SRandom(rng));
}

// Re-randomizer bound to one public key, with a fixed-base table for pk.
// Produces exactly what RerandomizeWith does.
template <class G>
class Rerandomizer {
 public:
  explicit Rerandomizer(const ElementOf<G>& pk) : pk_table_(pk) {}
  Ciphertext<G> Apply(const Ciphertext<G>& ct, const ScalarOf<G>& r) const {
    return {ct.c1 * pk_table_.Exp(r), ct.c2 * G::ExpG(r)};
  }

 private:
  typename G::FixedBase pk_table_;
};

// ---------------------------------------------------------------------------
// Payload encoding.
//
// Payloads are fixed-width records of `capacity` bytes; shorter inputs are
// right-padded with zeros, so decoding returns the padded record.

enum class PayloadEncoding {
  // One element per record through the group's invertible embedding.
  kDirect,
  // One element g^v per kChunkBits-bit chunk v, recovered by
  // baby-step giant-step.
  kChunkedExponent,
};

template <class G>
class PayloadCodec {
 public:
  static PayloadEncoding DefaultEncoding() {
    return G::kHasEmbedding ? PayloadEncoding::kDirect
                            : PayloadEncoding::kChunkedExponent;
  }

  explicit PayloadCodec(size_t capacity = 16,
                        PayloadEncoding encoding = DefaultEncoding())
      : capacity_(capacity), encoding_(encoding) {
    if (encoding_ == PayloadEncoding::kDirect) {
      if (!G::kHasEmbedding) throw ConfigInvalid("group has no direct embedding");
      if (capacity_ > G::kEmbedCapacity) {
        throw ConfigInvalid("capacity exceeds the group's embedding capacity");
      }
    }
    if (capacity_ == 0) throw ConfigInvalid("payload capacity must be positive");
  }

  size_t capacity() const { return capacity_; }
  PayloadEncoding encoding() const { return encoding_; }

  size_t ElementsPerPayload() const {
    if (encoding_ == PayloadEncoding::kDirect) return 1;
    const size_t chunk_bytes = G::kChunkBits / 8;
    return (capacity_ + chunk_bytes - 1) / chunk_bytes;
  }

  std::vector<ElementOf<G>> Encode(const Bytes& payload) const {
    if (payload.size() > capacity_) {
      throw PayloadTooLarge("payload of " + std::to_string(payload.size()) +
                            " bytes exceeds capacity " +
                            std::to_string(capacity_));
    }
    Bytes rec = payload;
    rec.resize(capacity_, 0);
    std::vector<ElementOf<G>> out;
    if (encoding_ == PayloadEncoding::kDirect) {
      ElementOf<G> e;
      if (!G::Embed(rec.data(), rec.size(), &e)) {
        throw PayloadTooLarge("embedding failed");
      }
      out.push_back(e);
      return out;
    }
    const size_t chunk_bytes = G::kChunkBits / 8;
    for (size_t off = 0; off < capacity_; off += chunk_bytes) {
      uint64_t v = 0;
      for (size_t i = 0; i < chunk_bytes && off + i < capacity_; ++i) {
        v |= static_cast<uint64_t>(rec[off + i]) << (8 * i);
      }
      out.push_back(G::ExpG(G::SFromU64(v)));
    }
    return out;
  }

  Bytes Decode(const std::vector<ElementOf<G>>& elems) const {
    if (elems.size() != ElementsPerPayload()) {
      throw DecodeError("wrong number of payload elements");
    }
    Bytes rec;
    if (encoding_ == PayloadEncoding::kDirect) {
      uint8_t buf[G::kEmbedCapacity > 0 ? G::kEmbedCapacity : 1];
      if (!G::Extract(elems[0], buf)) throw DecodeError("not an embedded payload");
      rec.assign(buf, buf + capacity_);
      for (size_t i = capacity_; i < G::kEmbedCapacity; ++i) {
        if (buf[i] != 0) throw DecodeError("payload exceeds capacity");
      }
      return rec;
    }
    const size_t chunk_bytes = G::kChunkBits / 8;
    for (const auto& e : elems) {
      uint64_t v = DiscreteLogChunk(e);
      for (size_t i = 0; i < chunk_bytes; ++i) {
        rec.push_back(static_cast<uint8_t>(v >> (8 * i)));
      }
    }
    for (size_t i = capacity_; i < rec.size(); ++i) {
      if (rec[i] != 0) throw DecodeError("payload exceeds capacity");
    }
    rec.resize(capacity_);
    return rec;
  }

  // Solves g^v = e for v < 2^kChunkBits.
  static uint64_t DiscreteLogChunk(const ElementOf<G>& e) {
    const auto& t = Tables();
    ElementOf<G> cur = e;
    for (uint64_t i = 0; i < t.giant_steps; ++i) {
      auto enc = EncodeElement<G>(cur);
      auto it = t.baby.find(Key(enc));
      if (it != t.baby.end()) {
        uint64_t v = i * t.baby_steps + it->second;
        if (G::ExpG(G::SFromU64(v)) == e) return v;
      }
      cur = cur * t.giant_stride_inv;
    }
    throw DecodeError("chunk outside the encodable range");
  }

 private:
  struct BsgsTables {
    uint64_t baby_steps;
    uint64_t giant_steps;
    std::unordered_map<uint64_t, uint32_t> baby;
    ElementOf<G> giant_stride_inv;
  };

  static uint64_t Key(const std::array<uint8_t, 32>& enc) {
    uint64_t k = 0;
    for (int i = 0; i < 8; ++i) k |= static_cast<uint64_t>(enc[i]) << (8 * i);
    return k;
  }

  static const BsgsTables& Tables() {
    static const BsgsTables* tables = [] {
      auto* t = new BsgsTables;
      t->baby_steps = uint64_t{1} << ((G::kChunkBits + 1) / 2);
      t->giant_steps = (uint64_t{1} << G::kChunkBits) / t->baby_steps;
      t->baby.reserve(t->baby_steps * 2);
      ElementOf<G> cur = G::Identity();
      for (uint64_t j = 0; j < t->baby_steps; ++j) {
        t->baby.emplace(Key(EncodeElement<G>(cur)), static_cast<uint32_t>(j));
        cur = cur * G::Generator();
      }
      t->giant_stride_inv = G::Inverse(cur);
      return t;
    }();
    return *tables;
  }

  size_t capacity_;
  PayloadEncoding encoding_;
};

}  // namespace shufflestack

#endif  // SHUFFLESTACK_ELGAMAL_H_
