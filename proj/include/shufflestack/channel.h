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

#ifndef SHUFFLESTACK_CHANNEL_H_
#define SHUFFLESTACK_CHANNEL_H_

#include <sodium.h>

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>

#include "shufflestack/common.h"
#include "shufflestack/elgamal.h"
#include "shufflestack/rng.h"

namespace shufflestack {

// Pairwise channels between clients, relayed by the server. The key of the
// pair (a, b) is derived from the Diffie-Hellman point of their long-term
// keys. Encryption is deterministic (the nonce is a hash of sender, receiver
// and round), so the server can later check a disputed ciphertext once
// either endpoint reveals the DH point.

using ChannelKey = std::array<uint8_t, 32>;

inline constexpr size_t kSealedScalarBytes =
    32 + crypto_aead_chacha20poly1305_ietf_ABYTES;

template <class G>
ChannelKey DeriveChannelKey(const ElementOf<G>& dh_point, PartyId a, PartyId b) {
  EnsureSodium();
  static constexpr char kKey[] = "shufflestack/channel";
  ByteWriter w;
  WriteElement<G>(w, dh_point);
  w.U32(std::min(a, b));
  w.U32(std::max(a, b));
  ChannelKey k;
  crypto_generichash(k.data(), k.size(), w.bytes().data(), w.size(),
                     reinterpret_cast<const uint8_t*>(kKey), sizeof(kKey) - 1);
  return k;
}

namespace internal {

inline std::array<uint8_t, crypto_aead_chacha20poly1305_ietf_NPUBBYTES> ChannelNonce(
    PartyId sender, PartyId receiver, uint32_t round) {
  ByteWriter w;
  w.U32(sender);
  w.U32(receiver);
  w.U32(round);
  uint8_t h[32];
  crypto_generichash(h, sizeof(h), w.bytes().data(), w.size(), nullptr, 0);
  std::array<uint8_t, crypto_aead_chacha20poly1305_ietf_NPUBBYTES> n;
  std::copy(h, h + n.size(), n.begin());
  return n;
}

}  // namespace internal

template <class G>
Bytes SealScalar(const ChannelKey& key, PartyId sender, PartyId receiver,
                 uint32_t round, const ScalarOf<G>& s) {
  uint8_t pt[32];
  G::SEncode(s, pt);
  auto nonce = internal::ChannelNonce(sender, receiver, round);
  Bytes ct(kSealedScalarBytes);
  unsigned long long len = 0;
  crypto_aead_chacha20poly1305_ietf_encrypt(ct.data(), &len, pt, sizeof(pt),
                                            nullptr, 0, nullptr, nonce.data(),
                                            key.data());
  return ct;
}

template <class G>
std::optional<ScalarOf<G>> OpenScalar(const ChannelKey& key, PartyId sender,
                                      PartyId receiver, uint32_t round,
                                      const uint8_t* ct, size_t len) {
  if (len != kSealedScalarBytes) return std::nullopt;
  auto nonce = internal::ChannelNonce(sender, receiver, round);
  uint8_t pt[32];
  unsigned long long pt_len = 0;
  if (crypto_aead_chacha20poly1305_ietf_decrypt(pt, &pt_len, nullptr, ct, len,
                                                nullptr, 0, nonce.data(),
                                                key.data()) != 0) {
    return std::nullopt;
  }
  ScalarOf<G> s;
  if (!G::SDecode(pt, &s)) return std::nullopt;
  return s;
}

}  // namespace shufflestack

#endif  // SHUFFLESTACK_CHANNEL_H_
