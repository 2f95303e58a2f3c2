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

#ifndef SHUFFLESTACK_RNG_H_
#define SHUFFLESTACK_RNG_H_

#include <sodium.h>

#include <array>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string_view>
#include <vector>

#include "shufflestack/common.h"

namespace shufflestack {

inline void EnsureSodium() {
  static const bool ok = sodium_init() >= 0;
  if (!ok) throw std::runtime_error("libsodium initialization failed");
}

// Deterministic ChaCha20 keystream generator. All randomness in the library
// flows through instances of this class; nothing reads ambient entropy.
class Rng {
 public:
  using result_type = uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<uint64_t>::max();
  }

  explicit Rng(uint64_t seed) {
    EnsureSodium();
    uint8_t in[16] = {'s', 'h', 'u', 'f', 'f', 'l', 'e', '-'};
    for (int i = 0; i < 8; ++i) in[8 + i] = static_cast<uint8_t>(seed >> (8 * i));
    crypto_generichash(key_.data(), key_.size(), in, sizeof(in), nullptr, 0);
  }

  static Rng FromKey(const std::array<uint8_t, 32>& key) {
    Rng r(0);
    r.key_ = key;
    return r;
  }

  // Independent child stream; does not advance this generator.
  Rng Fork(std::string_view label) const {
    std::array<uint8_t, 32> k;
    crypto_generichash_state st;
    crypto_generichash_init(&st, key_.data(), key_.size(), k.size());
    crypto_generichash_update(
        &st, reinterpret_cast<const uint8_t*>(label.data()), label.size());
    crypto_generichash_final(&st, k.data(), k.size());
    return FromKey(k);
  }

  Rng Fork(std::string_view label, uint64_t index) const {
    std::string s(label);
    s.push_back('/');
    s += std::to_string(index);
    return Fork(s);
  }

  void Fill(uint8_t* out, size_t n) {
    while (n > 0) {
      if (pos_ == buf_.size()) Refill();
      size_t k = std::min(n, buf_.size() - pos_);
      std::memcpy(out, buf_.data() + pos_, k);
      pos_ += k;
      out += k;
      n -= k;
    }
  }

  uint64_t operator()() { return NextU64(); }

  uint64_t NextU64() {
    uint8_t b[8];
    Fill(b, 8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
    return v;
  }

  // Uniform integer in [0, bound) by rejection; bound must be positive.
  uint64_t UniformBelow(uint64_t bound) {
    if (bound <= 1) return 0;
    const uint64_t limit = max() - max() % bound;
    uint64_t v;
    do {
      v = NextU64();
    } while (v >= limit);
    return v % bound;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double Uniform01() { return static_cast<double>(NextU64() >> 11) * 0x1.0p-53; }

  bool Bernoulli(double p) { return Uniform01() < p; }

  template <class T>
  void Shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = UniformBelow(i);
      std::swap(v[i - 1], v[j]);
    }
  }

  // Uniformly random permutation of {0, ..., n-1}.
  std::vector<uint32_t> Permutation(size_t n) {
    std::vector<uint32_t> p(n);
    std::iota(p.begin(), p.end(), 0u);
    Shuffle(p);
    return p;
  }

 private:
  void Refill() {
    std::array<uint8_t, crypto_stream_chacha20_ietf_NONCEBYTES> nonce{};
    std::fill(buf_.begin(), buf_.end(), 0);
    crypto_stream_chacha20_ietf_xor_ic(buf_.data(), buf_.data(), buf_.size(),
                                       nonce.data(), block_, key_.data());
    block_ += static_cast<uint32_t>(buf_.size() / 64);
    pos_ = 0;
  }

  std::array<uint8_t, 32> key_{};
  std::array<uint8_t, 512> buf_{};
  size_t pos_ = 512;
  uint32_t block_ = 0;
};

}  // namespace shufflestack

#endif  // SHUFFLESTACK_RNG_H_
