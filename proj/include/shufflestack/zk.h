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

#ifndef SHUFFLESTACK_ZK_H_
#define SHUFFLESTACK_ZK_H_

#include <sodium.h>

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "shufflestack/common.h"
#include "shufflestack/elgamal.h"
#include "shufflestack/rng.h"

namespace shufflestack {

// ---------------------------------------------------------------------------
// Fiat-Shamir transcripts.
//
// A transcript is the concatenation of length-prefixed fields in message
// order: u32 little-endian length, then the canonical bytes. The first field
// is a domain label naming the proof type.

class Transcript {
 public:
  explicit Transcript(std::string_view domain) {
    AppendBytes(reinterpret_cast<const uint8_t*>(domain.data()), domain.size());
  }
  void AppendBytes(const uint8_t* p, size_t n) {
    w_.U32(static_cast<uint32_t>(n));
    w_.Raw(p, n);
  }
  void AppendBytes(const Bytes& b) { AppendBytes(b.data(), b.size()); }
  void AppendU64(uint64_t v) {
    uint8_t b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<uint8_t>(v >> (8 * i));
    AppendBytes(b, 8);
  }
  template <class G>
  void AppendElement(const ElementOf<G>& e) {
    auto b = EncodeElement<G>(e);
    AppendBytes(b.data(), b.size());
  }
  template <class G>
  void AppendScalar(const ScalarOf<G>& s) {
    uint8_t b[32];
    G::SEncode(s, b);
    AppendBytes(b, 32);
  }
  template <class G>
  void AppendElements(const std::vector<ElementOf<G>>& es) {
    AppendU64(es.size());
    for (const auto& e : es) AppendElement<G>(e);
  }
  template <class G>
  void AppendCiphertexts(const std::vector<Ciphertext<G>>& cts) {
    AppendU64(cts.size());
    for (const auto& ct : cts) {
      AppendElement<G>(ct.c1);
      AppendElement<G>(ct.c2);
    }
  }
  const Bytes& bytes() const { return w_.bytes(); }

 private:
  ByteWriter w_;
};

namespace internal {

inline void HashWide(const Bytes& data, uint64_t counter, uint8_t out[64]) {
  EnsureSodium();
  static constexpr char kKey[] = "shufflestack/fiat-shamir";
  crypto_generichash_state st;
  crypto_generichash_init(&st, reinterpret_cast<const uint8_t*>(kKey),
                          sizeof(kKey) - 1, 64);
  uint8_t c[8];
  for (int i = 0; i < 8; ++i) c[i] = static_cast<uint8_t>(counter >> (8 * i));
  crypto_generichash_update(&st, c, 8);
  crypto_generichash_update(&st, data.data(), data.size());
  crypto_generichash_final(&st, out, 64);
}

}  // namespace internal

// Challenge scalar: keyed BLAKE2b-512 of the transcript, reduced mod the
// group order.
template <class G>
ScalarOf<G> FiatShamirChallenge(const Bytes& transcript) {
  uint8_t wide[64];
  internal::HashWide(transcript, 0, wide);
  return G::SFromWide(wide);
}

// `count` challenge bits, 512 per hash block.
inline std::vector<bool> FiatShamirBits(const Bytes& transcript, size_t count) {
  std::vector<bool> bits;
  bits.reserve(count);
  uint8_t block[64];
  for (uint64_t ctr = 1; bits.size() < count; ++ctr) {
    internal::HashWide(transcript, ctr, block);
    for (int i = 0; i < 512 && bits.size() < count; ++i) {
      bits.push_back((block[i / 8] >> (i % 8)) & 1);
    }
  }
  return bits;
}

// ---------------------------------------------------------------------------
// Batched proof of correct partial decryption: given g^x and bases h_i, the
// prover shows v_i = h_i^x for every i with one Schnorr-style argument.

enum class ChallengeMode {
  kFiatShamir,   // u = hash of the transcript; one message
  kInteractive,  // u drawn by the verifier after the commitments
};

template <class G>
struct PartialDecProof {
  ElementOf<G> A;                // g^r
  std::vector<ElementOf<G>> Bs;  // h_i^r
  ScalarOf<G> e;                 // r + u * x
  ScalarOf<G> u;                 // challenge
};

// Two-move prover. Commit happens in the constructor; Respond answers one
// challenge.
template <class G>
class PartialDecProver {
 public:
  PartialDecProver(const ScalarOf<G>& x, const std::vector<ElementOf<G>>& hs,
                   Rng& rng)
      : x_(x), r_(G::SRandom(rng)) {
    if (hs.empty()) throw PreconditionViolated("empty decryption batch");
    vs_.reserve(hs.size());
    Bs_.reserve(hs.size());
    for (const auto& h : hs) vs_.push_back(G::Exp(h, x_));
    A_ = G::ExpG(r_);
    for (const auto& h : hs) Bs_.push_back(G::Exp(h, r_));
  }

  const std::vector<ElementOf<G>>& vs() const { return vs_; }
  const ElementOf<G>& A() const { return A_; }
  const std::vector<ElementOf<G>>& Bs() const { return Bs_; }

  PartialDecProof<G> Respond(const ScalarOf<G>& u) const {
    return {A_, Bs_, r_ + u * x_, u};
  }

 private:
  ScalarOf<G> x_;
  ScalarOf<G> r_;
  std::vector<ElementOf<G>> vs_;
  ElementOf<G> A_;
  std::vector<ElementOf<G>> Bs_;
};

template <class G>
ScalarOf<G> PartialDecChallenge(const Bytes& context,
                                const ElementOf<G>& share_comm,
                                const std::vector<ElementOf<G>>& hs,
                                const std::vector<ElementOf<G>>& vs,
                                const ElementOf<G>& A,
                                const std::vector<ElementOf<G>>& Bs) {
  Transcript tr("shufflestack/partial-decryption/v1");
  tr.AppendBytes(context);
  tr.AppendElement<G>(share_comm);
  tr.AppendElements<G>(hs);
  tr.AppendElements<G>(vs);
  tr.AppendElement<G>(A);
  tr.AppendElements<G>(Bs);
  return FiatShamirChallenge<G>(tr.bytes());
}

// Non-interactive proof. Costs 2k + 1 exponentiations for k bases.
template <class G>
std::pair<std::vector<ElementOf<G>>, PartialDecProof<G>> ProvePartialDec(
    const ScalarOf<G>& x, const ElementOf<G>& share_comm,
    const std::vector<ElementOf<G>>& hs, Rng& rng, const Bytes& context = {}) {
  PartialDecProver<G> prover(x, hs, rng);
  auto u = PartialDecChallenge<G>(context, share_comm, hs, prover.vs(),
                                  prover.A(), prover.Bs());
  return {prover.vs(), prover.Respond(u)};
}

// Checks A * share_comm^u = g^e and B_i * v_i^u = h_i^e for every i, with
// whatever challenge the proof carries.
template <class G>
bool VerifyPartialDec(const ElementOf<G>& share_comm,
                      const std::vector<ElementOf<G>>& hs,
                      const std::vector<ElementOf<G>>& vs,
                      const PartialDecProof<G>& proof) {
  if (hs.empty() || vs.size() != hs.size() || proof.Bs.size() != hs.size()) {
    return false;
  }
  if (!(proof.A * G::Exp(share_comm, proof.u) == G::ExpG(proof.e))) return false;
  for (size_t i = 0; i < hs.size(); ++i) {
    if (!(proof.Bs[i] * G::Exp(vs[i], proof.u) == G::Exp(hs[i], proof.e))) {
      return false;
    }
  }
  return true;
}

// As VerifyPartialDec, and additionally requires u to be the transcript hash.
template <class G>
bool VerifyPartialDecFiatShamir(const ElementOf<G>& share_comm,
                                const std::vector<ElementOf<G>>& hs,
                                const std::vector<ElementOf<G>>& vs,
                                const PartialDecProof<G>& proof,
                                const Bytes& context = {}) {
  if (proof.Bs.size() != hs.size()) return false;
  auto u = PartialDecChallenge<G>(context, share_comm, hs, vs, proof.A, proof.Bs);
  if (!(u == proof.u)) return false;
  return VerifyPartialDec<G>(share_comm, hs, vs, proof);
}

// Compact wire form of a Fiat-Shamir proof: (e, u) only, 64 bytes. The
// verifier rebuilds A = g^e / share_comm^u and B_i = h_i^e / v_i^u; the proof
// is valid iff hashing the rebuilt transcript returns u.
template <class G>
void WritePartialDecCompact(ByteWriter& w, const PartialDecProof<G>& proof) {
  WriteScalar<G>(w, proof.e);
  WriteScalar<G>(w, proof.u);
}

template <class G>
bool VerifyPartialDecCompact(const ElementOf<G>& share_comm,
                             const std::vector<ElementOf<G>>& hs,
                             const std::vector<ElementOf<G>>& vs,
                             const ScalarOf<G>& e, const ScalarOf<G>& u,
                             const Bytes& context = {}) {
  if (hs.empty() || vs.size() != hs.size()) return false;
  ElementOf<G> A = G::ExpG(e) / G::Exp(share_comm, u);
  std::vector<ElementOf<G>> Bs;
  Bs.reserve(hs.size());
  for (size_t i = 0; i < hs.size(); ++i) {
    Bs.push_back(G::Exp(hs[i], e) / G::Exp(vs[i], u));
  }
  return PartialDecChallenge<G>(context, share_comm, hs, vs, A, Bs) == u;
}

// ---------------------------------------------------------------------------
// Verifiable shuffle by cut-and-choose.
//
// A shuffle acts on n items, each a fixed-width tuple of `width` ciphertexts
// stored contiguously, so multi-element payloads move together. With
// permutation perm and randomizers rerand (one per ciphertext):
//   out[j*width + c] = Rerandomize(in[perm[j]*width + c], rerand[j*width + c]).
//
// The prover publishes sigma_rep intermediate shuffles of the input. The
// challenge bit of each repetition selects which leg is opened:
// input -> intermediate (bit 0) or intermediate -> output (bit 1). A prover
// whose output is not a shuffle of the input survives each repetition with
// probability at most 1/2.

template <class G>
struct ShuffleRep {
  std::vector<Ciphertext<G>> intermediate;
  bool leg = false;            // the opened leg, as derived from the challenge
  std::vector<uint32_t> perm;  // opening permutation
  std::vector<ScalarOf<G>> rerand;
};

template <class G>
struct ShuffleProof {
  std::vector<ShuffleRep<G>> reps;
};

template <class G>
struct ShuffleResult {
  std::vector<Ciphertext<G>> output;
  ShuffleProof<G> proof;
};

inline bool IsPermutation(const std::vector<uint32_t>& perm) {
  std::vector<bool> seen(perm.size(), false);
  for (uint32_t p : perm) {
    if (p >= perm.size() || seen[p]) return false;
    seen[p] = true;
  }
  return true;
}

inline std::vector<uint32_t> InversePermutation(const std::vector<uint32_t>& perm) {
  std::vector<uint32_t> inv(perm.size());
  for (uint32_t j = 0; j < perm.size(); ++j) inv[perm[j]] = j;
  return inv;
}

template <class G>
std::vector<Ciphertext<G>> ApplyShuffle(const Rerandomizer<G>& rr,
                                        const std::vector<Ciphertext<G>>& in,
                                        size_t width,
                                        const std::vector<uint32_t>& perm,
                                        const std::vector<ScalarOf<G>>& rerand) {
  if (width == 0 || perm.size() * width != in.size() || rerand.size() != in.size()) {
    throw LengthMismatch("shuffle needs |input| = width * |perm| = |rerand|");
  }
  if (!IsPermutation(perm)) throw PreconditionViolated("not a permutation");
  std::vector<Ciphertext<G>> out;
  out.reserve(in.size());
  for (size_t j = 0; j < perm.size(); ++j) {
    for (size_t c = 0; c < width; ++c) {
      out.push_back(rr.Apply(in[perm[j] * width + c], rerand[j * width + c]));
    }
  }
  return out;
}

template <class G>
std::vector<bool> ShuffleChallengeBits(const Bytes& context,
                                       const ElementOf<G>& pk, size_t width,
                                       const std::vector<Ciphertext<G>>& input,
                                       const std::vector<Ciphertext<G>>& output,
                                       const std::vector<ShuffleRep<G>>& reps) {
  Transcript tr("shufflestack/shuffle/cut-and-choose/v1");
  tr.AppendBytes(context);
  tr.AppendElement<G>(pk);
  tr.AppendU64(width);
  tr.AppendCiphertexts<G>(input);
  tr.AppendCiphertexts<G>(output);
  tr.AppendU64(reps.size());
  for (const auto& rep : reps) tr.AppendCiphertexts<G>(rep.intermediate);
  return FiatShamirBits(tr.bytes(), reps.size());
}

// Opening of the intermediate -> output leg. The intermediate I holds
// in[phi[i]] rerandomized by rho, and out[j] holds in[perm[j]] rerandomized
// by rerand, so out[j] is I[psi[j]] rerandomized by tau with
// psi = phi^{-1} o perm and tau = rerand - rho o psi.
template <class G>
void OpenOutputLeg(const std::vector<uint32_t>& phi,
                   const std::vector<ScalarOf<G>>& rho,
                   const std::vector<uint32_t>& perm,
                   const std::vector<ScalarOf<G>>& rerand, size_t width,
                   std::vector<uint32_t>* psi, std::vector<ScalarOf<G>>* tau) {
  auto phi_inv = InversePermutation(phi);
  psi->resize(perm.size());
  tau->resize(rerand.size());
  for (size_t j = 0; j < perm.size(); ++j) {
    (*psi)[j] = phi_inv[perm[j]];
    for (size_t c = 0; c < width; ++c) {
      (*tau)[j * width + c] = rerand[j * width + c] - rho[(*psi)[j] * width + c];
    }
  }
}

template <class G>
ShuffleResult<G> ShuffleProve(const ElementOf<G>& pk,
                              const std::vector<Ciphertext<G>>& input,
                              size_t width, const std::vector<uint32_t>& perm,
                              const std::vector<ScalarOf<G>>& rerand,
                              int sigma_rep, Rng& rng,
                              const Bytes& context = {}) {
  if (sigma_rep < 1) throw ConfigInvalid("sigma_rep must be positive");
  Rerandomizer<G> rr(pk);
  ShuffleResult<G> res;
  res.output = ApplyShuffle<G>(rr, input, width, perm, rerand);
  const size_t items = perm.size();
  // Intermediate I = shuffle(input; phi, rho) per repetition.
  std::vector<std::vector<uint32_t>> phis(sigma_rep);
  std::vector<std::vector<ScalarOf<G>>> rhos(sigma_rep);
  res.proof.reps.resize(sigma_rep);
  for (int k = 0; k < sigma_rep; ++k) {
    phis[k] = rng.Permutation(items);
    rhos[k].reserve(input.size());
    for (size_t i = 0; i < input.size(); ++i) rhos[k].push_back(G::SRandom(rng));
    res.proof.reps[k].intermediate = ApplyShuffle<G>(rr, input, width, phis[k], rhos[k]);
  }
  auto bits = ShuffleChallengeBits<G>(context, pk, width, input, res.output,
                                      res.proof.reps);
  for (int k = 0; k < sigma_rep; ++k) {
    auto& rep = res.proof.reps[k];
    rep.leg = bits[k];
    if (!rep.leg) {
      rep.perm = std::move(phis[k]);
      rep.rerand = std::move(rhos[k]);
      continue;
    }
    OpenOutputLeg<G>(phis[k], rhos[k], perm, rerand, width, &rep.perm,
                     &rep.rerand);
  }
  return res;
}

// Rejects unless the proof has exactly sigma_rep repetitions and every
// opened leg recomputes.
template <class G>
bool ShuffleVerify(const ElementOf<G>& pk, const std::vector<Ciphertext<G>>& input,
                   const std::vector<Ciphertext<G>>& output, size_t width,
                   const ShuffleProof<G>& proof, int sigma_rep,
                   const Bytes& context = {}) {
  if (width == 0 || input.size() % width != 0 || output.size() != input.size()) {
    return false;
  }
  if (static_cast<int>(proof.reps.size()) != sigma_rep || sigma_rep < 1) {
    return false;
  }
  const size_t items = input.size() / width;
  for (const auto& rep : proof.reps) {
    if (rep.intermediate.size() != input.size() || rep.perm.size() != items ||
        rep.rerand.size() != input.size() || !IsPermutation(rep.perm)) {
      return false;
    }
  }
  auto bits = ShuffleChallengeBits<G>(context, pk, width, input, output, proof.reps);
  Rerandomizer<G> rr(pk);
  for (size_t k = 0; k < proof.reps.size(); ++k) {
    const auto& rep = proof.reps[k];
    const auto& from = bits[k] ? rep.intermediate : input;
    const auto& to = bits[k] ? output : rep.intermediate;
    if (ApplyShuffle<G>(rr, from, width, rep.perm, rep.rerand) != to) return false;
  }
  return true;
}

// Wire form: u32 rep count, then per repetition the intermediate
// ciphertexts, the permutation (u32 each) and the randomizers. The opened
// leg is not sent; the verifier rederives it.
template <class G>
void WriteShuffleProof(ByteWriter& w, const ShuffleProof<G>& proof) {
  w.U32(static_cast<uint32_t>(proof.reps.size()));
  for (const auto& rep : proof.reps) {
    for (const auto& ct : rep.intermediate) WriteCiphertext<G>(w, ct);
    for (uint32_t p : rep.perm) w.U32(p);
    for (const auto& s : rep.rerand) WriteScalar<G>(w, s);
  }
}

template <class G>
ShuffleProof<G> ReadShuffleProof(ByteReader& r, size_t n_cts, size_t width) {
  if (width == 0 || n_cts % width != 0) throw DecodeError("bad shuffle shape");
  ShuffleProof<G> proof;
  uint32_t reps = r.U32();
  // Every repetition occupies at least one byte per ciphertext; reject
  // absurd counts before allocating.
  if (reps > r.remaining()) throw DecodeError("truncated shuffle proof");
  proof.reps.resize(reps);
  for (auto& rep : proof.reps) {
    rep.intermediate.reserve(n_cts);
    for (size_t i = 0; i < n_cts; ++i) rep.intermediate.push_back(ReadCiphertext<G>(r));
    for (size_t j = 0; j < n_cts / width; ++j) rep.perm.push_back(r.U32());
    rep.rerand.reserve(n_cts);
    for (size_t i = 0; i < n_cts; ++i) rep.rerand.push_back(ReadScalar<G>(r));
  }
  return proof;
}

// Bytes of WriteShuffleProof for n_cts ciphertexts in tuples of `width`.
inline uint64_t ShuffleProofBytes(uint64_t n_cts, uint64_t width, uint64_t sigma_rep) {
  return 4 + sigma_rep * (n_cts * 64 + (n_cts / width) * 4 + n_cts * 32);
}

}  // namespace shufflestack

#endif  // SHUFFLESTACK_ZK_H_
