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

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "gtest/gtest.h"
#include "shufflestack/ristretto255.h"
#include "shufflestack/tiny_group.h"
#include "shufflestack/zk.h"

namespace shufflestack {
namespace {

using R = Ristretto255;
using T = TinyGroup;

template <class G>
std::string ScalarHex(const ScalarOf<G>& s) {
  uint8_t b[32];
  G::SEncode(s, b);
  return ToHex(b, 32);
}

// ---------------------------------------------------------------------------
// Fiat-Shamir.

TEST(FiatShamirTest, EmptyTranscriptMatchesIndependentHash) {
  // Keyed BLAKE2b-512 of an all-zero counter, computed with Python hashlib.
  EXPECT_EQ(ScalarHex<R>(FiatShamirChallenge<R>({})),
            "2e2ab109b566c25f39e04025d859b9266eaebcfd0d9c067f8cd6afb6b11f830c");
  EXPECT_EQ(FiatShamirChallenge<T>({}).v, 102342674u);
  auto bits = FiatShamirBits(Bytes{'a', 'b', 'c'}, 10);
  std::string s;
  for (bool b : bits) s.push_back(b ? '1' : '0');
  EXPECT_EQ(s, "1000001110");
}

TEST(FiatShamirTest, DeterministicAndSensitiveToEveryByte) {
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    Bytes a(1 + rng.UniformBelow(200));
    rng.Fill(a.data(), a.size());
    EXPECT_TRUE(FiatShamirChallenge<R>(a) == FiatShamirChallenge<R>(a));
    Bytes b = a;
    b[rng.UniformBelow(b.size())] ^= static_cast<uint8_t>(1 + rng.UniformBelow(255));
    EXPECT_FALSE(FiatShamirChallenge<R>(a) == FiatShamirChallenge<R>(b));
  }
}

TEST(FiatShamirTest, TranscriptFieldsAreLengthPrefixed) {
  Transcript a("d"), b("d");
  a.AppendBytes(Bytes{1, 2});
  a.AppendBytes(Bytes{3});
  b.AppendBytes(Bytes{1});
  b.AppendBytes(Bytes{2, 3});
  EXPECT_NE(a.bytes(), b.bytes());
  EXPECT_EQ(ToHex(a.bytes()), "0100000064" "020000000102" "0100000003");
}

// ---------------------------------------------------------------------------
// Partial decryption proofs.

template <class G>
class PartialDecTest : public ::testing::Test {};
using Groups = ::testing::Types<Ristretto255, TinyGroup>;
TYPED_TEST_SUITE(PartialDecTest, Groups);

template <class G>
std::vector<ElementOf<G>> RandomBases(Rng& rng, size_t k) {
  std::vector<ElementOf<G>> hs;
  for (size_t i = 0; i < k; ++i) hs.push_back(G::ExpG(G::SRandom(rng)));
  return hs;
}

TYPED_TEST(PartialDecTest, HonestProofsVerifyInEveryForm) {
  using G = TypeParam;
  Rng rng(2);
  for (size_t k : {1u, 5u}) {
    auto x = G::SRandom(rng);
    auto comm = G::ExpG(x);
    auto hs = RandomBases<G>(rng, k);
    auto [vs, proof] = ProvePartialDec<G>(x, comm, hs, rng, Bytes{7});
    ASSERT_EQ(vs.size(), k);
    for (size_t i = 0; i < k; ++i) EXPECT_EQ(vs[i], G::Exp(hs[i], x));
    EXPECT_TRUE(VerifyPartialDec<G>(comm, hs, vs, proof));
    EXPECT_TRUE(VerifyPartialDecFiatShamir<G>(comm, hs, vs, proof, Bytes{7}));
    EXPECT_FALSE(VerifyPartialDecFiatShamir<G>(comm, hs, vs, proof, Bytes{8}));
    EXPECT_TRUE(VerifyPartialDecCompact<G>(comm, hs, vs, proof.e, proof.u, Bytes{7}));

    // Interactive: the verifier's challenge arrives after the commitments.
    PartialDecProver<G> prover(x, hs, rng);
    auto reply = prover.Respond(G::SRandom(rng));
    EXPECT_TRUE(VerifyPartialDec<G>(comm, hs, prover.vs(), reply));
  }
}

TYPED_TEST(PartialDecTest, ProverCostsTwoKPlusOneExponentiations) {
  using G = TypeParam;
  Rng rng(3);
  auto x = G::SRandom(rng);
  auto hs = RandomBases<G>(rng, 6);
  ExpCounter counter;
  {
    CountingScope scope(&counter);
    ProvePartialDec<G>(x, G::ExpG(x), hs, rng);
  }
  EXPECT_EQ(counter.exps, 2u * 6 + 1 + 1);  // + the g^x passed in
}

TYPED_TEST(PartialDecTest, TamperingIsRejected) {
  using G = TypeParam;
  Rng rng(4);
  auto x = G::SRandom(rng);
  auto comm = G::ExpG(x);
  auto hs = RandomBases<G>(rng, 5);
  auto [vs, proof] = ProvePartialDec<G>(x, comm, hs, rng);

  auto bad = proof;
  bad.e = bad.e + G::SOne();
  EXPECT_FALSE(VerifyPartialDec<G>(comm, hs, vs, bad));
  EXPECT_FALSE(VerifyPartialDecCompact<G>(comm, hs, vs, bad.e, bad.u));

  auto bad_vs = vs;
  bad_vs[2] = bad_vs[2] * G::Generator();
  EXPECT_FALSE(VerifyPartialDec<G>(comm, hs, bad_vs, proof));
  EXPECT_FALSE(VerifyPartialDecCompact<G>(comm, hs, bad_vs, proof.e, proof.u));

  auto bad_comm = comm * G::Generator();
  EXPECT_FALSE(VerifyPartialDec<G>(bad_comm, hs, vs, proof));
  EXPECT_FALSE(VerifyPartialDecCompact<G>(bad_comm, hs, vs, proof.e, proof.u));

  auto short_vs = vs;
  short_vs.pop_back();
  EXPECT_FALSE(VerifyPartialDec<G>(comm, hs, short_vs, proof));
  EXPECT_THROW(PartialDecProver<G>(x, {}, rng), PreconditionViolated);
}

TEST(PartialDecSoundnessTest, WrongShareSurvivesAtMostOneChallenge) {
  // With known discrete logs h = g^eta, A = g^a, B = h^b and a false
  // v = h^{x + delta}, the two checks force a - b = u * delta: exactly one
  // challenge out of q is answerable. Draw 10^4 uniform challenges against
  // the best response e = a + u x, and confirm the unique bad challenge.
  Rng rng(5);
  int accepted = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    auto x = T::SRandom(rng), eta = T::SRandom(rng);
    auto a = T::SRandom(rng), b = T::SRandom(rng);
    auto delta = T::SFromU64(1 + rng.UniformBelow(T::kOrder - 1));
    if (T::SIsZero(eta)) continue;
    auto comm = T::ExpG(x);
    std::vector<T::Element> hs = {T::ExpG(eta)};
    std::vector<T::Element> vs = {T::Exp(hs[0], x + delta)};
    PartialDecProof<T> proof{T::ExpG(a), {T::Exp(hs[0], b)}, {}, {}};
    proof.u = T::SRandom(rng);
    proof.e = a + proof.u * x;
    accepted += VerifyPartialDec<T>(comm, hs, vs, proof);
    if (trial < 100) {
      proof.u = (a - b) * T::SInv(delta);
      proof.e = a + proof.u * x;
      EXPECT_TRUE(VerifyPartialDec<T>(comm, hs, vs, proof));
      proof.u = proof.u + T::SOne();
      proof.e = a + proof.u * x;
      EXPECT_FALSE(VerifyPartialDec<T>(comm, hs, vs, proof));
    }
  }
  // Frequency bound 2/q over 10^4 trials admits zero acceptances.
  EXPECT_LE(accepted, static_cast<int>(2.0 * 10000 / T::kOrder));
}

TEST(PartialDecCompletenessTest, ThousandRandomInstances) {
  Rng rng(6);
  for (int i = 0; i < 1000; ++i) {
    auto x = R::SRandom(rng);
    auto comm = R::ExpG(x);
    auto hs = RandomBases<R>(rng, 1 + rng.UniformBelow(3));
    auto [vs, proof] = ProvePartialDec<R>(x, comm, hs, rng);
    ASSERT_TRUE(VerifyPartialDecCompact<R>(comm, hs, vs, proof.e, proof.u));
  }
}

// ---------------------------------------------------------------------------
// Shuffle proofs.

template <class G>
std::vector<Ciphertext<G>> EncryptAll(const ElementOf<G>& pk,
                                      const std::vector<ElementOf<G>>& ms, Rng& rng) {
  std::vector<Ciphertext<G>> out;
  for (const auto& m : ms) out.push_back(Encrypt<G>(pk, m, rng));
  return out;
}

template <class G>
std::vector<ScalarOf<G>> RandomScalars(Rng& rng, size_t n) {
  std::vector<ScalarOf<G>> out;
  for (size_t i = 0; i < n; ++i) out.push_back(G::SRandom(rng));
  return out;
}

template <class G>
class ShuffleTest : public ::testing::Test {};
TYPED_TEST_SUITE(ShuffleTest, Groups);

TYPED_TEST(ShuffleTest, IdentityShuffleReproducesInput) {
  using G = TypeParam;
  Rng rng(7);
  auto kp = Keygen<G>(rng);
  std::vector<ElementOf<G>> ms;
  for (int i = 0; i < 6; ++i) ms.push_back(G::ExpG(G::SFromU64(i + 1)));
  auto in = EncryptAll<G>(kp.pk, ms, rng);
  std::vector<uint32_t> id = {0, 1, 2, 3, 4, 5};
  std::vector<ScalarOf<G>> zero(6, G::SZero());
  auto res = ShuffleProve<G>(kp.pk, in, 1, id, zero, 8, rng);
  EXPECT_EQ(res.output, in);
  EXPECT_TRUE(ShuffleVerify<G>(kp.pk, in, res.output, 1, res.proof, 8));
}

TYPED_TEST(ShuffleTest, RandomShufflePreservesPlaintextMultiset) {
  using G = TypeParam;
  Rng rng(8);
  auto kp = Keygen<G>(rng);
  std::vector<ElementOf<G>> ms;
  for (int i = 0; i < 16; ++i) ms.push_back(G::ExpG(G::SRandom(rng)));
  auto in = EncryptAll<G>(kp.pk, ms, rng);
  auto perm = rng.Permutation(16);
  auto res = ShuffleProve<G>(kp.pk, in, 1, perm, RandomScalars<G>(rng, 16), 12, rng);
  EXPECT_TRUE(ShuffleVerify<G>(kp.pk, in, res.output, 1, res.proof, 12));
  std::vector<std::array<uint8_t, 32>> before, after;
  for (size_t i = 0; i < 16; ++i) {
    before.push_back(EncodeElement<G>(ms[i]));
    after.push_back(EncodeElement<G>(Decrypt<G>(kp.sk, res.output[i])));
    EXPECT_NE(res.output[i], in[perm[i]]);
    EXPECT_EQ(Decrypt<G>(kp.sk, res.output[i]), ms[perm[i]]);
  }
  std::sort(before.begin(), before.end());
  std::sort(after.begin(), after.end());
  EXPECT_EQ(before, after);
}

TYPED_TEST(ShuffleTest, TuplesMoveTogether) {
  using G = TypeParam;
  Rng rng(9);
  auto kp = Keygen<G>(rng);
  std::vector<ElementOf<G>> ms;
  for (int i = 0; i < 10; ++i) ms.push_back(G::ExpG(G::SFromU64(100 + i)));
  auto in = EncryptAll<G>(kp.pk, ms, rng);
  auto perm = rng.Permutation(5);
  auto res = ShuffleProve<G>(kp.pk, in, 2, perm, RandomScalars<G>(rng, 10), 6, rng);
  EXPECT_TRUE(ShuffleVerify<G>(kp.pk, in, res.output, 2, res.proof, 6));
  for (size_t j = 0; j < 5; ++j) {
    EXPECT_EQ(Decrypt<G>(kp.sk, res.output[2 * j]), ms[2 * perm[j]]);
    EXPECT_EQ(Decrypt<G>(kp.sk, res.output[2 * j + 1]), ms[2 * perm[j] + 1]);
  }
}

TYPED_TEST(ShuffleTest, MalformedProofsAndInputsAreRejected) {
  using G = TypeParam;
  Rng rng(10);
  auto kp = Keygen<G>(rng);
  std::vector<ElementOf<G>> ms;
  for (int i = 0; i < 5; ++i) ms.push_back(G::ExpG(G::SFromU64(i + 9)));
  auto in = EncryptAll<G>(kp.pk, ms, rng);
  auto perm = rng.Permutation(5);
  EXPECT_THROW(ShuffleProve<G>(kp.pk, in, 1, perm, RandomScalars<G>(rng, 4), 8, rng),
               LengthMismatch);
  EXPECT_THROW(ShuffleProve<G>(kp.pk, in, 1, rng.Permutation(4),
                               RandomScalars<G>(rng, 5), 8, rng),
               LengthMismatch);
  auto res = ShuffleProve<G>(kp.pk, in, 1, perm, RandomScalars<G>(rng, 5), 8, rng);
  ASSERT_TRUE(ShuffleVerify<G>(kp.pk, in, res.output, 1, res.proof, 8));

  auto dropped = res.proof;
  dropped.reps.pop_back();
  EXPECT_FALSE(ShuffleVerify<G>(kp.pk, in, res.output, 1, dropped, 8));
  EXPECT_FALSE(ShuffleVerify<G>(kp.pk, in, res.output, 1, res.proof, 9));

  auto swapped = res.output;
  std::swap(swapped[0], swapped[1]);
  EXPECT_FALSE(ShuffleVerify<G>(kp.pk, in, swapped, 1, res.proof, 8));

  auto bad_perm = res.proof;
  bad_perm.reps[0].perm[0] = bad_perm.reps[0].perm[1];
  EXPECT_FALSE(ShuffleVerify<G>(kp.pk, in, res.output, 1, bad_perm, 8));

  auto bad_rerand = res.proof;
  bad_rerand.reps[3].rerand[2] = bad_rerand.reps[3].rerand[2] + G::SOne();
  EXPECT_FALSE(ShuffleVerify<G>(kp.pk, in, res.output, 1, bad_rerand, 8));

  EXPECT_FALSE(ShuffleVerify<G>(kp.pk, in, res.output, 1, res.proof, 8, Bytes{1}));
}

TYPED_TEST(ShuffleTest, WireFormatRoundTripsAndMatchesSizeFormula) {
  using G = TypeParam;
  Rng rng(11);
  auto kp = Keygen<G>(rng);
  std::vector<ElementOf<G>> ms(6, G::Generator());
  auto in = EncryptAll<G>(kp.pk, ms, rng);
  auto res = ShuffleProve<G>(kp.pk, in, 2, rng.Permutation(3),
                             RandomScalars<G>(rng, 6), 5, rng);
  ByteWriter w;
  WriteShuffleProof<G>(w, res.proof);
  EXPECT_EQ(w.size(), ShuffleProofBytes(6, 2, 5));
  ByteReader r(w.bytes());
  auto back = ReadShuffleProof<G>(r, 6, 2);
  r.ExpectDone();
  EXPECT_TRUE(ShuffleVerify<G>(kp.pk, in, res.output, 2, back, 5));
  Bytes truncated(w.bytes().begin(), w.bytes().end() - 1);
  ByteReader rt(truncated);
  EXPECT_THROW(ReadShuffleProof<G>(rt, 6, 2), DecodeError);
}

TEST(ShuffleCompletenessTest, ThousandRandomInstances) {
  Rng rng(12);
  for (int i = 0; i < 1000; ++i) {
    auto kp = Keygen<T>(rng);
    size_t items = 1 + rng.UniformBelow(6), width = 1 + rng.UniformBelow(2);
    std::vector<T::Element> ms;
    for (size_t k = 0; k < items * width; ++k) ms.push_back(T::ExpG(T::SRandom(rng)));
    auto in = EncryptAll<T>(kp.pk, ms, rng);
    auto res = ShuffleProve<T>(kp.pk, in, width, rng.Permutation(items),
                               RandomScalars<T>(rng, in.size()), 8, rng);
    ASSERT_TRUE(ShuffleVerify<T>(kp.pk, in, res.output, width, res.proof, 8));
  }
}

// One-shot cheating prover: guesses every challenge bit in advance and
// prepares each intermediate to open on the guessed leg only. Its output
// need not be a shuffle of its input.
template <class G>
bool ForgeAttempt(const ElementOf<G>& pk, const std::vector<Ciphertext<G>>& in,
                  const std::vector<Ciphertext<G>>& out, int sigma, Rng& rng) {
  Rerandomizer<G> rr(pk);
  const size_t n = in.size();
  ShuffleProof<G> proof;
  proof.reps.resize(sigma);
  for (auto& rep : proof.reps) {
    rep.leg = rng.Bernoulli(0.5);
    rep.perm = rng.Permutation(n);
    rep.rerand = RandomScalars<G>(rng, n);
    if (!rep.leg) {
      rep.intermediate = ApplyShuffle<G>(rr, in, 1, rep.perm, rep.rerand);
    } else {
      // out[j] = I[psi[j]] * Enc(1; tau[j]).
      rep.intermediate.resize(n);
      for (size_t j = 0; j < n; ++j) {
        rep.intermediate[rep.perm[j]] = rr.Apply(out[j], -rep.rerand[j]);
      }
    }
  }
  return ShuffleVerify<G>(pk, in, out, 1, proof, sigma);
}

template <class G>
int CountForgeries(int trials, int sigma, uint64_t seed) {
  Rng rng(seed);
  auto kp = Keygen<G>(rng);
  int accepted = 0;
  for (int i = 0; i < trials; ++i) {
    std::vector<ElementOf<G>> ms;
    for (int k = 0; k < 4; ++k) ms.push_back(G::ExpG(G::SFromU64(k + 1)));
    auto in = EncryptAll<G>(kp.pk, ms, rng);
    auto out = ApplyShuffle<G>(Rerandomizer<G>(kp.pk), in, 1, rng.Permutation(4),
                               RandomScalars<G>(rng, 4));
    out[rng.UniformBelow(4)] = Encrypt<G>(kp.pk, G::ExpG(G::SFromU64(99)), rng);
    accepted += ForgeAttempt<G>(kp.pk, in, out, sigma, rng);
  }
  return accepted;
}

TEST(ShuffleSoundnessTest, ForgedOutputRarelyAccepted) {
  // 200 trials at sigma_rep = 10: expectation 0.2, and P[X > 2] < 1.2e-3.
  EXPECT_LE(CountForgeries<T>(200, 10, 13), 2);
  EXPECT_LE(CountForgeries<R>(200, 10, 14), 2);
}

TEST(ShuffleSoundnessTest, ForgeryRateMatchesTwoToMinusSigma) {
  // At sigma_rep = 3 the guessing prover wins with probability exactly 1/8.
  const int n = 800;
  const double p = 1.0 / 8;
  int accepted = CountForgeries<T>(n, 3, 15);
  EXPECT_LE(std::abs(accepted - n * p), 3 * std::sqrt(n * p * (1 - p)))
      << accepted;
}

TEST(ShuffleZeroKnowledgeTest, OpenedOutputLegIsAFreshUniformShuffle) {
  // Over every intermediate permutation phi of 4 items, the opened
  // permutation psi takes each value of S_4 exactly once, matching the
  // permutation of a fresh uniform shuffle; the opened randomizers are a
  // translate of uniform rho, hence uniform and independent of perm.
  Rng rng(16);
  auto perm = rng.Permutation(4);
  auto rerand = RandomScalars<T>(rng, 4);
  auto rho = RandomScalars<T>(rng, 4);
  std::vector<uint32_t> phi = {0, 1, 2, 3};
  std::map<std::vector<uint32_t>, int> psi_hist;
  do {
    std::vector<uint32_t> psi;
    std::vector<T::Scalar> tau;
    OpenOutputLeg<T>(phi, rho, perm, rerand, 1, &psi, &tau);
    ++psi_hist[psi];
    for (size_t j = 0; j < 4; ++j) {
      ASSERT_EQ(phi[psi[j]], perm[j]);
      ASSERT_EQ((tau[j] + rho[psi[j]]).v, rerand[j].v);
    }
    // Shifting rho by any vector shifts tau by the permuted negation, so the
    // map rho -> tau is a bijection.
    auto shift = RandomScalars<T>(rng, 4);
    auto rho2 = rho;
    for (size_t i = 0; i < 4; ++i) rho2[i] = rho2[i] + shift[i];
    std::vector<uint32_t> psi2;
    std::vector<T::Scalar> tau2;
    OpenOutputLeg<T>(phi, rho2, perm, rerand, 1, &psi2, &tau2);
    for (size_t j = 0; j < 4; ++j) {
      ASSERT_EQ((tau2[j] + shift[psi[j]]).v, tau[j].v);
    }
  } while (std::next_permutation(phi.begin(), phi.end()));
  EXPECT_EQ(psi_hist.size(), 24u);
  for (const auto& [p, c] : psi_hist) EXPECT_EQ(c, 1);
}

TEST(ShuffleZeroKnowledgeTest, OpenedPermutationsAreUniformOnBothLegs) {
  // Chi-square over the 24 permutations of the opened legs of real proofs,
  // for a fixed secret permutation.
  Rng rng(17);
  auto kp = Keygen<T>(rng);
  std::vector<T::Element> ms;
  for (int k = 0; k < 4; ++k) ms.push_back(T::ExpG(T::SFromU64(k + 1)));
  auto in = EncryptAll<T>(kp.pk, ms, rng);
  std::vector<uint32_t> secret = {2, 0, 3, 1};
  std::map<std::vector<uint32_t>, int> hist[2];
  int total[2] = {0, 0};
  for (int run = 0; run < 60; ++run) {
    auto res = ShuffleProve<T>(kp.pk, in, 1, secret, RandomScalars<T>(rng, 4), 64, rng);
    for (const auto& rep : res.proof.reps) {
      ++hist[rep.leg][rep.perm];
      ++total[rep.leg];
    }
  }
  for (int leg = 0; leg < 2; ++leg) {
    double expect = total[leg] / 24.0, chi2 = 0;
    for (const auto& [p, c] : hist[leg]) chi2 += (c - expect) * (c - expect) / expect;
    chi2 += (24 - hist[leg].size()) * expect;
    // 23 degrees of freedom; 49.7 is the 0.999 quantile.
    EXPECT_LT(chi2, 49.7) << "leg " << leg;
  }
}

}  // namespace
}  // namespace shufflestack
