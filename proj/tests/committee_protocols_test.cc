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

#include <map>
#include <memory>
#include <vector>

#include "gtest/gtest.h"
#include "shufflestack/committee.h"
#include "shufflestack/ristretto255.h"
#include "shufflestack/tiny_group.h"

namespace shufflestack {
namespace {

// m committees of n_dec consecutive clients, starting at client 0.
CommitteeLayout Consecutive(size_t m, size_t n_dec, int t) {
  CommitteeLayout l;
  l.t = t;
  PartyId next = 0;
  for (size_t c = 0; c < m; ++c) {
    l.members.emplace_back();
    for (size_t k = 0; k < n_dec; ++k) l.members.back().push_back(next++);
  }
  return l;
}

template <class G>
struct Harness {
  Harness(uint32_t n, CommitteeLayout layout, DropoutSchedule drops = {},
          AdversarySpec adv = {}, uint64_t seed = 7)
      : adversary(std::move(adv)),
        net(n, std::move(drops), &adversary, true, seed),
        keys(LongTermKeys<G>(n, Rng(seed).Fork("pki"))),
        ka(net, layout, keys, &adversary, Rng(seed)) {}

  bool Run() {
    ka.ChannelSetup();
    if (!ka.RunRounds1To3()) return false;
    ka.Round4Send(ka.pk());
    for (PartyId p = 0; p < net.n_clients(); ++p) {
      auto key = ka.ClientReceiveKeyInfo(p);
      if (key) received[p] = *key;
    }
    return true;
  }

  // The key each committee's eligible members can reconstruct.
  ScalarOf<G> CommitteeKey(size_t c) {
    std::vector<SharePoint<G>> pts;
    const auto& l = ka.layout();
    for (size_t k = 0; k < l.n_dec(); ++k) {
      const ScalarOf<G>* s = ka.ShareOf(l.members[c][k]);
      if (s && ka.Eligible(l.members[c][k])) {
        pts.push_back({static_cast<uint32_t>(k + 1), *s});
      }
    }
    return Reconstruct<G>(pts, l.t);
  }

  void ExpectConsistentKey() {
    const auto& l = ka.layout();
    for (size_t c = 0; c < l.m(); ++c) {
      EXPECT_EQ(G::ExpG(CommitteeKey(c)), ka.pk()) << "committee " << c;
      for (size_t k = 0; k < l.n_dec(); ++k) {
        PartyId p = l.members[c][k];
        if (!ka.Eligible(p)) continue;
        ASSERT_NE(ka.ShareOf(p), nullptr);
        EXPECT_EQ(G::ExpG(*ka.ShareOf(p)), ka.share_comms()[c][k]);
      }
    }
  }

  AdversarySpec adversary;
  Network net;
  std::vector<KeyPair<G>> keys;
  KeyAgreement<G> ka;
  std::map<PartyId, ElementOf<G>> received;
};

template <class G>
class KeyAgreementTest : public ::testing::Test {};
using Groups = ::testing::Types<Ristretto255, TinyGroup>;
TYPED_TEST_SUITE(KeyAgreementTest, Groups);

TYPED_TEST(KeyAgreementTest, HonestRunAgreesOnOneKey) {
  using G = TypeParam;
  Harness<G> h(14, Consecutive(3, 4, 3));
  ASSERT_TRUE(h.Run()) << h.ka.reason();
  h.ExpectConsistentKey();
  EXPECT_TRUE(h.ka.excluded().empty());
  // The key is the sum of the first committee's dealt secrets.
  ScalarOf<G> sum = G::SZero();
  for (PartyId p : h.ka.layout().members[0]) sum = sum + h.ka.DealtSecretOf(p);
  EXPECT_EQ(G::ExpG(sum), h.ka.pk());
  ASSERT_EQ(h.received.size(), 14u);
  for (const auto& [p, key] : h.received) EXPECT_EQ(key, h.ka.pk());
}

TYPED_TEST(KeyAgreementTest, OffsetsAreDifferencesOfCommitteeSecrets) {
  using G = TypeParam;
  Harness<G> h(12, Consecutive(3, 4, 2));
  ASSERT_TRUE(h.Run());
  std::vector<ScalarOf<G>> s(3, G::SZero());
  for (size_t c = 0; c < 3; ++c) {
    for (PartyId p : h.ka.layout().members[c]) s[c] = s[c] + h.ka.DealtSecretOf(p);
  }
  EXPECT_EQ(h.ka.offsets()[0], G::SZero());
  EXPECT_EQ(h.ka.offsets()[1], s[1] - s[0]);
  EXPECT_EQ(h.ka.offsets()[2], s[2] - s[0]);
}

TYPED_TEST(KeyAgreementTest, InconsistentDealerIsExcluded) {
  using G = TypeParam;
  AdversarySpec adv;
  adv.corrupt[5].bad_share = true;
  Harness<G> h(12, Consecutive(3, 4, 2), {}, adv);
  ASSERT_TRUE(h.Run()) << h.ka.reason();
  EXPECT_TRUE(h.ka.excluded_sharers().count(5));
  EXPECT_FALSE(h.ka.Eligible(5));
  EXPECT_EQ(h.ka.excluded().at(5), "confirmed bad share");
  EXPECT_EQ(h.ka.excluded().size(), 1u);
  h.ExpectConsistentKey();
}

TYPED_TEST(KeyAgreementTest, FalseAccuserIsExcludedAndAccusedKept) {
  using G = TypeParam;
  AdversarySpec adv;
  adv.corrupt[2].false_report = true;
  Harness<G> h(12, Consecutive(3, 4, 2), {}, adv);
  ASSERT_TRUE(h.Run()) << h.ka.reason();
  EXPECT_EQ(h.ka.excluded().size(), 1u);
  EXPECT_EQ(h.ka.excluded().at(2), "refuted complaint");
  EXPECT_TRUE(h.ka.excluded_sharers().empty());
  h.ExpectConsistentKey();
}

TYPED_TEST(KeyAgreementTest, WrongOffsetIsCaught) {
  using G = TypeParam;
  AdversarySpec adv;
  adv.corrupt[9].bad_offset = true;
  Harness<G> h(12, Consecutive(3, 4, 2), {}, adv);
  ASSERT_TRUE(h.Run()) << h.ka.reason();
  EXPECT_EQ(h.ka.excluded().at(9), "offset fails commitment check");
  EXPECT_TRUE(h.ka.excluded_sharers().empty());
  h.ExpectConsistentKey();
}

TYPED_TEST(KeyAgreementTest, DropoutAfterDealingStillCountsAsSharer) {
  using G = TypeParam;
  DropoutSchedule drops;
  drops.drop_round[4] = 2;
  Harness<G> h(12, Consecutive(3, 4, 3), drops);
  ASSERT_TRUE(h.Run()) << h.ka.reason();
  EXPECT_FALSE(h.ka.Eligible(4));
  EXPECT_FALSE(h.ka.excluded_sharers().count(4));
  EXPECT_TRUE(h.ka.unresponsive().count(4));
  h.ExpectConsistentKey();
}

TYPED_TEST(KeyAgreementTest, DropoutBeforeDealingIsNotASharer) {
  using G = TypeParam;
  DropoutSchedule drops;
  drops.drop_round[0] = 1;
  drops.drop_round[11] = 1;
  Harness<G> h(12, Consecutive(3, 4, 3), drops);
  ASSERT_TRUE(h.Run()) << h.ka.reason();
  EXPECT_TRUE(h.ka.excluded_sharers().count(0));
  EXPECT_TRUE(h.ka.excluded_sharers().count(11));
  h.ExpectConsistentKey();
}

TYPED_TEST(KeyAgreementTest, LateOffsetIsTreatedAsMissing) {
  using G = TypeParam;
  DropoutSchedule drops;
  drops.late_rounds[6] = {3};
  Harness<G> h(12, Consecutive(3, 4, 2), drops);
  ASSERT_TRUE(h.Run()) << h.ka.reason();
  EXPECT_EQ(h.ka.excluded().at(6), "no offset");
  h.ExpectConsistentKey();
  bool saw_late = false;
  for (const auto& m : h.net.transcript()) saw_late |= m.arrived_late;
  EXPECT_TRUE(saw_late);
}

TYPED_TEST(KeyAgreementTest, MalformedDealingIsRejected) {
  using G = TypeParam;
  AdversarySpec adv;
  adv.corrupt[1].malformed = 1;
  Harness<G> h(12, Consecutive(3, 4, 2), {}, adv);
  ASSERT_TRUE(h.Run()) << h.ka.reason();
  EXPECT_TRUE(h.ka.excluded_sharers().count(1));
  bool marked = false;
  for (const auto& m : h.net.transcript()) marked |= m.malformed && m.from == 1;
  EXPECT_TRUE(marked);
  h.ExpectConsistentKey();
}

TYPED_TEST(KeyAgreementTest, AbortsWhenCommitteeFallsBelowThreshold) {
  using G = TypeParam;
  DropoutSchedule drops;
  drops.drop_round[8] = 3;
  drops.drop_round[9] = 3;
  Harness<G> h(12, Consecutive(3, 4, 3), drops);
  EXPECT_FALSE(h.Run());
  EXPECT_FALSE(h.ka.ok());
  EXPECT_EQ(h.ka.reason(), "committee 2 has 2 valid offsets, need 3");
}

TYPED_TEST(KeyAgreementTest, AbortsWhenFirstCommitteeLosesMembers) {
  using G = TypeParam;
  DropoutSchedule drops;
  drops.drop_round[1] = 2;
  drops.drop_round[2] = 2;
  Harness<G> h(8, Consecutive(2, 4, 3), drops);
  EXPECT_FALSE(h.Run());
  EXPECT_EQ(h.ka.reason(), "committee 0 retains 2 eligible members, need 3");
}

TYPED_TEST(KeyAgreementTest, SingleCommitteeWorks) {
  using G = TypeParam;
  Harness<G> h(5, Consecutive(1, 5, 3));
  ASSERT_TRUE(h.Run());
  h.ExpectConsistentKey();
}

TEST(KeyAgreementCost, DealingSizeAndExponentiations) {
  using G = Ristretto255;
  const size_t m = 3, nd = 5;
  const int t = 3;
  Harness<G> h(16, Consecutive(m, nd, t));
  ASSERT_TRUE(h.Run());
  for (const auto& msg : h.net.transcript()) {
    if (msg.type != MsgType::kShares) continue;
    const bool last = msg.from >= 2 * nd;
    const size_t elems = last ? t : 2 * t - 1;
    const size_t shares = last ? nd - 1 : 2 * nd - 1;
    EXPECT_EQ(msg.size, kEnvelopeBytes + 32 * elems + kSealedScalarBytes * shares);
  }
  auto exps = h.net.ExpTotals();
  const auto ka = static_cast<size_t>(Phase::kKeyAgreement);
  // Dealing plus one batch check per non-empty relayed set.
  EXPECT_EQ(exps[0][ka], (2u * t - 1) + 1);
  EXPECT_EQ(exps[nd][ka], (2u * t - 1) + 2);
  EXPECT_EQ(exps[2 * nd][ka], static_cast<uint64_t>(t) + 2);
  // Channel keys: one DH per distinct peer.
  const auto cs = static_cast<size_t>(Phase::kChannelSetup);
  EXPECT_EQ(exps[0][cs], 2 * nd - 1);
  EXPECT_EQ(exps[nd][cs], 3 * nd - 1);
}

TEST(KeyAgreementLayout, RejectsBadLayouts) {
  CommitteeLayout l = Consecutive(2, 3, 4);
  EXPECT_THROW(l.Validate(10), ConfigInvalid);
  l = Consecutive(2, 3, 2);
  l.members[1][0] = 0;
  EXPECT_THROW(l.Validate(10), ConfigInvalid);
  l = Consecutive(2, 3, 2);
  EXPECT_THROW(l.Validate(5), ConfigInvalid);
  l.members[1].pop_back();
  EXPECT_THROW(l.Validate(10), ConfigInvalid);
}

// ---------------------------------------------------------------------------
// Decryption.

template <class G>
std::vector<DecryptionJob<G>> JobsFor(Harness<G>& h, const std::vector<Ciphertext<G>>& cts) {
  const auto& l = h.ka.layout();
  std::vector<DecryptionJob<G>> jobs(l.m());
  for (size_t i = 0; i < cts.size(); ++i) jobs[i * l.m() / cts.size()].cts.push_back(cts[i]);
  for (size_t c = 0; c < l.m(); ++c) {
    jobs[c].committee = c;
    jobs[c].share_comms = h.ka.share_comms()[c];
    for (size_t k = 0; k < l.n_dec(); ++k) {
      if (h.ka.Eligible(l.members[c][k])) {
        jobs[c].members.push_back({l.members[c][k], static_cast<uint32_t>(k + 1)});
      }
    }
  }
  return jobs;
}

template <class G>
class DecryptionTest : public ::testing::Test {};
TYPED_TEST_SUITE(DecryptionTest, Groups);

template <class G>
void RunDecrypt(Harness<G>& h, ChallengeMode mode, bool expect_ok,
                std::vector<DecryptionJob<G>>* out = nullptr) {
  Rng rng(99);
  std::vector<ElementOf<G>> ms;
  std::vector<Ciphertext<G>> cts;
  for (int i = 0; i < 9; ++i) {
    ms.push_back(G::ExpG(G::SRandom(rng)));
    cts.push_back(Encrypt<G>(h.ka.pk(), ms.back(), rng));
  }
  auto jobs = JobsFor(h, cts);
  RunDecryptionRounds<G>(
      h.net, jobs, h.ka.layout().t, mode, [&](PartyId p) { return h.ka.ShareOf(p); },
      &h.adversary, Rng(5));
  std::vector<ElementOf<G>> got;
  bool all_ok = true;
  for (const auto& j : jobs) {
    all_ok &= j.ok;
    got.insert(got.end(), j.plaintexts.begin(), j.plaintexts.end());
  }
  EXPECT_EQ(all_ok, expect_ok);
  if (expect_ok) {
    EXPECT_EQ(got, ms);
  }
  if (out) *out = std::move(jobs);
}

TYPED_TEST(DecryptionTest, RecoversPlaintextsFiatShamir) {
  using G = TypeParam;
  Harness<G> h(12, Consecutive(3, 4, 3));
  ASSERT_TRUE(h.Run());
  RunDecrypt(h, ChallengeMode::kFiatShamir, true);
}

TYPED_TEST(DecryptionTest, RecoversPlaintextsInteractive) {
  using G = TypeParam;
  Harness<G> h(12, Consecutive(3, 4, 3));
  ASSERT_TRUE(h.Run());
  const uint32_t before = h.net.round();
  RunDecrypt(h, ChallengeMode::kInteractive, true);
  EXPECT_EQ(h.net.round(), before + 2);
}

TYPED_TEST(DecryptionTest, WrongPartialDecryptionIsSkipped) {
  using G = TypeParam;
  AdversarySpec adv;
  adv.corrupt[4].bad_partial_dec = true;
  Harness<G> h(12, Consecutive(3, 4, 3), {}, adv);
  ASSERT_TRUE(h.Run());
  for (auto mode : {ChallengeMode::kFiatShamir, ChallengeMode::kInteractive}) {
    std::vector<DecryptionJob<G>> jobs;
    RunDecrypt(h, mode, true, &jobs);
    EXPECT_EQ(jobs[1].rejected, std::vector<PartyId>{4});
    EXPECT_EQ(jobs[1].used, (std::vector<PartyId>{5, 6, 7}));
  }
}

TYPED_TEST(DecryptionTest, FailsBelowThreshold) {
  using G = TypeParam;
  DropoutSchedule drops;
  drops.drop_round[0] = 5;
  drops.drop_round[1] = 5;
  AdversarySpec adv;
  adv.corrupt[2].bad_partial_dec = true;
  Harness<G> h(12, Consecutive(3, 4, 2), drops, adv);
  ASSERT_TRUE(h.Run());
  std::vector<DecryptionJob<G>> jobs;
  RunDecrypt(h, ChallengeMode::kFiatShamir, false, &jobs);
  EXPECT_FALSE(jobs[0].ok);
  EXPECT_EQ(jobs[0].reason, "committee 0 returned 1 valid partial decryptions, need 2");
  EXPECT_TRUE(jobs[1].ok);
}

TEST(DecryptionCost, MemberPaysTwoPerCiphertextPlusOne) {
  using G = Ristretto255;
  Harness<G> h(8, Consecutive(2, 4, 2));
  ASSERT_TRUE(h.Run());
  RunDecrypt(h, ChallengeMode::kFiatShamir, true);
  auto exps = h.net.ExpTotals();
  const auto dec = static_cast<size_t>(Phase::kDecryption);
  // 9 items over 2 committees: 5 and 4.
  EXPECT_EQ(exps[0][dec], 2u * 5 + 1);
  EXPECT_EQ(exps[3][dec], 2u * 5 + 1);
  EXPECT_EQ(exps[4][dec], 2u * 4 + 1);
}

}  // namespace
}  // namespace shufflestack
