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

#ifndef SHUFFLESTACK_COMMITTEE_H_
#define SHUFFLESTACK_COMMITTEE_H_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "shufflestack/channel.h"
#include "shufflestack/common.h"
#include "shufflestack/elgamal.h"
#include "shufflestack/net_sim.h"
#include "shufflestack/rng.h"
#include "shufflestack/shamir.h"
#include "shufflestack/zk.h"

namespace shufflestack {

// Disjoint committees of equal size n_dec, each meant to hold a
// t-out-of-n_dec sharing of one common secret key. Member k of a committee
// holds the share at index k + 1.
struct CommitteeLayout {
  std::vector<std::vector<PartyId>> members;
  int t = 0;

  size_t m() const { return members.size(); }
  size_t n_dec() const { return members.empty() ? 0 : members[0].size(); }

  void Validate(uint32_t n_clients) const {
    if (members.empty()) throw ConfigInvalid("no committees");
    const size_t nd = n_dec();
    if (t < 1 || static_cast<size_t>(t) > nd) {
      throw ConfigInvalid("need 1 <= t <= n_dec");
    }
    std::set<PartyId> seen;
    for (const auto& c : members) {
      if (c.size() != nd) throw ConfigInvalid("committees differ in size");
      for (PartyId p : c) {
        if (p >= n_clients) throw ConfigInvalid("committee member out of range");
        if (!seen.insert(p).second) throw ConfigInvalid("committees overlap");
      }
    }
  }
};

template <class G>
std::vector<KeyPair<G>> LongTermKeys(uint32_t n_clients, const Rng& rng) {
  std::vector<KeyPair<G>> keys;
  keys.reserve(n_clients);
  for (uint32_t p = 0; p < n_clients; ++p) {
    Rng r = rng.Fork("long-term-key", p);
    keys.push_back(Keygen<G>(r));
  }
  return keys;
}

// ---------------------------------------------------------------------------
// Shared key agreement.
//
// Every member of committee i draws a secret a and deals it twice: to its own
// committee and to committee i + 1 (the last committee deals once), with
// Feldman commitments. Committee i then holds shares of s_i, the sum of its
// valid sharers' secrets, and shares of s_{i-1}. Revealing those offset
// shares lets the server learn s_i - s_{i-1} and hence d_i = s_i - s_1, and
// member shares of s_i minus d_i are shares of the common key sk = s_1.
//
// Rounds: (1) deal; (2) relay shares, members report faults; (3) announce
// adjudication, members send offsets; (4) announce keys and offsets.

template <class G>
class KeyAgreement {
 public:
  KeyAgreement(Network& net, const CommitteeLayout& layout,
               const std::vector<KeyPair<G>>& long_term,
               const AdversarySpec* adversary, const Rng& rng)
      : net_(net), layout_(layout), lt_(long_term), rng_(rng) {
    layout_.Validate(net.n_clients());
    for (size_t c = 0; c < layout_.m(); ++c) {
      for (size_t k = 0; k < layout_.n_dec(); ++k) {
        PartyId p = layout_.members[c][k];
        Member mem;
        mem.id = p;
        mem.committee = c;
        mem.index = k + 1;
        mem.mb = adversary ? adversary->Find(p) : nullptr;
        mem.rng = rng_.Fork("ka-member", p);
        members_.emplace(p, std::move(mem));
      }
    }
  }

  // Pairwise channel keys; local computation only, charged to its own phase.
  void ChannelSetup() {
    for (auto& [p, mem] : members_) {
      for (PartyId peer : Peers(mem)) {
        if (mem.keys.count(peer)) continue;
        auto z = Charged(net_, p, Phase::kChannelSetup,
                         [&] { return G::Exp(lt_[peer].pk, lt_[p].sk); });
        mem.keys[peer] = DeriveChannelKey<G>(z, p, peer);
      }
    }
  }

  bool RunRounds1To3() {
    Round1();
    Round2();
    return Round3();
  }

  // Opens round 4 and sends every client the encryption key, plus the
  // committee offset to eligible members. The caller collects replies.
  void Round4Send(const ElementOf<G>& enc_key) {
    net_.BeginRound();
    for (PartyId p = 0; p < net_.n_clients(); ++p) {
      ByteWriter w;
      WriteElement<G>(w, enc_key);
      auto it = members_.find(p);
      if (it != members_.end() && Eligible(p)) {
        WriteScalar<G>(w, d_[it->second.committee]);
      }
      net_.Send(kServer, p, MsgType::kKeyInfo, w.Take());
    }
  }

  // Client p's handling of the round-4 message: returns the encryption key
  // and, for committee members, fixes the final key share.
  std::optional<ElementOf<G>> ClientReceiveKeyInfo(PartyId p) {
    auto msg = net_.TakeFrom(p, MsgType::kKeyInfo, kServer);
    if (!msg) return std::nullopt;
    ByteReader r(msg->body);
    ElementOf<G> key = ReadElement<G>(r);
    auto it = members_.find(p);
    if (it != members_.end() && r.remaining() > 0) {
      Member& mem = it->second;
      ScalarOf<G> d = ReadScalar<G>(r);
      mem.sk_share = mem.s_tilde - d;
    }
    return key;
  }

  bool ok() const { return ok_; }
  const std::string& reason() const { return reason_; }
  const ElementOf<G>& pk() const { return pk_; }
  const CommitteeLayout& layout() const { return layout_; }
  // g^{sk_{c,k}} for member k of committee c as computed by the server.
  const std::vector<std::vector<ElementOf<G>>>& share_comms() const {
    return share_comms_;
  }
  bool Eligible(PartyId p) const {
    return members_.count(p) && !excluded_members_.count(p);
  }
  const std::map<PartyId, std::string>& excluded() const { return reasons_; }
  const std::set<PartyId>& excluded_sharers() const { return excluded_sharers_; }
  const std::set<PartyId>& unresponsive() const { return unresponsive_; }
  const std::vector<ScalarOf<G>>& offsets() const { return d_; }
  // Client-held state, for the decryption phase and for tests.
  const ScalarOf<G>* ShareOf(PartyId p) const {
    auto it = members_.find(p);
    if (it == members_.end() || !it->second.sk_share) return nullptr;
    return &*it->second.sk_share;
  }
  // s~ and l of a member (its shares of s_i and s_{i-1}), for tests.
  std::pair<ScalarOf<G>, ScalarOf<G>> RawSharesOf(PartyId p) const {
    const Member& mem = members_.at(p);
    return {mem.s_tilde, mem.l};
  }
  // Oracle only: the secret dealt by p (never leaves the client in-protocol).
  ScalarOf<G> DealtSecretOf(PartyId p) const { return members_.at(p).poly1.at(0); }

 private:
  struct Member {
    PartyId id = 0;
    size_t committee = 0;
    uint32_t index = 0;
    const Misbehavior* mb = nullptr;
    Rng rng{0};
    std::map<PartyId, ChannelKey> keys;
    std::vector<ScalarOf<G>> poly1, poly2;
    std::map<PartyId, ScalarOf<G>> in1, in2;
    ScalarOf<G> s_tilde{}, l{};
    std::optional<ScalarOf<G>> sk_share;
  };

  struct Dealing {
    FeldmanCommitment<G> e1;
    std::vector<ElementOf<G>> coeffs2;
    std::vector<Bytes> sealed;          // in RecipientsOf order
    std::vector<ElementOf<G>> d1, d2;   // derived commitments by slot
  };

  bool HasSuccessor(size_t c) const { return c + 1 < layout_.m(); }

  // Recipients of p's sealed shares, with the sharing each belongs to.
  std::vector<std::pair<PartyId, int>> RecipientsOf(const Member& mem) const {
    std::vector<std::pair<PartyId, int>> out;
    for (PartyId q : layout_.members[mem.committee]) {
      if (q != mem.id) out.push_back({q, 1});
    }
    if (HasSuccessor(mem.committee)) {
      for (PartyId q : layout_.members[mem.committee + 1]) out.push_back({q, 2});
    }
    return out;
  }

  std::vector<PartyId> Peers(const Member& mem) const {
    std::vector<PartyId> out;
    for (PartyId q : layout_.members[mem.committee]) {
      if (q != mem.id) out.push_back(q);
    }
    if (HasSuccessor(mem.committee)) {
      for (PartyId q : layout_.members[mem.committee + 1]) out.push_back(q);
    }
    if (mem.committee > 0) {
      for (PartyId q : layout_.members[mem.committee - 1]) out.push_back(q);
    }
    return out;
  }

  void Exclude(PartyId p, const std::string& why, bool as_sharer) {
    excluded_members_.insert(p);
    reasons_.emplace(p, why);
    if (as_sharer) excluded_sharers_.insert(p);
  }

  Bytes ComplaintContext(PartyId reporter, PartyId accused) const {
    ByteWriter w;
    w.Raw(reinterpret_cast<const uint8_t*>("complaint"), 9);
    w.U32(reporter);
    w.U32(accused);
    return w.Take();
  }

  // ---- Round 1: deal.
  void Round1() {
    net_.BeginRound();
    ka_round1_ = net_.round();
    const int t = layout_.t;
    for (auto& [p, mem] : members_) {
      if (!net_.Active(p)) continue;
      ByteWriter w;
      Charged(net_, p, Phase::kKeyAgreement, [&] {
        ScalarOf<G> a = G::SRandom(mem.rng);
        mem.poly1.assign(1, a);
        for (int k = 1; k < t; ++k) mem.poly1.push_back(G::SRandom(mem.rng));
        WriteElement<G>(w, G::ExpG(a));
        for (int k = 1; k < t; ++k) WriteElement<G>(w, G::ExpG(mem.poly1[k]));
        if (HasSuccessor(mem.committee)) {
          mem.poly2.assign(1, a);
          for (int k = 1; k < t; ++k) mem.poly2.push_back(G::SRandom(mem.rng));
          for (int k = 1; k < t; ++k) WriteElement<G>(w, G::ExpG(mem.poly2[k]));
        }
      });
      bool corrupted_one = false;
      for (auto [q, sharing] : RecipientsOf(mem)) {
        const Member& rec = members_.at(q);
        auto share = EvalPolynomial<G>(sharing == 1 ? mem.poly1 : mem.poly2, rec.index);
        if (mem.mb && mem.mb->bad_share && !corrupted_one) {
          share = share + G::SOne();
          corrupted_one = true;
        }
        w.Raw(SealScalar<G>(mem.keys.at(q), p, q, ka_round1_, share));
      }
      net_.Send(p, kServer, MsgType::kShares, w.Take());
    }

    // Server: parse dealings and derive per-recipient commitments.
    auto msgs = net_.Take(kServer, MsgType::kShares);
    std::set<PartyId> dealt;
    for (auto& msg : msgs) {
      auto it = members_.find(msg.from);
      if (it == members_.end()) continue;
      const Member& mem = it->second;
      try {
        ByteReader r(msg.body);
        Dealing dl;
        dl.e1.constant = ReadElement<G>(r);
        for (int k = 1; k < t; ++k) dl.e1.coeffs.push_back(ReadElement<G>(r));
        if (HasSuccessor(mem.committee)) {
          for (int k = 1; k < t; ++k) dl.coeffs2.push_back(ReadElement<G>(r));
        }
        for (size_t k = 0; k < RecipientsOf(mem).size(); ++k) {
          const uint8_t* s = r.Raw(kSealedScalarBytes);
          dl.sealed.emplace_back(s, s + kSealedScalarBytes);
        }
        r.ExpectDone();
        dealings_.emplace(msg.from, std::move(dl));
        dealt.insert(msg.from);
      } catch (const DecodeError&) {
        net_.MarkMalformed(msg.index);
      }
    }
    for (auto& [p, mem] : members_) {
      if (dealt.count(p)) continue;
      excluded_sharers_.insert(p);
      Exclude(p, "no valid dealing", true);
      if (!net_.Active(p)) unresponsive_.insert(p);
    }
    CountingScope scope(net_.Counter(kServer, Phase::kKeyAgreement));
    for (auto& [p, dl] : dealings_) {
      FeldmanCommitment<G> e2{dl.e1.constant, dl.coeffs2};
      for (uint32_t k = 1; k <= layout_.n_dec(); ++k) {
        dl.d1.push_back(DeriveShareCommitment<G>(dl.e1, k));
        if (HasSuccessor(members_.at(p).committee)) {
          dl.d2.push_back(DeriveShareCommitment<G>(e2, k));
        }
      }
    }
  }

  // ---- Round 2: relay; members verify and complain.
  void Round2() {
    net_.BeginRound();
    for (auto& [q, rec] : members_) {
      ByteWriter w;
      for (int sharing = 1; sharing <= 2; ++sharing) {
        std::vector<PartyId> from;
        if (sharing == 1) {
          for (PartyId p : layout_.members[rec.committee]) {
            if (p != q && dealings_.count(p)) from.push_back(p);
          }
        } else if (rec.committee > 0) {
          for (PartyId p : layout_.members[rec.committee - 1]) {
            if (dealings_.count(p)) from.push_back(p);
          }
        }
        w.U32(static_cast<uint32_t>(from.size()));
        for (PartyId p : from) {
          const Dealing& dl = dealings_.at(p);
          const auto recips = RecipientsOf(members_.at(p));
          size_t pos = 0;
          while (recips[pos].first != q) ++pos;
          w.U32(p);
          w.Raw(dl.sealed[pos]);
          WriteElement<G>(w, sharing == 1 ? dl.d1[rec.index - 1] : dl.d2[rec.index - 1]);
        }
      }
      net_.Send(kServer, q, MsgType::kRelay, w.Take());
    }

    // Members: open, batch-verify, pinpoint and report.
    for (auto& [q, mem] : members_) {
      auto msg = net_.TakeFrom(q, MsgType::kRelay, kServer);
      if (!msg || !net_.Active(q)) continue;
      ByteWriter w;
      Charged(net_, q, Phase::kKeyAgreement, [&] { MemberRound2(mem, msg->body, w); });
      net_.Send(q, kServer, MsgType::kComplaints, w.Take());
    }

    // Server: adjudicate.
    std::set<PartyId> responded;
    CountingScope scope(net_.Counter(kServer, Phase::kKeyAgreement));
    for (auto& msg : net_.Take(kServer, MsgType::kComplaints)) {
      if (!members_.count(msg.from)) continue;
      responded.insert(msg.from);
      try {
        ByteReader r(msg.body);
        uint32_t count = r.U32();
        std::vector<std::tuple<PartyId, uint8_t, ElementOf<G>, ScalarOf<G>, ScalarOf<G>>> cs;
        for (uint32_t i = 0; i < count; ++i) {
          PartyId accused = r.U32();
          uint8_t sharing = r.U8();
          ElementOf<G> z = ReadElement<G>(r);
          ScalarOf<G> e = ReadScalar<G>(r);
          ScalarOf<G> u = ReadScalar<G>(r);
          cs.emplace_back(accused, sharing, z, e, u);
        }
        r.ExpectDone();
        for (const auto& [accused, sharing, z, e, u] : cs) {
          Adjudicate(msg.from, accused, sharing, z, e, u);
        }
      } catch (const DecodeError&) {
        net_.MarkMalformed(msg.index);
        Exclude(msg.from, "malformed complaint", false);
      }
    }
    for (auto& [q, mem] : members_) {
      if (!responded.count(q) && !excluded_members_.count(q)) {
        Exclude(q, "no response in fault reporting", false);
        unresponsive_.insert(q);
      }
    }
  }

  void MemberRound2(Member& mem, const Bytes& body, ByteWriter& out) {
    ByteReader r(body);
    std::vector<std::tuple<PartyId, uint8_t, ElementOf<G>>> faults;  // accused
    for (int sharing = 1; sharing <= 2; ++sharing) {
      uint32_t count = r.U32();
      std::vector<std::tuple<PartyId, std::optional<ScalarOf<G>>, ElementOf<G>>> got;
      for (uint32_t i = 0; i < count; ++i) {
        PartyId p = r.U32();
        const uint8_t* sealed = r.Raw(kSealedScalarBytes);
        ElementOf<G> dc = ReadElement<G>(r);
        auto key = mem.keys.find(p);
        std::optional<ScalarOf<G>> s;
        if (key != mem.keys.end()) {
          s = OpenScalar<G>(key->second, p, mem.id, ka_round1_, sealed,
                            kSealedScalarBytes);
        }
        got.emplace_back(p, s, dc);
      }
      if (got.empty()) continue;
      // Batch check: g^{sum of shares} against the product of commitments.
      bool all_opened = true;
      ScalarOf<G> sum = G::SZero();
      ElementOf<G> prod = G::Identity();
      for (const auto& [p, s, dc] : got) {
        if (!s) {
          all_opened = false;
          continue;
        }
        sum = sum + *s;
        prod = prod * dc;
      }
      const bool batch_ok = all_opened && G::ExpG(sum) == prod;
      for (const auto& [p, s, dc] : got) {
        bool good = s.has_value() && (batch_ok || G::ExpG(*s) == dc);
        if (good) {
          (sharing == 1 ? mem.in1 : mem.in2)[p] = *s;
        } else {
          faults.emplace_back(p, static_cast<uint8_t>(sharing), ElementOf<G>{});
        }
      }
    }
    if (mem.mb && mem.mb->false_report) {
      // Accuse the first sharer that did nothing wrong.
      if (!mem.in1.empty()) faults.emplace_back(mem.in1.begin()->first, 1, ElementOf<G>{});
    }
    out.U32(static_cast<uint32_t>(faults.size()));
    for (auto& [p, sharing, z] : faults) {
      z = G::Exp(lt_[p].pk, lt_[mem.id].sk);
      auto [vs, proof] = ProvePartialDec<G>(lt_[mem.id].sk, lt_[mem.id].pk,
                                            {lt_[p].pk}, mem.rng,
                                            ComplaintContext(mem.id, p));
      out.U32(p);
      out.U8(sharing);
      WriteElement<G>(out, vs[0]);
      WriteScalar<G>(out, proof.e);
      WriteScalar<G>(out, proof.u);
    }
  }

  void Adjudicate(PartyId reporter, PartyId accused, uint8_t sharing,
                  const ElementOf<G>& z, const ScalarOf<G>& e, const ScalarOf<G>& u) {
    if (excluded_members_.count(reporter)) return;
    auto dit = dealings_.find(accused);
    const bool known = accused < lt_.size() && members_.count(accused) &&
                       dit != dealings_.end() && (sharing == 1 || sharing == 2);
    if (!known ||
        !VerifyPartialDecCompact<G>(lt_[reporter].pk, {lt_[accused].pk}, {z}, e, u,
                                    ComplaintContext(reporter, accused))) {
      Exclude(reporter, "unsupported complaint", false);
      return;
    }
    const auto recips = RecipientsOf(members_.at(accused));
    size_t pos = 0;
    while (pos < recips.size() &&
           !(recips[pos].first == reporter && recips[pos].second == sharing)) {
      ++pos;
    }
    if (pos == recips.size()) {
      Exclude(reporter, "complaint about a non-dealer", false);
      return;
    }
    auto key = DeriveChannelKey<G>(z, reporter, accused);
    const Bytes& sealed = dit->second.sealed[pos];
    auto s = OpenScalar<G>(key, accused, reporter, ka_round1_, sealed.data(), sealed.size());
    const uint32_t idx = members_.at(reporter).index;
    const ElementOf<G>& dc =
        sharing == 1 ? dit->second.d1[idx - 1] : dit->second.d2[idx - 1];
    if (!s || !(G::ExpG(*s) == dc)) {
      if (!excluded_sharers_.count(accused)) {
        Exclude(accused, "confirmed bad share", true);
        excluded_sharers_.insert(accused);
      }
    } else {
      Exclude(reporter, "refuted complaint", false);
    }
  }

  // ---- Round 3: adjudication out, offsets in.
  bool Round3() {
    net_.BeginRound();
    for (auto& [q, mem] : members_) {
      ByteWriter w;
      w.U32(static_cast<uint32_t>(excluded_sharers_.size()));
      for (PartyId p : excluded_sharers_) w.U32(p);
      net_.Send(kServer, q, MsgType::kAdjudication, w.Take());
    }
    for (auto& [q, mem] : members_) {
      auto msg = net_.TakeFrom(q, MsgType::kAdjudication, kServer);
      if (!msg || !net_.Active(q)) continue;
      ByteReader r(msg->body);
      std::set<PartyId> excluded;
      for (uint32_t i = 0, c = r.U32(); i < c; ++i) excluded.insert(r.U32());
      mem.s_tilde = G::SZero();
      mem.l = G::SZero();
      if (!mem.poly1.empty() && !excluded.count(q)) {
        mem.s_tilde = EvalPolynomial<G>(mem.poly1, mem.index);
      }
      for (const auto& [p, s] : mem.in1) {
        if (!excluded.count(p)) mem.s_tilde = mem.s_tilde + s;
      }
      for (const auto& [p, s] : mem.in2) {
        if (!excluded.count(p)) mem.l = mem.l + s;
      }
      if (mem.committee == 0) continue;
      ByteWriter w;
      ScalarOf<G> offset = mem.s_tilde - mem.l;
      if (mem.mb && mem.mb->bad_offset) offset = offset + G::SOne();
      WriteScalar<G>(w, offset);
      net_.Send(q, kServer, MsgType::kOffset, w.Take());
    }

    // Server: check offsets against derived commitments; reconstruct.
    CountingScope scope(net_.Counter(kServer, Phase::kKeyAgreement));
    std::map<PartyId, ScalarOf<G>> offsets;
    for (auto& msg : net_.Take(kServer, MsgType::kOffset)) {
      try {
        ByteReader r(msg.body);
        ScalarOf<G> o = ReadScalar<G>(r);
        r.ExpectDone();
        offsets[msg.from] = o;
      } catch (const DecodeError&) {
        net_.MarkMalformed(msg.index);
      }
    }
    const size_t m = layout_.m();
    d_.assign(m, G::SZero());
    share_comms_.assign(m, std::vector<ElementOf<G>>(layout_.n_dec(), G::Identity()));
    auto valid = [&](size_t c) {
      std::vector<PartyId> v;
      for (PartyId p : layout_.members[c]) {
        if (dealings_.count(p) && !excluded_sharers_.count(p)) v.push_back(p);
      }
      return v;
    };
    std::vector<std::vector<PartyId>> vs(m);
    for (size_t c = 0; c < m; ++c) vs[c] = valid(c);
    if (vs[0].empty()) return Fail("first committee has no valid dealer");
    for (size_t c = 0; c < m; ++c) {
      for (size_t k = 0; k < layout_.n_dec(); ++k) {
        ElementOf<G> prod = G::Identity();
        for (PartyId p : vs[c]) prod = prod * dealings_.at(p).d1[k];
        share_comms_[c][k] = prod;
      }
    }
    for (size_t c = 1; c < m; ++c) {
      std::vector<SharePoint<G>> pts;
      for (size_t k = 0; k < layout_.n_dec(); ++k) {
        PartyId q = layout_.members[c][k];
        if (excluded_members_.count(q)) continue;
        auto it = offsets.find(q);
        if (it == offsets.end()) {
          Exclude(q, "no offset", false);
          if (!net_.Active(q)) unresponsive_.insert(q);
          continue;
        }
        ElementOf<G> prev = G::Identity();
        for (PartyId p : vs[c - 1]) prev = prev * dealings_.at(p).d2[k];
        if (!(G::ExpG(it->second) == share_comms_[c][k] / prev)) {
          Exclude(q, "offset fails commitment check", false);
          continue;
        }
        pts.push_back({static_cast<uint32_t>(k + 1), it->second});
      }
      if (static_cast<int>(pts.size()) < layout_.t) {
        return Fail("committee " + std::to_string(c) + " has " +
                    std::to_string(pts.size()) + " valid offsets, need " +
                    std::to_string(layout_.t));
      }
      d_[c] = d_[c - 1] + Reconstruct<G>(pts, layout_.t);
    }
    for (size_t c = 0; c < m; ++c) {
      int eligible = 0;
      for (PartyId q : layout_.members[c]) eligible += !excluded_members_.count(q);
      if (eligible < layout_.t) {
        return Fail("committee " + std::to_string(c) + " retains " +
                    std::to_string(eligible) + " eligible members, need " +
                    std::to_string(layout_.t));
      }
    }
    pk_ = G::Identity();
    for (PartyId p : vs[0]) pk_ = pk_ * dealings_.at(p).e1.constant;
    for (size_t c = 1; c < m; ++c) {
      ElementOf<G> gd = G::ExpG(d_[c]);
      for (auto& e : share_comms_[c]) e = e / gd;
    }
    return true;
  }

  bool Fail(std::string why) {
    ok_ = false;
    reason_ = std::move(why);
    return false;
  }

  Network& net_;
  CommitteeLayout layout_;
  const std::vector<KeyPair<G>>& lt_;
  Rng rng_;
  std::map<PartyId, Member> members_;
  std::map<PartyId, Dealing> dealings_;
  std::set<PartyId> excluded_sharers_, excluded_members_, unresponsive_;
  std::map<PartyId, std::string> reasons_;
  std::vector<ScalarOf<G>> d_;
  ElementOf<G> pk_;
  std::vector<std::vector<ElementOf<G>>> share_comms_;
  uint32_t ka_round1_ = 0;
  bool ok_ = true;
  std::string reason_;
};

// ---------------------------------------------------------------------------
// Shared key decryption.
//
// The server sends each eligible member the c2 components of its batch; the
// member returns h_i^{sk_j} with a batched proof against g^{sk_j}. The server
// verifies responses in member order until t are valid and interpolates
// h_i^{sk} in the exponent.

template <class G>
struct DecryptionJob {
  size_t committee = 0;
  // (party, share index) of members the server will ask.
  std::vector<std::pair<PartyId, uint32_t>> members;
  std::vector<ElementOf<G>> share_comms;  // by share index - 1
  std::vector<Ciphertext<G>> cts;

  // Outputs.
  bool ok = false;
  std::string reason;
  std::vector<ElementOf<G>> plaintexts;
  std::vector<PartyId> used;      // responders whose shares were interpolated
  std::vector<PartyId> rejected;  // responders whose proofs failed
  std::vector<PartyId> silent;    // members that sent no usable response
};

template <class G>
Bytes DecryptionContext(size_t committee, uint32_t index, uint32_t round) {
  ByteWriter w;
  w.Raw(reinterpret_cast<const uint8_t*>("decrypt"), 7);
  w.U32(static_cast<uint32_t>(committee));
  w.U32(index);
  w.U32(round);
  return w.Take();
}

// Runs all jobs in parallel: one round with Fiat-Shamir proofs, two with
// interactive challenges. `share_of` is the member's own key share.
template <class G>
void RunDecryptionRounds(Network& net, std::vector<DecryptionJob<G>>& jobs, int t,
                         ChallengeMode mode,
                         const std::function<const ScalarOf<G>*(PartyId)>& share_of,
                         const AdversarySpec* adversary, const Rng& rng) {
  net.BeginRound();
  const uint32_t round = net.round();
  for (auto& job : jobs) {
    for (auto [p, idx] : job.members) {
      ByteWriter w;
      w.U32(static_cast<uint32_t>(job.cts.size()));
      for (const auto& ct : job.cts) WriteElement<G>(w, ct.c2);
      net.Send(kServer, p, MsgType::kDecRequest, w.Take());
    }
  }

  // Members.
  struct Pending {
    std::unique_ptr<PartialDecProver<G>> prover;
  };
  std::map<PartyId, Pending> pending;
  for (auto& job : jobs) {
    for (auto [p, idx] : job.members) {
      auto msg = net.TakeFrom(p, MsgType::kDecRequest, kServer);
      if (!msg || !net.Active(p)) continue;
      const ScalarOf<G>* share = share_of(p);
      if (share == nullptr) continue;
      const Misbehavior* mb = adversary ? adversary->Find(p) : nullptr;
      Rng prng = rng.Fork("decrypt-member", p);
      ByteWriter w;
      try {
        Charged(net, p, Phase::kDecryption, [&] {
          ByteReader r(msg->body);
          uint32_t k = r.U32();
          if (k > r.remaining() / G::kElementBytes) throw DecodeError("bad count");
          std::vector<ElementOf<G>> hs;
          for (uint32_t i = 0; i < k; ++i) hs.push_back(ReadElement<G>(r));
          r.ExpectDone();
          auto prover = std::make_unique<PartialDecProver<G>>(*share, hs, prng);
          std::vector<ElementOf<G>> vs = prover->vs();
          if (mb && mb->bad_partial_dec) vs[0] = vs[0] * G::Generator();
          if (mode == ChallengeMode::kFiatShamir) {
            auto u = PartialDecChallenge<G>(DecryptionContext<G>(job.committee, idx, round),
                                            job.share_comms[idx - 1], hs, prover->vs(),
                                            prover->A(), prover->Bs());
            auto proof = prover->Respond(u);
            for (const auto& v : vs) WriteElement<G>(w, v);
            WritePartialDecCompact<G>(w, proof);
          } else {
            for (const auto& v : vs) WriteElement<G>(w, v);
            WriteElement<G>(w, prover->A());
            for (const auto& b : prover->Bs()) WriteElement<G>(w, b);
            pending[p].prover = std::move(prover);
          }
        });
      } catch (const DecodeError&) {
        continue;
      }
      net.Send(p, kServer, MsgType::kDecResponse, w.Take());
    }
  }

  // Server: collect responses per job.
  struct Response {
    uint32_t idx;
    size_t msg_index;
    std::vector<ElementOf<G>> vs;
    ElementOf<G> A;
    std::vector<ElementOf<G>> Bs;
    ScalarOf<G> e, u;
  };
  std::map<PartyId, Response> responses;
  for (auto& msg : net.Take(kServer, MsgType::kDecResponse)) {
    for (auto& job : jobs) {
      for (auto [p, idx] : job.members) {
        if (p != msg.from) continue;
        try {
          ByteReader r(msg.body);
          Response resp;
          resp.idx = idx;
          resp.msg_index = msg.index;
          for (size_t i = 0; i < job.cts.size(); ++i) resp.vs.push_back(ReadElement<G>(r));
          if (mode == ChallengeMode::kFiatShamir) {
            resp.e = ReadScalar<G>(r);
            resp.u = ReadScalar<G>(r);
          } else {
            resp.A = ReadElement<G>(r);
            for (size_t i = 0; i < job.cts.size(); ++i) resp.Bs.push_back(ReadElement<G>(r));
          }
          r.ExpectDone();
          responses[p] = std::move(resp);
        } catch (const DecodeError&) {
          net.MarkMalformed(msg.index);
        }
      }
    }
  }

  if (mode == ChallengeMode::kInteractive) {
    net.BeginRound();
    Rng server_rng = rng.Fork("decrypt-server-challenges");
    for (auto& [p, resp] : responses) {
      resp.u = G::SRandom(server_rng);
      ByteWriter w;
      WriteScalar<G>(w, resp.u);
      net.Send(kServer, p, MsgType::kDecChallenge, w.Take());
    }
    for (auto& [p, pend] : pending) {
      auto msg = net.TakeFrom(p, MsgType::kDecChallenge, kServer);
      if (!msg || !net.Active(p)) continue;
      ScalarOf<G> u;
      try {
        ByteReader r(msg->body);
        u = ReadScalar<G>(r);
      } catch (const DecodeError&) {
        continue;
      }
      ByteWriter w;
      WriteScalar<G>(w, pend.prover->Respond(u).e);
      net.Send(p, kServer, MsgType::kDecAnswer, w.Take());
    }
    std::set<PartyId> answered;
    for (auto& msg : net.Take(kServer, MsgType::kDecAnswer)) {
      auto it = responses.find(msg.from);
      if (it == responses.end()) continue;
      try {
        ByteReader r(msg.body);
        it->second.e = ReadScalar<G>(r);
        r.ExpectDone();
        answered.insert(msg.from);
      } catch (const DecodeError&) {
        net.MarkMalformed(msg.index);
      }
    }
    for (auto it = responses.begin(); it != responses.end();) {
      it = answered.count(it->first) ? std::next(it) : responses.erase(it);
    }
  }

  CountingScope scope(net.Counter(kServer, Phase::kDecryption));
  for (auto& job : jobs) {
    std::vector<ElementOf<G>> hs;
    for (const auto& ct : job.cts) hs.push_back(ct.c2);
    for (auto [p, idx] : job.members) {
      if (!responses.count(p)) job.silent.push_back(p);
    }
    std::vector<uint32_t> indices;
    std::vector<std::vector<ElementOf<G>>> vss;
    for (auto [p, idx] : job.members) {
      if (static_cast<int>(indices.size()) == t) break;
      auto it = responses.find(p);
      if (it == responses.end()) continue;
      const Response& resp = it->second;
      bool good;
      if (mode == ChallengeMode::kFiatShamir) {
        good = VerifyPartialDecCompact<G>(job.share_comms[idx - 1], hs, resp.vs, resp.e,
                                          resp.u,
                                          DecryptionContext<G>(job.committee, idx, round));
      } else {
        good = VerifyPartialDec<G>(job.share_comms[idx - 1], hs, resp.vs,
                                   {resp.A, resp.Bs, resp.e, resp.u});
      }
      if (!good) {
        job.rejected.push_back(p);
        continue;
      }
      job.used.push_back(p);
      indices.push_back(idx);
      vss.push_back(resp.vs);
    }
    if (static_cast<int>(indices.size()) < t) {
      job.ok = false;
      job.reason = "committee " + std::to_string(job.committee) + " returned " +
                   std::to_string(indices.size()) + " valid partial decryptions, need " +
                   std::to_string(t);
      continue;
    }
    auto hsk = InterpolateInExponentBatch<G>(indices, vss, t);
    job.plaintexts.clear();
    for (size_t i = 0; i < job.cts.size(); ++i) {
      job.plaintexts.push_back(job.cts[i].c1 / hsk[i]);
    }
    job.ok = true;
  }
}

}  // namespace shufflestack

#endif  // SHUFFLESTACK_COMMITTEE_H_
