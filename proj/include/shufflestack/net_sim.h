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

#ifndef SHUFFLESTACK_NET_SIM_H_
#define SHUFFLESTACK_NET_SIM_H_

#include <algorithm>
#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "shufflestack/common.h"
#include "shufflestack/exp_counter.h"
#include "shufflestack/rng.h"

namespace shufflestack {

// Star-topology, round-based network. Clients talk only to the server; a
// round is the server's outgoing messages followed by the clients' replies.
// Every message is an envelope plus a serialized body, and both count toward
// the byte totals.

inline constexpr size_t kEnvelopeBytes = 16;

enum class Phase : uint8_t {
  kChannelSetup,
  kKeyAgreement,
  kEncryption,
  kShuffle,
  kDecryption,
};
inline constexpr size_t kNumPhases = 5;

inline const char* PhaseName(Phase p) {
  static constexpr const char* kNames[] = {"channel_setup", "key_agreement",
                                           "encryption", "shuffle", "decryption"};
  return kNames[static_cast<size_t>(p)];
}

enum class MsgType : uint16_t {
  kShares = 1,       // sharer -> server: commitments and sealed shares
  kRelay,            // server -> member: sealed shares and derived commitments
  kComplaints,       // member -> server: fault reports with evidence
  kAdjudication,     // server -> member: excluded sharers
  kOffset,           // member -> server: offset share
  kKeyInfo,          // server -> client: encryption key and committee offset
  kInput,            // client -> server: encrypted input
  kShuffleRequest,   // server -> shuffler: current ciphertext list
  kShuffleResponse,  // shuffler -> server: shuffled list and proof
  kDecRequest,       // server -> member: decryption bases
  kDecResponse,      // member -> server: partial decryptions and proof
  kDecChallenge,     // server -> member: interactive challenge
  kDecAnswer,        // member -> server: interactive response
};

inline const char* MsgTypeName(MsgType t) {
  switch (t) {
    case MsgType::kShares: return "shares";
    case MsgType::kRelay: return "relay";
    case MsgType::kComplaints: return "complaints";
    case MsgType::kAdjudication: return "adjudication";
    case MsgType::kOffset: return "offset";
    case MsgType::kKeyInfo: return "key_info";
    case MsgType::kInput: return "input";
    case MsgType::kShuffleRequest: return "shuffle_request";
    case MsgType::kShuffleResponse: return "shuffle_response";
    case MsgType::kDecRequest: return "dec_request";
    case MsgType::kDecResponse: return "dec_response";
    case MsgType::kDecChallenge: return "dec_challenge";
    case MsgType::kDecAnswer: return "dec_answer";
  }
  return "unknown";
}

struct RoundMessage {
  uint32_t round = 0;
  PartyId from = 0;
  PartyId to = 0;
  MsgType type = MsgType::kShares;
  uint64_t size = 0;  // envelope + body
  Bytes payload;      // envelope + body; empty unless payloads are kept
  bool arrived_late = false;
  bool malformed = false;
  bool discarded = false;  // addressed to a party that had dropped out
};

// Static dropout schedule: a party stops responding from the given round on.
// Late rounds mark a party's messages in those rounds as arriving after the
// deadline; they are recorded but never delivered.
struct DropoutSchedule {
  std::map<PartyId, uint32_t> drop_round;
  std::map<PartyId, std::set<uint32_t>> late_rounds;
};

// Behavior overrides of one statically corrupted client.
struct Misbehavior {
  bool bad_share = false;         // sends an inconsistent share
  bool false_report = false;      // accuses an honest sharer
  bool bad_offset = false;        // reports a wrong offset
  bool bad_partial_dec = false;   // returns wrong partial decryptions
  bool bad_shuffle = false;       // replaces a ciphertext in its shuffle
  bool substitute_input = false;  // encrypts a different input
  std::optional<uint32_t> go_silent;  // sends nothing from this round on
  std::optional<uint32_t> malformed;  // garbles its message in this round
};

struct AdversarySpec {
  std::map<PartyId, Misbehavior> corrupt;

  const Misbehavior* Find(PartyId p) const {
    auto it = corrupt.find(p);
    return it == corrupt.end() ? nullptr : &it->second;
  }
};

struct Delivered {
  PartyId from;
  size_t index;  // position in the transcript
  Bytes body;
};

class Network {
 public:
  Network(uint32_t n_clients, DropoutSchedule dropouts,
          const AdversarySpec* adversary, bool keep_payloads, uint64_t seed)
      : n_(n_clients),
        dropouts_(std::move(dropouts)),
        adversary_(adversary),
        keep_payloads_(keep_payloads),
        garble_rng_(Rng(seed).Fork("network/garble")),
        sent_(n_clients + 1, 0),
        received_(n_clients + 1, 0),
        exps_(n_clients + 1) {}

  uint32_t n_clients() const { return n_; }
  uint32_t round() const { return round_; }

  void BeginRound() {
    ++round_;
    inbox_.clear();
  }

  // Whether p still takes part in the current round.
  bool Active(PartyId p) const {
    if (p == kServer) return true;
    auto it = dropouts_.drop_round.find(p);
    if (it != dropouts_.drop_round.end() && round_ >= it->second) return false;
    if (adversary_ != nullptr) {
      if (const Misbehavior* mb = adversary_->Find(p)) {
        if (mb->go_silent && round_ >= *mb->go_silent) return false;
      }
    }
    return true;
  }

  // Queues body from -> to for the current round. Messages from inactive
  // parties are never sent; messages to inactive parties are sent but
  // discarded; late ones are recorded but not delivered.
  void Send(PartyId from, PartyId to, MsgType type, Bytes body) {
    if (!Active(from)) return;
    if (from != kServer && adversary_ != nullptr) {
      const Misbehavior* mb = adversary_->Find(from);
      if (mb != nullptr && mb->malformed && *mb->malformed == round_) {
        garble_rng_.Fill(body.data(), body.size());
        if (!body.empty()) body[0] ^= 0xff;
      }
    }
    RoundMessage msg;
    msg.round = round_;
    msg.from = from;
    msg.to = to;
    msg.type = type;
    msg.size = kEnvelopeBytes + body.size();
    if (keep_payloads_) {
      ByteWriter env;
      env.U32(round_);
      env.U32(from);
      env.U32(to);
      env.U16(static_cast<uint16_t>(type));
      env.U16(0);
      msg.payload = env.Take();
      msg.payload.insert(msg.payload.end(), body.begin(), body.end());
    }
    sent_[Slot(from)] += msg.size;
    if (from != kServer) {
      auto it = dropouts_.late_rounds.find(from);
      if (it != dropouts_.late_rounds.end() && it->second.count(round_)) {
        msg.arrived_late = true;
      }
    }
    if (!msg.arrived_late && !Active(to)) msg.discarded = true;
    const bool deliver = !msg.arrived_late && !msg.discarded;
    if (deliver) received_[Slot(to)] += msg.size;
    transcript_.push_back(std::move(msg));
    if (deliver) {
      inbox_[{to, static_cast<uint16_t>(type)}].push_back(
          {from, transcript_.size() - 1, std::move(body)});
    }
  }

  // Messages of `type` delivered to `to` this round, ordered by sender.
  std::vector<Delivered> Take(PartyId to, MsgType type) {
    auto it = inbox_.find({to, static_cast<uint16_t>(type)});
    if (it == inbox_.end()) return {};
    std::vector<Delivered> out = std::move(it->second);
    inbox_.erase(it);
    std::stable_sort(out.begin(), out.end(), [](const Delivered& a, const Delivered& b) {
      return a.from < b.from;
    });
    return out;
  }

  // Optional single message from `from`.
  std::optional<Delivered> TakeFrom(PartyId to, MsgType type, PartyId from) {
    auto key = std::make_pair(to, static_cast<uint16_t>(type));
    auto it = inbox_.find(key);
    if (it == inbox_.end()) return std::nullopt;
    auto& v = it->second;
    for (size_t i = 0; i < v.size(); ++i) {
      if (v[i].from == from) {
        Delivered d = std::move(v[i]);
        v.erase(v.begin() + i);
        return d;
      }
    }
    return std::nullopt;
  }

  void MarkMalformed(size_t index) { transcript_[index].malformed = true; }

  ExpCounter* Counter(PartyId p, Phase phase) {
    return &exps_[Slot(p)][static_cast<size_t>(phase)];
  }

  const std::vector<RoundMessage>& transcript() const { return transcript_; }
  std::vector<RoundMessage> TakeTranscript() { return std::move(transcript_); }
  const std::vector<uint64_t>& bytes_sent() const { return sent_; }
  const std::vector<uint64_t>& bytes_received() const { return received_; }
  std::vector<std::array<uint64_t, kNumPhases>> ExpTotals() const {
    std::vector<std::array<uint64_t, kNumPhases>> out(exps_.size());
    for (size_t i = 0; i < exps_.size(); ++i) {
      for (size_t k = 0; k < kNumPhases; ++k) out[i][k] = exps_[i][k].exps;
    }
    return out;
  }

  size_t Slot(PartyId p) const { return p == kServer ? n_ : p; }

 private:
  uint32_t n_;
  DropoutSchedule dropouts_;
  const AdversarySpec* adversary_;
  bool keep_payloads_;
  Rng garble_rng_;
  uint32_t round_ = 0;
  std::vector<RoundMessage> transcript_;
  std::map<std::pair<PartyId, uint16_t>, std::vector<Delivered>> inbox_;
  std::vector<uint64_t> sent_, received_;
  std::vector<std::array<ExpCounter, kNumPhases>> exps_;
};

// Runs `fn` with exponentiations charged to party p in `phase`.
template <class Fn>
auto Charged(Network& net, PartyId p, Phase phase, Fn&& fn) {
  CountingScope scope(net.Counter(p, phase));
  return fn();
}

// ---------------------------------------------------------------------------
// Results.

enum class Outcome { kOk, kAbort, kBottom };

inline const char* OutcomeName(Outcome o) {
  switch (o) {
    case Outcome::kOk: return "ok";
    case Outcome::kAbort: return "abort";
    case Outcome::kBottom: return "bottom";
  }
  return "unknown";
}

struct SimResult {
  Outcome outcome = Outcome::kOk;
  std::string reason;
  // Decoded payloads in server output order; undecodable items are counted
  // but not listed.
  std::vector<Bytes> output;
  uint64_t undecodable = 0;
  // Ground truth kept by the simulator, never visible to the server: the
  // client whose input sits at each output position (-1 for padding).
  std::vector<int64_t> provenance;
  // Public arrangement permutation (alternating protocol).
  std::vector<uint32_t> public_perm;
  // Composition of accepted shuffles per iteration and row (alternating),
  // or one entry for the single instance (amortized).
  std::vector<std::vector<std::vector<uint32_t>>> row_perms;
  uint32_t rounds_used = 0;
  std::vector<RoundMessage> transcript;
  uint32_t n_clients = 0;
  std::vector<uint64_t> bytes_sent;      // index n_clients is the server
  std::vector<uint64_t> bytes_received;  // index n_clients is the server
  std::vector<std::array<uint64_t, kNumPhases>> exps;
  std::map<PartyId, std::string> excluded;  // party -> reason
  std::set<PartyId> dropped_out;
  std::vector<PartyId> shufflers;
  std::vector<std::vector<PartyId>> committees;

  uint64_t ClientBytes(PartyId p) const { return bytes_sent[p] + bytes_received[p]; }
  uint64_t DiscardedBytes() const {
    uint64_t d = 0;
    for (const auto& m : transcript) {
      if (m.arrived_late || m.discarded) d += m.size;
    }
    return d;
  }
};

inline std::string PartyName(PartyId p) {
  return p == kServer ? "server" : std::to_string(p);
}

// One JSON object per message, payload in hex.
inline void WriteTranscriptJsonl(std::ostream& os,
                                 const std::vector<RoundMessage>& transcript) {
  for (const auto& m : transcript) {
    nlohmann::ordered_json j;
    j["round"] = m.round;
    j["from"] = PartyName(m.from);
    j["to"] = PartyName(m.to);
    j["type"] = MsgTypeName(m.type);
    j["size"] = m.size;
    j["arrived_late"] = m.arrived_late;
    j["malformed"] = m.malformed;
    j["discarded"] = m.discarded;
    j["payload"] = ToHex(m.payload);
    os << j.dump() << "\n";
  }
}

inline nlohmann::ordered_json SimResultJson(const SimResult& r) {
  nlohmann::ordered_json j;
  j["result"] = OutcomeName(r.outcome);
  j["reason"] = r.reason;
  j["rounds_used"] = r.rounds_used;
  std::vector<std::string> out;
  for (const auto& b : r.output) out.push_back(ToHex(b));
  j["output"] = out;
  j["undecodable"] = r.undecodable;
  j["public_perm"] = r.public_perm;
  uint64_t max_b = 0, sum_b = 0;
  for (PartyId p = 0; p < r.n_clients; ++p) {
    max_b = std::max(max_b, r.ClientBytes(p));
    sum_b += r.ClientBytes(p);
  }
  j["bytes_worst_client"] = max_b;
  j["bytes_avg_client"] = r.n_clients ? static_cast<double>(sum_b) / r.n_clients : 0.0;
  j["server_bytes_sent"] = r.bytes_sent.empty() ? 0 : r.bytes_sent.back();
  j["server_bytes_received"] = r.bytes_received.empty() ? 0 : r.bytes_received.back();
  nlohmann::ordered_json exps;
  for (size_t k = 0; k < kNumPhases; ++k) {
    uint64_t mx = 0;
    for (PartyId p = 0; p < r.n_clients; ++p) mx = std::max(mx, r.exps[p][k]);
    exps[PhaseName(static_cast<Phase>(k))] = mx;
  }
  j["max_client_exps"] = exps;
  nlohmann::ordered_json excl = nlohmann::ordered_json::object();
  for (const auto& [p, why] : r.excluded) excl[std::to_string(p)] = why;
  j["excluded"] = excl;
  j["dropped_out"] = std::vector<PartyId>(r.dropped_out.begin(), r.dropped_out.end());
  j["messages"] = r.transcript.size();
  return j;
}

// ---------------------------------------------------------------------------
// Aggregates over seeds.

struct Measurement {
  uint64_t runs = 0;
  uint64_t bytes_worst_client = 0;  // max over runs and clients
  double bytes_avg_client = 0;      // mean over runs of the per-run average
  uint32_t rounds_best = 0;
  uint32_t rounds_worst = 0;
  std::array<uint64_t, kNumPhases> max_exps{};  // max over clients and runs
  std::array<double, kNumPhases> avg_exps{};    // mean over clients and runs
  PartyId worst_client = 0;                     // in the last run
};

inline Measurement Measure(const std::function<SimResult(uint64_t)>& run,
                           const std::vector<uint64_t>& seeds) {
  Measurement m;
  m.rounds_best = ~0u;
  for (uint64_t seed : seeds) {
    SimResult r = run(seed);
    ++m.runs;
    uint64_t sum = 0;
    for (PartyId p = 0; p < r.n_clients; ++p) {
      uint64_t b = r.ClientBytes(p);
      sum += b;
      if (b >= m.bytes_worst_client) {
        m.bytes_worst_client = b;
        m.worst_client = p;
      }
      for (size_t k = 0; k < kNumPhases; ++k) {
        m.max_exps[k] = std::max(m.max_exps[k], r.exps[p][k]);
        m.avg_exps[k] += static_cast<double>(r.exps[p][k]) / r.n_clients;
      }
    }
    m.bytes_avg_client += static_cast<double>(sum) / r.n_clients;
    m.rounds_best = std::min(m.rounds_best, r.rounds_used);
    m.rounds_worst = std::max(m.rounds_worst, r.rounds_used);
  }
  if (m.runs > 0) {
    m.bytes_avg_client /= m.runs;
    for (auto& a : m.avg_exps) a /= m.runs;
  } else {
    m.rounds_best = 0;
  }
  return m;
}

}  // namespace shufflestack

#endif  // SHUFFLESTACK_NET_SIM_H_
