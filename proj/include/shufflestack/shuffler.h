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

#ifndef SHUFFLESTACK_SHUFFLER_H_
#define SHUFFLESTACK_SHUFFLER_H_

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "shufflestack/alternating.h"
#include "shufflestack/committee.h"
#include "shufflestack/common.h"
#include "shufflestack/elgamal.h"
#include "shufflestack/net_sim.h"
#include "shufflestack/rng.h"
#include "shufflestack/zk.h"

namespace shufflestack {

enum class ProtocolKind { kAmortized, kAlternating };

inline const char* ProtocolName(ProtocolKind k) {
  return k == ProtocolKind::kAmortized ? "amortized" : "alternating";
}

inline ProtocolKind ParseProtocol(const std::string& s) {
  if (s == "amortized") return ProtocolKind::kAmortized;
  if (s == "alternating") return ProtocolKind::kAlternating;
  throw ConfigInvalid("unknown protocol '" + s + "'");
}

struct ProtocolConfig {
  uint32_t n = 0;
  uint32_t h = 0, w = 0, ell = 1;  // alternating grid and iterations
  uint32_t n_dec = 0, m = 0, t = 0;
  uint32_t n_shuf = 0, d = 0;
  uint32_t sigma_rep = 10;
  // Number of shuffle committees in the alternating protocol; 0 picks
  // max(h, w) so every row instance of one iteration has its own committee.
  uint32_t shuffle_committees = 0;
  double gamma = 0, alpha = 0;
  uint32_t payload_bytes = 16;
  ChallengeMode challenge = ChallengeMode::kFiatShamir;

  uint32_t ShuffleCommittees() const {
    return shuffle_committees ? shuffle_committees : std::max(h, w);
  }

  void Validate(ProtocolKind kind) const {
    auto fail = [](const std::string& why) { throw ConfigInvalid(why); };
    if (n < 1) fail("n must be positive");
    if (m < 1 || n_dec < 1) fail("need at least one committee of one member");
    if (t < 1 || t > n_dec) fail("need 1 <= t <= n_dec");
    if (static_cast<uint64_t>(m) * n_dec > n) fail("m * n_dec exceeds n");
    if (n_shuf < 1 || n_shuf > n) fail("need 1 <= n_shuf <= n");
    if (d >= n_shuf) fail("need d < n_shuf");
    if (sigma_rep < 1) fail("sigma_rep must be positive");
    if (!(gamma >= 0 && gamma <= 1) || !(alpha >= 0 && alpha <= 1)) {
      fail("gamma and alpha must lie in [0, 1]");
    }
    if (payload_bytes < 1) fail("payload_bytes must be positive");
    if (kind == ProtocolKind::kAlternating) {
      if (static_cast<uint64_t>(h) * w != n) fail("need h * w = n");
      if (ell < 1) fail("the alternating protocol needs ell >= 1");
    }
  }
};

// Distinct default inputs: each client's id, little-endian, padded.
inline std::vector<Bytes> DefaultInputs(uint32_t n, uint32_t payload_bytes) {
  std::vector<Bytes> out(n, Bytes(payload_bytes, 0));
  for (uint32_t p = 0; p < n; ++p) {
    for (uint32_t i = 0; i < payload_bytes && i < 4; ++i) {
      out[p][i] = static_cast<uint8_t>(p >> (8 * i));
    }
  }
  return out;
}

// Parties in the roles of one run, from a seed-derived permutation of the
// clients. Decryption committees come first; shuffle committees follow and
// wrap around when there are not enough clients.
struct RoleAssignment {
  CommitteeLayout decryption;
  std::vector<std::vector<PartyId>> shuffle_committees;
};

inline RoleAssignment AssignRoles(ProtocolKind kind, const ProtocolConfig& cfg,
                                  const Rng& root) {
  Rng rng = root.Fork("assignment");
  std::vector<uint32_t> order = rng.Permutation(cfg.n);
  RoleAssignment a;
  a.decryption.t = static_cast<int>(cfg.t);
  size_t pos = 0;
  for (uint32_t c = 0; c < cfg.m; ++c) {
    a.decryption.members.emplace_back();
    for (uint32_t k = 0; k < cfg.n_dec; ++k) a.decryption.members.back().push_back(order[pos++]);
  }
  const uint32_t count = kind == ProtocolKind::kAmortized ? 1 : cfg.ShuffleCommittees();
  for (uint32_t c = 0; c < count; ++c) {
    a.shuffle_committees.emplace_back();
    for (uint32_t k = 0; k < cfg.n_shuf; ++k) {
      a.shuffle_committees.back().push_back(order[pos++ % cfg.n]);
    }
  }
  return a;
}

// ---------------------------------------------------------------------------
// One verifiable ciphertext shuffle: the shufflers of a committee take turns
// until n_shuf - d have shuffled validly. An invalid or missing shuffle costs
// one failure and leaves the list unchanged; d + 1 failures abort.

template <class G>
struct ShuffleInstance {
  enum class State { kRunning, kDone, kAborted };

  uint32_t id = 0;
  std::vector<PartyId> shufflers;
  ElementOf<G> key;
  size_t width = 1;
  std::vector<Ciphertext<G>> cts;
  // Simulator ground truth: composed[j] is the input item now at position j.
  std::vector<uint32_t> composed;
  size_t next = 0;
  uint32_t valid = 0, failures = 0;
  State state = State::kRunning;
  std::optional<PartyId> current;

  size_t items() const { return cts.size() / width; }
};

inline Bytes ShuffleContext(uint32_t instance, PartyId shuffler, uint32_t round) {
  ByteWriter w;
  w.Raw(reinterpret_cast<const uint8_t*>("shuffle"), 7);
  w.U32(instance);
  w.U32(shuffler);
  w.U32(round);
  return w.Take();
}

template <class G>
class ProtocolRun {
 public:
  ProtocolRun(ProtocolKind kind, ProtocolConfig cfg, std::vector<Bytes> inputs,
              AdversarySpec adversary, DropoutSchedule dropouts, uint64_t seed,
              bool keep_payloads = false)
      : kind_(kind),
        cfg_(std::move(cfg)),
        inputs_(std::move(inputs)),
        adversary_(std::move(adversary)),
        root_(seed),
        codec_(MakeCodec(cfg_)),
        net_(cfg_.n, std::move(dropouts), &adversary_, keep_payloads, seed) {
    cfg_.Validate(kind_);
    if (inputs_.size() != cfg_.n) {
      throw ConfigInvalid("expected " + std::to_string(cfg_.n) + " inputs, got " +
                          std::to_string(inputs_.size()));
    }
    for (const auto& in : inputs_) {
      if (in.size() > cfg_.payload_bytes) throw ConfigInvalid("input exceeds payload_bytes");
    }
    for (const auto& [p, mb] : adversary_.corrupt) {
      if (p >= cfg_.n) throw ConfigInvalid("corrupt party out of range");
    }
    roles_ = AssignRoles(kind_, cfg_, root_);
  }

  // Test hook: overrides the permutation a shuffler draws for an instance.
  using PermHook = std::function<std::optional<std::vector<uint32_t>>(
      PartyId shuffler, uint32_t instance, uint32_t items)>;
  void SetPermutationHook(PermHook hook) { perm_hook_ = std::move(hook); }

  SimResult Run() {
    keys_ = LongTermKeys<G>(cfg_.n, root_.Fork("pki"));
    KeyAgreement<G> ka(net_, roles_.decryption, keys_, &adversary_,
                       root_.Fork("key-agreement"));
    ka.ChannelSetup();
    const bool ka_ok = ka.RunRounds1To3();
    for (const auto& [p, why] : ka.excluded()) result_.excluded.emplace(p, why);
    for (PartyId p : ka.unresponsive()) dropped_.insert(p);
    if (!ka_ok) return Finish(Outcome::kAbort, "key agreement: " + ka.reason());

    // Server's key offset for the shuffle phase.
    Rng server_rng = root_.Fork("server");
    const ScalarOf<G> offset = G::SRandom(server_rng);
    ElementOf<G> shuffle_key;
    {
      CountingScope scope(net_.Counter(kServer, Phase::kEncryption));
      shuffle_key = ka.pk() * G::ExpG(offset);
    }
    const ElementOf<G> enc_key =
        kind_ == ProtocolKind::kAmortized ? shuffle_key : ka.pk();
    ka.Round4Send(enc_key);
    ClientsEncrypt(ka);

    std::vector<Ciphertext<G>> cts;
    std::vector<int64_t> prov;
    CollectInputs(&cts, &prov);

    std::vector<Ciphertext<G>> shuffled;
    if (kind_ == ProtocolKind::kAmortized) {
      if (!RunAmortizedShuffle(shuffle_key, cts, prov, &shuffled)) {
        return Finish(Outcome::kAbort, reason_);
      }
    } else {
      if (!RunAlternatingShuffle(ka.pk(), offset, shuffle_key, cts, prov, &shuffled)) {
        return Finish(Outcome::kAbort, reason_);
      }
    }
    {
      CountingScope scope(net_.Counter(kServer, Phase::kShuffle));
      for (auto& ct : shuffled) ct = ShiftKey<G>(ct, -offset);
    }

    if (!dropped_.empty() &&
        static_cast<double>(dropped_.size()) >= cfg_.alpha * cfg_.n - 1e-9) {
      return Finish(Outcome::kBottom,
                    std::to_string(dropped_.size()) + " dropouts reach alpha * n");
    }
    if (!Decrypt(ka, shuffled)) return Finish(Outcome::kAbort, reason_);
    return Finish(Outcome::kOk, "");
  }

 private:
  static PayloadCodec<G> MakeCodec(const ProtocolConfig& cfg) {
    try {
      return PayloadCodec<G>(cfg.payload_bytes);
    } catch (const ConfigInvalid&) {
      throw;
    } catch (const Error& e) {
      throw ConfigInvalid(e.what());
    }
  }

  size_t width() const { return codec_.ElementsPerPayload(); }

  const Misbehavior* Mb(PartyId p) const { return adversary_.Find(p); }

  void ClientsEncrypt(KeyAgreement<G>& ka) {
    for (PartyId p = 0; p < cfg_.n; ++p) {
      auto key = ka.ClientReceiveKeyInfo(p);
      if (!key || !net_.Active(p)) continue;
      Bytes payload = inputs_[p];
      const Misbehavior* mb = Mb(p);
      if (mb && mb->substitute_input) {
        payload.resize(cfg_.payload_bytes, 0);
        payload.back() ^= 0x80;
      }
      Rng rng = root_.Fork("client-encrypt", p);
      ByteWriter w;
      Charged(net_, p, Phase::kEncryption, [&] {
        for (const auto& e : codec_.Encode(payload)) {
          WriteCiphertext<G>(w, Encrypt<G>(*key, e, rng));
        }
      });
      net_.Send(p, kServer, MsgType::kInput, w.Take());
    }
  }

  void CollectInputs(std::vector<Ciphertext<G>>* cts, std::vector<int64_t>* prov) {
    std::set<PartyId> got;
    for (auto& msg : net_.Take(kServer, MsgType::kInput)) {
      try {
        ByteReader r(msg.body);
        std::vector<Ciphertext<G>> mine;
        for (size_t c = 0; c < width(); ++c) mine.push_back(ReadCiphertext<G>(r));
        r.ExpectDone();
        cts->insert(cts->end(), mine.begin(), mine.end());
        prov->push_back(msg.from);
        got.insert(msg.from);
      } catch (const DecodeError&) {
        net_.MarkMalformed(msg.index);
        result_.excluded.emplace(msg.from, "malformed input");
      }
    }
    for (PartyId p = 0; p < cfg_.n; ++p) {
      if (got.count(p) || result_.excluded.count(p)) continue;
      dropped_.insert(p);
    }
  }

  // Server-side padding for empty grid slots: an encryption of a group
  // element that does not decode as a payload.
  std::vector<Ciphertext<G>> DummyTuple(const ElementOf<G>& pk, Rng& rng) {
    CountingScope scope(net_.Counter(kServer, Phase::kEncryption));
    std::vector<Ciphertext<G>> t;
    for (size_t c = 0; c < width(); ++c) {
      t.push_back(Encrypt<G>(pk, G::Inverse(G::Generator()), rng));
    }
    return t;
  }

  ShuffleInstance<G> NewInstance(const ElementOf<G>& key, std::vector<PartyId> shufflers,
                                 std::vector<Ciphertext<G>> cts) {
    ShuffleInstance<G> inst;
    inst.id = next_instance_++;
    inst.shufflers = std::move(shufflers);
    inst.key = key;
    inst.width = width();
    inst.cts = std::move(cts);
    inst.composed.resize(inst.items());
    std::iota(inst.composed.begin(), inst.composed.end(), 0u);
    return inst;
  }

  // Picks the next shuffler of inst, skipping parties already known to be
  // gone; each skip is a failure that costs no round.
  void Advance(ShuffleInstance<G>& inst) {
    using S = typename ShuffleInstance<G>::State;
    inst.current.reset();
    while (inst.state == S::kRunning) {
      if (inst.valid >= cfg_.n_shuf - cfg_.d) {
        inst.state = S::kDone;
        return;
      }
      if (inst.failures > cfg_.d) {
        inst.state = S::kAborted;
        return;
      }
      if (inst.next >= inst.shufflers.size()) {
        inst.state = S::kAborted;
        return;
      }
      PartyId p = inst.shufflers[inst.next++];
      if (known_gone_.count(p)) {
        ++inst.failures;
        continue;
      }
      inst.current = p;
      return;
    }
  }

  // Runs one round for every instance in `active` that has a shuffler
  // waiting. All instances must already be Advance()d.
  void ShuffleRound(std::vector<ShuffleInstance<G>*>& active) {
    net_.BeginRound();
    const uint32_t round = net_.round();
    std::map<uint32_t, ShuffleInstance<G>*> by_id;
    for (auto* inst : active) {
      if (!inst->current) continue;
      by_id[inst->id] = inst;
      ByteWriter w;
      w.U32(inst->id);
      WriteElement<G>(w, inst->key);
      w.U32(static_cast<uint32_t>(inst->items()));
      for (const auto& ct : inst->cts) WriteCiphertext<G>(w, ct);
      net_.Send(kServer, *inst->current, MsgType::kShuffleRequest, w.Take());
    }

    // Shufflers.
    std::set<PartyId> targets;
    for (auto& [id, inst] : by_id) targets.insert(*inst->current);
    for (PartyId p : targets) {
      for (auto& msg : net_.Take(p, MsgType::kShuffleRequest)) {
        if (!net_.Active(p)) continue;
        ShufflerRespond(p, msg.body, round);
      }
    }

    // Server verification.
    std::set<uint32_t> answered;
    {
      CountingScope scope(net_.Counter(kServer, Phase::kShuffle));
      for (auto& msg : net_.Take(kServer, MsgType::kShuffleResponse)) {
        ShuffleInstance<G>* inst = nullptr;
        try {
          ByteReader r(msg.body);
          uint32_t id = r.U32();
          auto it = by_id.find(id);
          if (it == by_id.end() || *it->second->current != msg.from || answered.count(id)) {
            throw DecodeError("unexpected shuffle response");
          }
          inst = it->second;
          std::vector<Ciphertext<G>> out;
          out.reserve(inst->cts.size());
          for (size_t i = 0; i < inst->cts.size(); ++i) out.push_back(ReadCiphertext<G>(r));
          auto proof = ReadShuffleProof<G>(r, inst->cts.size(), inst->width);
          r.ExpectDone();
          answered.insert(id);
          if (ShuffleVerify<G>(inst->key, inst->cts, out, inst->width, proof,
                               static_cast<int>(cfg_.sigma_rep),
                               ShuffleContext(id, msg.from, round))) {
            inst->cts = std::move(out);
            const auto& perm = oracle_perms_.at({msg.from, id});
            std::vector<uint32_t> next(perm.size());
            for (size_t j = 0; j < perm.size(); ++j) next[j] = inst->composed[perm[j]];
            inst->composed = std::move(next);
            ++inst->valid;
          } else {
            ++inst->failures;
            result_.excluded.emplace(msg.from, "invalid shuffle proof");
          }
        } catch (const DecodeError&) {
          net_.MarkMalformed(msg.index);
          if (inst != nullptr && !answered.count(inst->id)) {
            answered.insert(inst->id);
            ++inst->failures;
            result_.excluded.emplace(msg.from, "malformed shuffle");
          }
        }
      }
    }
    for (auto& [id, inst] : by_id) {
      if (!answered.count(id)) {
        ++inst->failures;
        known_gone_.insert(*inst->current);
        dropped_.insert(*inst->current);
      }
      Advance(*inst);
    }
  }

  void ShufflerRespond(PartyId p, const Bytes& body, uint32_t round) {
    const Misbehavior* mb = Mb(p);
    ByteWriter w;
    try {
      Charged(net_, p, Phase::kShuffle, [&] {
        ByteReader r(body);
        uint32_t id = r.U32();
        ElementOf<G> key = ReadElement<G>(r);
        uint32_t items = r.U32();
        if (items == 0 || items > r.remaining() / (64 * width())) {
          throw DecodeError("bad item count");
        }
        std::vector<Ciphertext<G>> in;
        in.reserve(items * width());
        for (size_t i = 0; i < items * width(); ++i) in.push_back(ReadCiphertext<G>(r));
        r.ExpectDone();
        Rng rng = root_.Fork("shuffler", p).Fork("instance", id);
        auto perm = rng.Permutation(items);
        if (perm_hook_) {
          if (auto forced = perm_hook_(p, id, items)) perm = std::move(*forced);
        }
        std::vector<ScalarOf<G>> rerand;
        rerand.reserve(in.size());
        for (size_t i = 0; i < in.size(); ++i) rerand.push_back(G::SRandom(rng));
        auto res = ShuffleProve<G>(key, in, width(), perm, rerand,
                                   static_cast<int>(cfg_.sigma_rep), rng,
                                   ShuffleContext(id, p, round));
        if (mb && mb->bad_shuffle) res.output[0].c1 = res.output[0].c1 * G::Generator();
        oracle_perms_[{p, id}] = std::move(perm);
        w.U32(id);
        for (const auto& ct : res.output) WriteCiphertext<G>(w, ct);
        WriteShuffleProof<G>(w, res.proof);
      });
    } catch (const DecodeError&) {
      return;
    }
    net_.Send(p, kServer, MsgType::kShuffleResponse, w.Take());
  }

  bool RunAmortizedShuffle(const ElementOf<G>& key, const std::vector<Ciphertext<G>>& cts,
                           const std::vector<int64_t>& prov,
                           std::vector<Ciphertext<G>>* out) {
    auto inst = NewInstance(key, roles_.shuffle_committees[0], cts);
    Advance(inst);
    std::vector<ShuffleInstance<G>*> active{&inst};
    while (inst.state == ShuffleInstance<G>::State::kRunning) ShuffleRound(active);
    if (inst.state == ShuffleInstance<G>::State::kAborted) {
      reason_ = "shuffle instance " + std::to_string(inst.id) + " had " +
                std::to_string(inst.failures) + " failures, tolerance " +
                std::to_string(cfg_.d);
      return false;
    }
    result_.row_perms = {{inst.composed}};
    for (uint32_t j : inst.composed) result_.provenance.push_back(prov[j]);
    *out = std::move(inst.cts);
    return true;
  }

  bool RunAlternatingShuffle(const ElementOf<G>& pk, const ScalarOf<G>& offset,
                             const ElementOf<G>& shuffle_key,
                             const std::vector<Ciphertext<G>>& cts,
                             const std::vector<int64_t>& prov,
                             std::vector<Ciphertext<G>>* out) {
    const size_t wd = width();
    // Items in client order, padded where a client sent nothing.
    Rng pad_rng = root_.Fork("server-padding");
    std::vector<std::vector<Ciphertext<G>>> items(cfg_.n);
    std::vector<int64_t> item_prov(cfg_.n, -1);
    for (size_t i = 0; i < prov.size(); ++i) {
      items[prov[i]].assign(cts.begin() + i * wd, cts.begin() + (i + 1) * wd);
      item_prov[prov[i]] = prov[i];
    }
    for (auto& it : items) {
      if (it.empty()) it = DummyTuple(pk, pad_rng);
    }
    {
      CountingScope scope(net_.Counter(kServer, Phase::kShuffle));
      for (auto& it : items) {
        for (auto& ct : it) ct = ShiftKey<G>(ct, offset);
      }
    }
    result_.public_perm = root_.Fork("public-permutation").Permutation(cfg_.n);
    auto grid = ArrangeGrid(items, result_.public_perm);
    auto grid_prov = ArrangeGrid(item_prov, result_.public_perm);

    const auto& committees = roles_.shuffle_committees;
    uint32_t H = cfg_.h, W = cfg_.w;
    uint32_t counter = 0;
    for (uint32_t iter = 0; iter < cfg_.ell; ++iter) {
      std::vector<ShuffleInstance<G>> insts;
      insts.reserve(H);
      std::vector<std::deque<size_t>> queues(committees.size());
      for (uint32_t r = 0; r < H; ++r) {
        std::vector<Ciphertext<G>> row;
        for (uint32_t j = 0; j < W; ++j) {
          const auto& t = grid[r * W + j];
          row.insert(row.end(), t.begin(), t.end());
        }
        const size_t c = counter++ % committees.size();
        insts.push_back(NewInstance(shuffle_key, committees[c], std::move(row)));
        queues[c].push_back(r);
      }
      // Each committee works through its queue; committees run in parallel.
      auto fetch_heads = [&]() {
        std::vector<ShuffleInstance<G>*> heads;
        for (auto& q : queues) {
          while (!q.empty()) {
            auto& inst = insts[q.front()];
            if (inst.state == ShuffleInstance<G>::State::kRunning && !inst.current) {
              Advance(inst);
            }
            if (inst.state == ShuffleInstance<G>::State::kRunning) break;
            q.pop_front();
          }
          if (!q.empty()) heads.push_back(&insts[q.front()]);
        }
        return heads;
      };
      for (auto heads = fetch_heads(); !heads.empty(); heads = fetch_heads()) {
        if (AnyAborted(insts)) break;
        ShuffleRound(heads);
      }
      if (AnyAborted(insts)) return false;

      std::vector<std::vector<uint32_t>> perms;
      std::vector<std::vector<Ciphertext<G>>> next_grid(grid.size());
      std::vector<int64_t> next_prov(grid.size());
      for (uint32_t r = 0; r < H; ++r) {
        const auto& inst = insts[r];
        for (uint32_t j = 0; j < W; ++j) {
          next_grid[r * W + j].assign(inst.cts.begin() + j * wd,
                                      inst.cts.begin() + (j + 1) * wd);
          next_prov[r * W + j] = grid_prov[r * W + inst.composed[j]];
        }
        perms.push_back(inst.composed);
      }
      result_.row_perms.push_back(std::move(perms));
      grid = Transpose(next_grid, H, W);
      grid_prov = Transpose(next_prov, H, W);
      std::swap(H, W);
    }
    out->clear();
    for (const auto& t : grid) out->insert(out->end(), t.begin(), t.end());
    result_.provenance = std::move(grid_prov);
    return true;
  }

  bool AnyAborted(const std::vector<ShuffleInstance<G>>& insts) {
    for (const auto& inst : insts) {
      if (inst.state == ShuffleInstance<G>::State::kAborted) {
        reason_ = "shuffle instance " + std::to_string(inst.id) + " had " +
                  std::to_string(inst.failures) + " failures, tolerance " +
                  std::to_string(cfg_.d);
        return true;
      }
    }
    return false;
  }

  bool Decrypt(KeyAgreement<G>& ka, const std::vector<Ciphertext<G>>& cts) {
    const size_t wd = width();
    const size_t items = cts.size() / wd;
    const auto& layout = ka.layout();
    std::vector<DecryptionJob<G>> jobs;
    for (size_t c = 0; c < layout.m(); ++c) {
      const size_t lo = c * items / layout.m(), hi = (c + 1) * items / layout.m();
      if (lo == hi) continue;
      DecryptionJob<G> job;
      job.committee = c;
      job.share_comms = ka.share_comms()[c];
      for (size_t k = 0; k < layout.n_dec(); ++k) {
        if (ka.Eligible(layout.members[c][k])) {
          job.members.push_back({layout.members[c][k], static_cast<uint32_t>(k + 1)});
        }
      }
      job.cts.assign(cts.begin() + lo * wd, cts.begin() + hi * wd);
      jobs.push_back(std::move(job));
    }
    RunDecryptionRounds<G>(
        net_, jobs, layout.t, cfg_.challenge,
        [&ka](PartyId p) { return ka.ShareOf(p); }, &adversary_,
        root_.Fork("decryption"));
    for (const auto& job : jobs) {
      for (PartyId p : job.silent) dropped_.insert(p);
      for (PartyId p : job.rejected) {
        result_.excluded.emplace(p, "invalid partial decryption");
      }
    }
    for (const auto& job : jobs) {
      if (!job.ok) {
        reason_ = job.reason;
        return false;
      }
    }
    for (const auto& job : jobs) {
      for (size_t i = 0; i + wd <= job.plaintexts.size(); i += wd) {
        std::vector<ElementOf<G>> elems(job.plaintexts.begin() + i,
                                        job.plaintexts.begin() + i + wd);
        try {
          result_.output.push_back(codec_.Decode(elems));
        } catch (const DecodeError&) {
          ++result_.undecodable;
        }
      }
    }
    return true;
  }

  SimResult Finish(Outcome o, std::string reason) {
    result_.outcome = o;
    result_.reason = std::move(reason);
    if (o != Outcome::kOk) {
      result_.output.clear();
      result_.undecodable = 0;
    }
    result_.rounds_used = net_.round();
    result_.n_clients = cfg_.n;
    result_.bytes_sent = net_.bytes_sent();
    result_.bytes_received = net_.bytes_received();
    result_.exps = net_.ExpTotals();
    result_.transcript = net_.TakeTranscript();
    result_.dropped_out = dropped_;
    result_.committees = roles_.decryption.members;
    std::set<PartyId> shufflers;
    for (const auto& c : roles_.shuffle_committees) shufflers.insert(c.begin(), c.end());
    result_.shufflers.assign(shufflers.begin(), shufflers.end());
    return std::move(result_);
  }

  ProtocolKind kind_;
  ProtocolConfig cfg_;
  std::vector<Bytes> inputs_;
  AdversarySpec adversary_;
  Rng root_;
  PayloadCodec<G> codec_;
  Network net_;
  RoleAssignment roles_;
  std::vector<KeyPair<G>> keys_;
  SimResult result_;
  std::string reason_;
  std::set<PartyId> dropped_;
  std::set<PartyId> known_gone_;
  std::map<std::pair<PartyId, uint32_t>, std::vector<uint32_t>> oracle_perms_;
  uint32_t next_instance_ = 0;
  PermHook perm_hook_;
};

template <class G>
SimResult Simulate(ProtocolKind kind, const ProtocolConfig& cfg,
                   const std::vector<Bytes>& inputs, const AdversarySpec& adversary,
                   const DropoutSchedule& dropouts, uint64_t seed,
                   bool keep_payloads = false) {
  return ProtocolRun<G>(kind, cfg, inputs, adversary, dropouts, seed, keep_payloads).Run();
}

template <class G>
SimResult RunAmortized(const ProtocolConfig& cfg, const std::vector<Bytes>& inputs,
                       const AdversarySpec& adversary, const DropoutSchedule& dropouts,
                       uint64_t seed) {
  return Simulate<G>(ProtocolKind::kAmortized, cfg, inputs, adversary, dropouts, seed);
}

template <class G>
SimResult RunAlternating(const ProtocolConfig& cfg, const std::vector<Bytes>& inputs,
                         const AdversarySpec& adversary, const DropoutSchedule& dropouts,
                         uint64_t seed) {
  return Simulate<G>(ProtocolKind::kAlternating, cfg, inputs, adversary, dropouts, seed);
}

// Realized permutation relative to the public arrangement: output position j
// holds grid slot tau[j] of the arranged grid. Equals the composition of the
// accepted row shuffles, the part the alternating functionality randomizes.
// Needs a run without padding.
inline std::vector<uint32_t> PostArrangementPermutation(const SimResult& r) {
  if (r.public_perm.size() != r.provenance.size()) {
    throw PreconditionViolated("not a complete alternating run");
  }
  for (int64_t v : r.provenance) {
    if (v < 0) throw PreconditionViolated("run contains padding");
  }
  std::vector<uint32_t> slot_of_client(r.provenance.size());
  for (uint32_t pos = 0; pos < r.public_perm.size(); ++pos) {
    slot_of_client[r.public_perm[pos]] = pos;
  }
  std::vector<uint32_t> tau(r.provenance.size());
  for (size_t j = 0; j < r.provenance.size(); ++j) {
    tau[j] = slot_of_client[static_cast<size_t>(r.provenance[j])];
  }
  return tau;
}

}  // namespace shufflestack

#endif  // SHUFFLESTACK_SHUFFLER_H_
