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

#ifndef SHUFFLESTACK_COST_MODEL_H_
#define SHUFFLESTACK_COST_MODEL_H_

// Security levels, round counts, per-client bytes and exponentiations of the
// amortized and alternating shufflers, and a parameter search over them.
//
// The byte and exponentiation model describes an honest run of our own
// protocol implementation message by message, so it matches the simulator
// exactly for the cut-and-choose proof. The Bayer-Groth backend is modeled
// only: its proof is a fixed fraction of the ciphertext payload and costs a
// fixed number of exponentiations per ciphertext.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "shufflestack/channel.h"
#include "shufflestack/common.h"
#include "shufflestack/net_sim.h"
#include "shufflestack/shuffler.h"
#include "shufflestack/zk.h"

namespace shufflestack {

enum class ProofBackend { kBayerGroth, kCutAndChoose };
// kHoeffding evaluates the closed forms term by term. The other two add up
// failure probabilities over committees, bounding each binomial tail either
// exactly or by the relative-entropy (Chernoff) bound.
enum class TailBound { kHoeffding, kChernoff, kExactBinomial };
enum class DropoutCase { kBest, kWorst };
enum class Objective { kRounds, kWorstBytes, kAvgBytes };

inline const char* BackendName(ProofBackend b) {
  return b == ProofBackend::kBayerGroth ? "bayer_groth" : "cut_and_choose";
}

struct CostParams {
  // n, h, w, ell, n_dec, m, t, n_shuf, d, sigma_rep, shuffle_committees,
  // gamma, alpha and the decryption challenge mode.
  ProtocolConfig cfg;
  uint32_t width = 1;  // group elements per client payload
  uint32_t element_bits = 256;
  ProofBackend backend = ProofBackend::kBayerGroth;
  double bg_proof_fraction = 0.1;  // proof bytes per ciphertext payload byte
  double bg_exps_per_ct = 4;       // proof exponentiations per ciphertext

  uint64_t E() const { return element_bits / 8; }  // element and scalar bytes
  uint64_t Ct() const { return 2 * E(); }

  void Validate(ProtocolKind kind) const {
    cfg.Validate(kind);
    if (width < 1) throw ConfigInvalid("width must be positive");
    if (element_bits < 8 || element_bits % 8 != 0) {
      throw ConfigInvalid("element_bits must be a positive multiple of 8");
    }
    if (!(bg_proof_fraction >= 0) || !(bg_exps_per_ct >= 0)) {
      throw ConfigInvalid("Bayer-Groth model constants must be nonnegative");
    }
  }
};

// ---------------------------------------------------------------------------
// Closed-form security levels (Hoeffding tails).

struct Branches {
  double decryption, shuffle;
  double Min() const { return std::min(decryption, shuffle); }
};

namespace internal {

inline double HoeffdingBits(double base, double size, const char* what) {
  if (base < 0) throw DomainError(std::string("tail bound inapplicable: ") + what + " < 0");
  return 2 * std::log2(std::exp(1.0)) * base * base * size - 1;
}

inline double InstanceTerm(const ProtocolConfig& c) {
  const uint64_t count = static_cast<uint64_t>(c.h) * ((c.ell + 1) / 2) +
                         static_cast<uint64_t>(c.w) * (c.ell / 2);
  if (count == 0) throw DomainError("alternating union term needs ell >= 1 and h, w >= 1");
  return std::log2(static_cast<double>(count));
}

}  // namespace internal

inline Branches SigmaAmortizedBranches(const CostParams& p) {
  const auto& c = p.cfg;
  return {-std::log2(c.m) + internal::HoeffdingBits(double(c.t) / c.n_dec - c.gamma, c.n_dec,
                                                    "t / n_dec - gamma"),
          internal::HoeffdingBits(1 - double(c.d) / c.n_shuf - c.gamma, c.n_shuf,
                                  "1 - d / n_shuf - gamma")};
}

inline Branches EtaAmortizedBranches(const CostParams& p) {
  const auto& c = p.cfg;
  return {-std::log2(c.m) + internal::HoeffdingBits((1 - c.alpha) - double(c.t + 1) / c.n_dec,
                                                    c.n_dec, "(1 - alpha) - (t + 1) / n_dec"),
          internal::HoeffdingBits(double(c.d + 1) / c.n_shuf - c.alpha, c.n_shuf,
                                  "(d + 1) / n_shuf - alpha")};
}

inline Branches SigmaAlternatingBranches(const CostParams& p) {
  Branches b = SigmaAmortizedBranches(p);
  b.shuffle -= internal::InstanceTerm(p.cfg);
  return b;
}

inline Branches EtaAlternatingBranches(const CostParams& p) {
  Branches b = EtaAmortizedBranches(p);
  b.shuffle -= internal::InstanceTerm(p.cfg);
  return b;
}

inline double SigmaAmortized(const CostParams& p) { return SigmaAmortizedBranches(p).Min(); }
inline double EtaAmortized(const CostParams& p) { return EtaAmortizedBranches(p).Min(); }
inline double SigmaAlternating(const CostParams& p) {
  return SigmaAlternatingBranches(p).Min();
}
inline double EtaAlternating(const CostParams& p) { return EtaAlternatingBranches(p).Min(); }

// ---------------------------------------------------------------------------
// Exact binomial tails. The failure events are the ones the implementation
// actually has: a decryption committee with t corrupt members, a decryption
// committee with more than n_dec - t dropouts, a shuffle committee whose
// n_shuf - d accepted shuffles may all be corrupt, and a shuffle committee
// with more than d dropouts. Failure probabilities add up over committees;
// shuffle committees are counted once however many instances they serve.

// P[Bin(n, p) >= k].
inline double BinomialUpperTail(uint32_t n, double p, int64_t k) {
  if (k <= 0) return 1;
  if (k > static_cast<int64_t>(n)) return 0;
  if (p <= 0) return 0;
  if (p >= 1) return 1;
  const double lp = std::log(p), lq = std::log1p(-p);
  const double lgn = std::lgamma(n + 1.0);
  double sum = 0;
  for (int64_t j = k; j <= static_cast<int64_t>(n); ++j) {
    sum += std::exp(lgn - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0) + j * lp +
                    (n - j) * lq);
  }
  return std::min(sum, 1.0);
}

// exp(-n KL(k/n || p)) >= P[Bin(n, p) >= k], for k >= n p; 1 below the mean.
inline double ChernoffUpperTail(uint32_t n, double p, int64_t k) {
  if (k <= 0) return 1;
  if (k > static_cast<int64_t>(n)) return 0;
  const double a = static_cast<double>(k) / n;
  if (a <= p) return 1;
  if (p <= 0) return 0;
  double kl = a * std::log(a / p);
  if (a < 1) kl += (1 - a) * std::log((1 - a) / (1 - p));
  return std::exp(-static_cast<double>(n) * kl);
}

inline double UpperTail(TailBound tail, uint32_t n, double p, int64_t k) {
  return tail == TailBound::kChernoff ? ChernoffUpperTail(n, p, k)
                                      : BinomialUpperTail(n, p, k);
}

inline double BitsOf(double failure) {
  return failure <= 0 ? std::numeric_limits<double>::infinity() : -std::log2(failure);
}

inline uint64_t ShuffleInstances(ProtocolKind kind, const ProtocolConfig& c) {
  if (kind == ProtocolKind::kAmortized) return 1;
  uint64_t total = 0;
  for (uint32_t i = 0; i < c.ell; ++i) total += i % 2 == 0 ? c.h : c.w;
  return total;
}

// Shuffle committees that serve at least one instance.
inline uint64_t ShuffleCommitteesUsed(ProtocolKind kind, const ProtocolConfig& c) {
  if (kind == ProtocolKind::kAmortized) return 1;
  return std::min<uint64_t>(c.ShuffleCommittees(), ShuffleInstances(kind, c));
}

struct FailureProbabilities {
  double sigma_dec, sigma_shuf, eta_dec, eta_shuf;  // summed over committees
  double Sigma() const { return BitsOf(sigma_dec + sigma_shuf); }
  double Eta() const { return BitsOf(eta_dec + eta_shuf); }
};

inline FailureProbabilities Failures(const CostParams& p, ProtocolKind kind,
                                     TailBound tail = TailBound::kExactBinomial) {
  const auto& c = p.cfg;
  const double u = static_cast<double>(ShuffleCommitteesUsed(kind, c));
  return {c.m * UpperTail(tail, c.n_dec, c.gamma, c.t),
          u * UpperTail(tail, c.n_shuf, c.gamma, int64_t{c.n_shuf} - c.d),
          c.m * UpperTail(tail, c.n_dec, c.alpha, int64_t{c.n_dec} - c.t + 1),
          u * UpperTail(tail, c.n_shuf, c.alpha, int64_t{c.d} + 1)};
}

struct SecurityLevels {
  double sigma, eta;
};

// Closed forms report -infinity where a tail bound does not apply.
inline SecurityLevels Levels(const CostParams& p, ProtocolKind kind, TailBound tail) {
  if (tail != TailBound::kHoeffding) {
    auto f = Failures(p, kind, tail);
    return {f.Sigma(), f.Eta()};
  }
  const double neg_inf = -std::numeric_limits<double>::infinity();
  SecurityLevels out{neg_inf, neg_inf};
  const bool alt = kind == ProtocolKind::kAlternating;
  try {
    out.sigma = alt ? SigmaAlternating(p) : SigmaAmortized(p);
  } catch (const DomainError&) {
  }
  try {
    out.eta = alt ? EtaAlternating(p) : EtaAmortized(p);
  } catch (const DomainError&) {
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rounds. Key agreement takes three rounds, key distribution and input
// submission one, decryption one (two with interactive challenges). Each
// shuffle instance takes one round per shuffler turn. A dropped shuffler
// costs one round the first time it is asked and none afterwards, so a
// committee loses at most d extra rounds per iteration it works in.

inline uint32_t RoundModel(const CostParams& p, ProtocolKind kind, DropoutCase dc) {
  const auto& c = p.cfg;
  const uint32_t fixed = 5 + (c.challenge == ChallengeMode::kInteractive ? 1 : 0);
  const uint32_t extra = dc == DropoutCase::kWorst ? c.d : 0;
  if (kind == ProtocolKind::kAmortized) return fixed + c.n_shuf - c.d + extra;
  const uint32_t committees = c.ShuffleCommittees();
  uint32_t rounds = fixed;
  for (uint32_t i = 0; i < c.ell; ++i) {
    const uint32_t rows = i % 2 == 0 ? c.h : c.w;
    const uint32_t per_committee = (rows + committees - 1) / committees;
    rounds += per_committee * (c.n_shuf - c.d) + extra;
  }
  return rounds;
}

// ---------------------------------------------------------------------------
// Bytes and exponentiations of an honest run.

struct MessageSizes {
  uint64_t env = kEnvelopeBytes;
  uint64_t e, s, ct, sealed;
  explicit MessageSizes(const CostParams& p)
      : e(p.E()), s(p.E()), ct(p.Ct()), sealed(p.E() + (kSealedScalarBytes - 32)) {}
};

// Key-agreement bytes of one member of a committee of n members.
inline uint64_t KeyAgreementBytes(const MessageSizes& z, uint64_t n, uint64_t t, bool succ,
                                  bool pred) {
  const uint64_t relayed = 4 + z.sealed + z.e;
  uint64_t b = 0;
  b += z.env + z.e * t + (succ ? z.e * (t - 1) : 0) + z.sealed * ((n - 1) + (succ ? n : 0));
  b += z.env + 4 + (n - 1) * relayed + 4 + (pred ? n * relayed : 0);
  b += z.env + 4;  // complaints
  b += z.env + 4;  // adjudication
  if (pred) b += z.env + z.s;  // offset
  b += z.s;                    // offset share in the key message
  return b;
}

inline uint64_t DecryptionJobBytes(const MessageSizes& z, uint64_t k, ChallengeMode mode) {
  if (k == 0) return 0;
  uint64_t b = z.env + 4 + z.e * k;
  if (mode == ChallengeMode::kFiatShamir) return b + z.env + z.e * k + 2 * z.s;
  return b + z.env + 2 * z.e * k + z.e + 2 * (z.env + z.s);
}

inline uint64_t ShuffleProofModelBytes(const CostParams& p, uint64_t n_cts) {
  if (p.backend == ProofBackend::kBayerGroth) {
    return static_cast<uint64_t>(std::llround(p.bg_proof_fraction * p.Ct() * n_cts));
  }
  return 4 + p.cfg.sigma_rep * (n_cts * p.Ct() + (n_cts / p.width) * 4 + n_cts * p.E());
}

inline uint64_t ShuffleInstanceBytes(const CostParams& p, uint64_t n_cts) {
  const MessageSizes z(p);
  return z.env + 4 + z.e + 4 + z.ct * n_cts + z.env + 4 + z.ct * n_cts +
         ShuffleProofModelBytes(p, n_cts);
}

inline uint64_t ShuffleInstanceExps(const CostParams& p, uint64_t n_cts) {
  if (p.backend == ProofBackend::kBayerGroth) {
    return static_cast<uint64_t>(std::llround((2 + p.bg_exps_per_ct) * n_cts));
  }
  return 2 * n_cts * (1 + uint64_t{p.cfg.sigma_rep});
}

// Bytes every client spends: the key message and its input.
inline uint64_t BaseClientBytes(const CostParams& p) {
  const MessageSizes z(p);
  return z.env + z.e + z.env + z.ct * p.width;
}

// Ciphertexts in each alternating instance served by each committee:
// out[c] lists the instance sizes in the order committee c runs them.
inline std::vector<std::vector<uint64_t>> CommitteeWork(const CostParams& p,
                                                        ProtocolKind kind) {
  const auto& c = p.cfg;
  if (kind == ProtocolKind::kAmortized) return {{uint64_t{c.n} * p.width}};
  const uint32_t committees = c.ShuffleCommittees();
  std::vector<std::vector<uint64_t>> out(committees);
  uint64_t counter = 0;
  uint32_t rows = c.h, cols = c.w;
  for (uint32_t i = 0; i < c.ell; ++i) {
    for (uint32_t r = 0; r < rows; ++r) {
      out[counter++ % committees].push_back(uint64_t{cols} * p.width);
    }
    std::swap(rows, cols);
  }
  return out;
}

struct ClientLoad {
  uint64_t bytes = 0;
  std::array<uint64_t, kNumPhases> exps{};
};

inline size_t PhaseIndex(Phase ph) { return static_cast<size_t>(ph); }

// Per-position loads of an honest run. Position i is the i-th client of the
// role-assignment order: decryption committees first, then shuffle slots,
// wrapping around when there are more roles than clients.
inline std::vector<ClientLoad> ModelLoads(const CostParams& p, ProtocolKind kind) {
  p.Validate(kind);
  const auto& c = p.cfg;
  const MessageSizes z(p);
  std::vector<ClientLoad> loads(c.n);
  for (auto& l : loads) {
    l.bytes = BaseClientBytes(p);
    l.exps[PhaseIndex(Phase::kEncryption)] = 2 * uint64_t{p.width};
  }
  const uint64_t items = c.n;
  for (uint32_t com = 0; com < c.m; ++com) {
    const bool succ = com + 1 < c.m, pred = com > 0;
    const uint64_t lo = com * items / c.m, hi = (com + 1) * items / c.m;
    const uint64_t k = (hi - lo) * p.width;
    for (uint32_t j = 0; j < c.n_dec; ++j) {
      auto& l = loads[uint64_t{com} * c.n_dec + j];
      l.bytes += KeyAgreementBytes(z, c.n_dec, c.t, succ, pred) +
                 DecryptionJobBytes(z, k, c.challenge);
      l.exps[PhaseIndex(Phase::kChannelSetup)] +=
          (c.n_dec - 1) + (succ ? c.n_dec : 0) + (pred ? c.n_dec : 0);
      l.exps[PhaseIndex(Phase::kKeyAgreement)] +=
          c.t + (succ ? c.t - 1 : 0) + (c.n_dec > 1 ? 1 : 0) + (pred ? 1 : 0);
      if (k > 0) l.exps[PhaseIndex(Phase::kDecryption)] += 2 * k + 1;
    }
  }
  const auto work = CommitteeWork(p, kind);
  const uint64_t first_slot = uint64_t{c.m} * c.n_dec;
  for (size_t s = 0; s < work.size(); ++s) {
    uint64_t bytes = 0, exps = 0;
    for (uint64_t cts : work[s]) {
      bytes += ShuffleInstanceBytes(p, cts);
      exps += ShuffleInstanceExps(p, cts);
    }
    for (uint32_t j = 0; j < c.n_shuf - c.d; ++j) {
      auto& l = loads[(first_slot + s * c.n_shuf + j) % c.n];
      l.bytes += bytes;
      l.exps[PhaseIndex(Phase::kShuffle)] += exps;
    }
  }
  return loads;
}

// Exponentiations per client, by protocol part. Maxima are over clients.
struct ExpCounts {
  uint64_t channel_setup = 0, key_agreement = 0, encryption = 0, decryption = 0;
  uint64_t shuffle_worst = 0;
  double shuffle_avg = 0;

  std::map<std::string, double> ToMap() const {
    return {{"channel_setup", double(channel_setup)},
            {"key_agreement", double(key_agreement)},
            {"encryption", double(encryption)},
            {"decryption", double(decryption)},
            {"shuffle_worst", double(shuffle_worst)},
            {"shuffle_avg", shuffle_avg}};
  }
};

struct CostReport {
  double sigma = 0, eta = 0;
  uint32_t rounds_best = 0, rounds_worst = 0;
  uint64_t bytes_worst_client = 0;
  double bytes_avg_client = 0;
  uint64_t bytes_total = 0;  // over all clients
  ExpCounts exps;
};

inline CostReport Evaluate(const CostParams& p, ProtocolKind kind,
                           TailBound tail = TailBound::kExactBinomial) {
  const auto loads = ModelLoads(p, kind);
  CostReport r;
  auto lv = Levels(p, kind, tail);
  r.sigma = lv.sigma;
  r.eta = lv.eta;
  r.rounds_best = RoundModel(p, kind, DropoutCase::kBest);
  r.rounds_worst = RoundModel(p, kind, DropoutCase::kWorst);
  uint64_t shuffle_total = 0;
  for (const auto& l : loads) {
    r.bytes_worst_client = std::max(r.bytes_worst_client, l.bytes);
    r.bytes_total += l.bytes;
    r.exps.channel_setup =
        std::max(r.exps.channel_setup, l.exps[PhaseIndex(Phase::kChannelSetup)]);
    r.exps.key_agreement =
        std::max(r.exps.key_agreement, l.exps[PhaseIndex(Phase::kKeyAgreement)]);
    r.exps.encryption = std::max(r.exps.encryption, l.exps[PhaseIndex(Phase::kEncryption)]);
    r.exps.decryption = std::max(r.exps.decryption, l.exps[PhaseIndex(Phase::kDecryption)]);
    r.exps.shuffle_worst = std::max(r.exps.shuffle_worst, l.exps[PhaseIndex(Phase::kShuffle)]);
    shuffle_total += l.exps[PhaseIndex(Phase::kShuffle)];
  }
  r.bytes_avg_client = static_cast<double>(r.bytes_total) / p.cfg.n;
  r.exps.shuffle_avg = static_cast<double>(shuffle_total) / p.cfg.n;
  return r;
}

// ---------------------------------------------------------------------------
// Parameter search.

struct OptimizeOptions {
  Objective objective = Objective::kRounds;
  TailBound tail = TailBound::kExactBinomial;
  // Puts every client in a decryption committee (m = floor(n / n_dec)), so
  // each committee decrypts about n_dec ciphertexts. Otherwise m is searched
  // and decryption committees and shuffle slots must not overlap.
  bool full_partition = false;
  uint32_t max_committee = 256;  // upper bound on n_dec and n_shuf
};

struct Optimum {
  CostParams params;
  CostReport report;
};

namespace internal {

// Decryption-side loads with roles disjoint from the shuffle slots.
struct DecLoads {
  uint64_t worst_extra;  // most bytes any member adds to the base load
  uint64_t total_extra;  // bytes all members add together
};

inline DecLoads DecryptionLoads(const CostParams& p, uint32_t n_dec, uint32_t t, uint32_t m) {
  const MessageSizes z(p);
  const ChallengeMode mode = p.cfg.challenge;
  const uint64_t n = p.cfg.n, w = p.width;
  const uint64_t lo_k = (n / m) * w, hi_k = ((n + m - 1) / m) * w;
  const uint64_t ceil_jobs = n % m;  // committees holding the larger batch
  auto member = [&](bool succ, bool pred, uint64_t k) {
    return KeyAgreementBytes(z, n_dec, t, succ, pred) + DecryptionJobBytes(z, k, mode);
  };
  DecLoads out{0, 0};
  if (m == 1) {
    out.worst_extra = member(false, false, n * w);
    out.total_extra = n_dec * out.worst_extra;
    return out;
  }
  // Committee 0 always has the smaller batch and the last the larger one.
  const uint64_t first = member(true, false, lo_k);
  const uint64_t last = member(false, true, hi_k);
  out.worst_extra = std::max(first, last);
  uint64_t ka_total = KeyAgreementBytes(z, n_dec, t, true, false) +
                      KeyAgreementBytes(z, n_dec, t, false, true);
  if (m >= 3) {
    const uint64_t middle_k = ceil_jobs >= 2 ? hi_k : lo_k;
    out.worst_extra = std::max(out.worst_extra, member(true, true, middle_k));
    ka_total += (m - 2) * KeyAgreementBytes(z, n_dec, t, true, true);
  }
  // Every job is nonempty since m <= n.
  const uint64_t per_ct = mode == ChallengeMode::kFiatShamir ? 2 * z.e : 3 * z.e;
  const uint64_t fixed = DecryptionJobBytes(z, 1, mode) - per_ct;
  out.total_extra = n_dec * (ka_total + m * fixed + per_ct * n * w);
  return out;
}

using Key = std::tuple<double, double, double>;

inline Key ObjectiveKey(Objective o, double rounds, double worst, double avg) {
  switch (o) {
    case Objective::kRounds:
      return {rounds, worst, avg};
    case Objective::kWorstBytes:
      return {worst, avg, rounds};
    case Objective::kAvgBytes:
      return {avg, worst, rounds};
  }
  return {rounds, worst, avg};
}

}  // namespace internal

// Searches (n_dec, m, t, n_shuf, d) for the configuration meeting both
// targets that minimizes the objective, ties broken by the remaining cost
// figures and then by the first candidate in the order n_shuf, d
// (descending), n_dec, m, t. `base` fixes everything else: n, gamma, alpha,
// the grid, the payload width and the proof backend. With the cut-and-choose
// backend sigma_rep is set to ceil(sigma_target).
inline Optimum Optimize(CostParams base, double sigma_target, double eta_target,
                        ProtocolKind kind, const OptimizeOptions& opt = {}) {
  auto& c = base.cfg;
  if (c.n < 2) throw Infeasible("need at least two clients");
  if (!(sigma_target > 0) || !(eta_target > 0)) throw Infeasible("targets must be positive");
  if (base.backend == ProofBackend::kCutAndChoose) {
    c.sigma_rep = static_cast<uint32_t>(std::ceil(sigma_target));
  }
  if (kind == ProtocolKind::kAlternating &&
      (c.ell < 1 || static_cast<uint64_t>(c.h) * c.w != c.n)) {
    throw ConfigInvalid("alternating search needs h * w = n and ell >= 1");
  }
  const uint32_t cap = std::min(opt.max_committee, c.n);
  const bool summed = opt.tail != TailBound::kHoeffding;
  const double sigma_budget = std::exp2(-sigma_target);
  const double eta_budget = std::exp2(-eta_target);

  // tail_g[N][k] = P[Bin(N, gamma) >= k], tail_a likewise for alpha.
  std::vector<std::vector<double>> tail_g(cap + 1), tail_a(cap + 1);
  for (uint32_t N = 1; N <= cap; ++N) {
    tail_g[N].resize(N + 2);
    tail_a[N].resize(N + 2);
    for (uint32_t k = 0; k <= N + 1; ++k) {
      tail_g[N][k] = UpperTail(opt.tail, N, c.gamma, k);
      tail_a[N][k] = UpperTail(opt.tail, N, c.alpha, k);
    }
  }

  std::optional<Optimum> best;
  internal::Key best_key;
  const uint64_t base_bytes = BaseClientBytes(base);

  for (uint32_t ns = 1; ns <= cap; ++ns) {
    c.n_shuf = ns;
    const uint64_t committees_used = ShuffleCommitteesUsed(kind, c);
    const uint64_t slots = kind == ProtocolKind::kAmortized
                               ? ns
                               : uint64_t{c.ShuffleCommittees()} * ns;
    if (!opt.full_partition && slots >= c.n) break;

    for (int64_t d = ns - 1; d >= 0; --d) {
      c.d = static_cast<uint32_t>(d);
      // Remaining failure budget for the decryption side.
      double sig_left, eta_left;
      if (summed) {
        sig_left = sigma_budget - committees_used * tail_g[ns][ns - d];
        eta_left = eta_budget - committees_used * tail_a[ns][d + 1];
        if (sig_left <= 0) continue;  // smaller d only helps sigma
        if (eta_left <= 0) break;  // smaller d only hurts eta
      } else {
        // Closed-form branches are checked independently of each other.
        const double union_term =
            kind == ProtocolKind::kAlternating ? internal::InstanceTerm(c) : 0;
        const double bs = 1 - double(d) / ns - c.gamma, be = double(d + 1) / ns - c.alpha;
        if (bs < 0 || internal::HoeffdingBits(bs, ns, "") - union_term < sigma_target) continue;
        if (be < 0 || internal::HoeffdingBits(be, ns, "") - union_term < eta_target) break;
        sig_left = eta_left = 0;
      }

      // Decryption side feasibility for (N, t, m).
      auto dec_ok_sigma = [&](uint32_t N, uint32_t t, uint32_t m) {
        if (summed) return m * tail_g[N][t] <= sig_left;
        const double b = double(t) / N - c.gamma;
        if (b < 0) return false;
        return -std::log2(m) + 2 * std::log2(std::exp(1.0)) * b * b * N - 1 >= sigma_target;
      };
      auto dec_ok_eta = [&](uint32_t N, uint32_t t, uint32_t m) {
        if (summed) return m * tail_a[N][N - t + 1] <= eta_left;
        const double b = (1 - c.alpha) - double(t + 1) / N;
        if (b < 0) return false;
        return -std::log2(m) + 2 * std::log2(std::exp(1.0)) * b * b * N - 1 >= eta_target;
      };
      auto min_t = [&](uint32_t N, uint32_t m) -> uint32_t {
        if (!dec_ok_sigma(N, N, m)) return 0;
        uint32_t lo = 1, hi = N;
        while (lo < hi) {
          const uint32_t mid = (lo + hi) / 2;
          if (dec_ok_sigma(N, mid, m)) {
            hi = mid;
          } else {
            lo = mid + 1;
          }
        }
        return dec_ok_eta(N, lo, m) ? lo : 0;
      };

      const double rounds = RoundModel(base, kind, DropoutCase::kWorst);
      std::optional<std::tuple<uint32_t, uint32_t, uint32_t>> pick;

      if (opt.full_partition) {
        // Exact per-position evaluation; overlap is inherent here.
        internal::Key pick_key;
        for (uint32_t N = 1; N <= cap; ++N) {
          const uint32_t m = c.n / N;
          if (m == 0) break;
          const uint32_t t = min_t(N, m);
          if (t == 0) continue;
          CostParams cand = base;
          cand.cfg.n_dec = N;
          cand.cfg.m = m;
          cand.cfg.t = t;
          auto rep = Evaluate(cand, kind, opt.tail);
          auto key = internal::ObjectiveKey(opt.objective, rounds,
                                            double(rep.bytes_worst_client),
                                            rep.bytes_avg_client);
          if (!pick || key < pick_key) {
            pick = {N, t, m};
            pick_key = key;
          }
        }
      } else {
        // Shuffle-side loads, disjoint from the decryption roles.
        uint64_t shuf_worst = 0, shuf_total = 0;
        for (const auto& list : CommitteeWork(base, kind)) {
          uint64_t b = 0;
          for (uint64_t cts : list) b += ShuffleInstanceBytes(base, cts);
          shuf_worst = std::max(shuf_worst, b);
          shuf_total += b * (ns - c.d);
        }
        internal::Key pick_key;
        for (uint32_t N = 1; N <= cap; ++N) {
          const uint64_t room = c.n - slots;
          const uint32_t max_m = static_cast<uint32_t>(room / N);
          for (uint32_t m = 1; m <= max_m; ++m) {
            const uint32_t t = min_t(N, m);
            if (t == 0) continue;
            auto dl = internal::DecryptionLoads(base, N, t, m);
            const double worst =
                double(base_bytes + std::max(shuf_worst, dl.worst_extra));
            const double avg =
                double(base_bytes * c.n + shuf_total + dl.total_extra) / c.n;
            auto key = internal::ObjectiveKey(opt.objective, rounds, worst, avg);
            if (!pick || key < pick_key) {
              pick = {N, t, m};
              pick_key = key;
            }
          }
        }
      }
      if (!pick) continue;
      CostParams cand = base;
      std::tie(cand.cfg.n_dec, cand.cfg.t, cand.cfg.m) = *pick;
      auto rep = Evaluate(cand, kind, opt.tail);
      auto key = internal::ObjectiveKey(opt.objective, rep.rounds_worst,
                                        double(rep.bytes_worst_client), rep.bytes_avg_client);
      if (!best || key < best_key) {
        best = Optimum{cand, rep};
        best_key = key;
      }
      break;  // the largest feasible d is the best choice for this n_shuf
    }
    // Worst-case rounds grow with n_shuf, so the first feasible n_shuf wins.
    if (best && opt.objective == Objective::kRounds) break;
  }
  if (!best) throw Infeasible("no parameters meet the targets");
  return *best;
}

// Convenience form: square grid and two iterations for the alternating
// protocol, 128-bit payloads in one element, Bayer-Groth proofs.
inline Optimum Optimize(uint32_t n, double gamma, double alpha, double sigma_target,
                        double eta_target, ProtocolKind kind,
                        Objective objective = Objective::kRounds) {
  CostParams base;
  base.cfg.n = n;
  base.cfg.gamma = gamma;
  base.cfg.alpha = alpha;
  if (kind == ProtocolKind::kAlternating) {
    const auto side = static_cast<uint32_t>(std::llround(std::sqrt(double(n))));
    if (uint64_t{side} * side != n) throw NotSquare("alternating search needs a square n");
    base.cfg.h = base.cfg.w = side;
    base.cfg.ell = 2;
  }
  OptimizeOptions opt;
  opt.objective = objective;
  return Optimize(base, sigma_target, eta_target, kind, opt);
}

}  // namespace shufflestack

#endif  // SHUFFLESTACK_COST_MODEL_H_
