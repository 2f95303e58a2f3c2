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

#ifndef SHUFFLESTACK_DP_ACCOUNTANT_H_
#define SHUFFLESTACK_DP_ACCOUNTANT_H_

// Closed-form privacy accounting for shuffling and alternating shuffling,
// plus Monte-Carlo distinguishers for the negative results. Every logarithm
// in this file is natural.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "shufflestack/alternating.h"
#include "shufflestack/common.h"
#include "shufflestack/rng.h"

namespace shufflestack {

struct PrivacyBound {
  double eps = 0;
  double delta = 0;
  std::string source;
};

// Every intermediate of the alternating-shuffler amplification chain.
struct AmpChain {
  double eps0 = 0, delta = 0, delta_prime = 0;
  uint64_t h = 0, w = 0;
  double gamma = 0;  // posterior bound on the column holding a given user
  double eps_s = 0;  // clone-shuffling amplification within one column
  double eps_c = 0;  // after subsampling by gamma
  double eps_total = 0, delta_total = 0;
  // Whether eps0 lies in the clone-shuffling domain for (delta, h); only
  // false for chains evaluated with Domain::kEvaluateOnly.
  bool in_domain = true;
};

namespace dp_internal {

inline void RequireFinite(double v, const char* what) {
  if (!std::isfinite(v)) throw DomainError(std::string(what) + " must be finite");
}

}  // namespace dp_internal

// Amplification by subsampling: log(1 + gamma (e^eps0 - 1)).
inline double EpsSampling(double eps0, double gamma) {
  dp_internal::RequireFinite(eps0, "eps0");
  if (eps0 < 0) throw DomainError("eps0 must be nonnegative");
  if (!(gamma >= 0 && gamma <= 1)) throw DomainError("gamma must lie in [0, 1]");
  return std::log1p(gamma * std::expm1(eps0));
}

// Largest eps0 for which the clone-shuffling bound applies at (delta, n);
// -inf when no eps0 qualifies.
inline double EpsClonesMaxEps0(double delta, uint64_t n) {
  const double arg = static_cast<double>(n) / (8 * std::log(2 / delta)) - 1;
  return arg > 0 ? std::log(arg) : -std::numeric_limits<double>::infinity();
}

enum class Domain {
  kEnforce,       // throw PreconditionViolated outside the bound's validity domain
  kEvaluateOnly,  // evaluate the closed form anyway and report applicability
};

// Uniform shuffling of n reports from an eps0-LDP randomizer.
inline double EpsClones(double eps0, double delta, uint64_t n,
                        Domain domain = Domain::kEnforce) {
  dp_internal::RequireFinite(eps0, "eps0");
  if (eps0 < 0) throw DomainError("eps0 must be nonnegative");
  if (!(delta > 0 && delta < 1)) throw DomainError("delta must lie in (0, 1)");
  if (n == 0) throw DomainError("n must be positive");
  if (domain == Domain::kEnforce && !(eps0 <= EpsClonesMaxEps0(delta, n))) {
    throw PreconditionViolated(
        "clone shuffling needs eps0 <= log(n / (8 log(2 / delta)) - 1); got eps0 = " +
        std::to_string(eps0) + ", n = " + std::to_string(n) +
        ", delta = " + std::to_string(delta));
  }
  const double nd = static_cast<double>(n);
  const double inner =
      std::sqrt(32 * std::log(4 / delta) / ((std::exp(eps0) + 1) * nd)) + 4 / nd;
  return std::log1p(std::expm1(eps0) * inner);
}

// Alternating-shuffler amplification on an h x w grid: clone shuffling
// within a column, subsampling by the column posterior, and advanced
// composition over the w columns with slack delta_prime.
inline AmpChain WeakAmpChain(double eps0, double delta, double delta_prime, uint64_t h,
                             uint64_t w, Domain domain = Domain::kEnforce) {
  if (w == 0 || h == 0) throw DomainError("grid dimensions must be positive");
  if (!(delta_prime > 0 && delta_prime < 1)) {
    throw DomainError("delta_prime must lie in (0, 1)");
  }
  AmpChain c;
  c.eps0 = eps0;
  c.delta = delta;
  c.delta_prime = delta_prime;
  c.h = h;
  c.w = w;
  // e^{2 eps0} / (e^{2 eps0} + w - 1), written to avoid overflow.
  c.gamma = 1 / (1 + static_cast<double>(w - 1) * std::exp(-2 * eps0));
  c.eps_s = EpsClones(eps0, delta, h, domain);
  c.in_domain = eps0 <= EpsClonesMaxEps0(delta, h);
  c.eps_c = EpsSampling(c.eps_s, c.gamma);
  const double wd = static_cast<double>(w);
  c.eps_total = c.eps_c * (std::sqrt(2 * wd * std::log(1 / delta_prime)) +
                           wd * std::tanh(c.eps_c / 2));
  c.delta_total = wd * c.gamma * delta + delta_prime;
  return c;
}

inline PrivacyBound WeakAmp(double eps0, double delta, double delta_prime, uint64_t h,
                            uint64_t w, AmpChain* chain = nullptr,
                            Domain domain = Domain::kEnforce) {
  AmpChain c = WeakAmpChain(eps0, delta, delta_prime, h, w, domain);
  if (chain) *chain = c;
  return {c.eps_total, c.delta_total, "weak_amp"};
}

// Square-grid convenience form with delta_prime = delta.
inline PrivacyBound WeakAmpSquare(double eps0, double delta, uint64_t n) {
  const auto k = static_cast<uint64_t>(std::llround(std::sqrt(static_cast<double>(n))));
  if (k * k != n) throw NotSquare("n = " + std::to_string(n) + " is not a perfect square");
  auto b = WeakAmp(eps0, delta, delta, k, k);
  b.source = "weak_amp_square";
  return b;
}

// Honest rows and columns surviving gamma-fraction corruption, except with
// probability delta_w and delta_h respectively. Fractional counts are rounded
// down.
struct CorruptedGrid {
  double w_real = 0, h_real = 0;
  uint64_t w = 0, h = 0;
};

inline CorruptedGrid HonestGrid(uint64_t h, uint64_t w, double gamma, double delta_w,
                                double delta_h) {
  if (!(gamma >= 0 && gamma < 1)) throw DomainError("gamma must lie in [0, 1)");
  if (!(delta_w > 0 && delta_w < 1) || !(delta_h > 0 && delta_h < 1)) {
    throw DomainError("delta_w and delta_h must lie in (0, 1)");
  }
  const double wd = static_cast<double>(w), hd = static_cast<double>(h);
  const double lw = std::log(1 / delta_w);
  const double lh = std::log(wd / delta_h);
  CorruptedGrid g;
  g.w_real = (1 - gamma) * wd - lw - std::sqrt(2 * gamma * wd * lw);
  g.h_real = (1 - gamma) * hd - lh - std::sqrt(2 * gamma * hd * lh);
  if (g.w_real < 2 || g.h_real < 2) {
    throw TooManyCorruptions("honest grid " + std::to_string(g.h_real) + " x " +
                             std::to_string(g.w_real) + " is below 2 x 2");
  }
  g.w = static_cast<uint64_t>(std::floor(g.w_real));
  g.h = static_cast<uint64_t>(std::floor(g.h_real));
  return g;
}

inline PrivacyBound WeakAmpCorrupted(double eps0, double delta, double delta_w,
                                     double delta_h, double delta_prime, uint64_t h,
                                     uint64_t w, double gamma, AmpChain* chain = nullptr,
                                     CorruptedGrid* grid = nullptr,
                                     Domain domain = Domain::kEnforce) {
  CorruptedGrid g = HonestGrid(h, w, gamma, delta_w, delta_h);
  if (grid) *grid = g;
  AmpChain c = WeakAmpChain(eps0, delta, delta_prime, g.h, g.w, domain);
  if (chain) *chain = c;
  return {c.eps_total, c.delta_total + delta_w + delta_h, "weak_amp_corrupted"};
}

// ---------------------------------------------------------------------------
// Monte-Carlo distinguishers.

struct Advantage {
  uint64_t trials = 0;
  double p_a = 0, p_b = 0;
  double advantage = 0;  // |p_a - p_b|
  double std_err_a = 0, std_err_b = 0;
  double std_err = 0;     // of the difference
  double ci_low = 0, ci_high = 0;  // 95% Wald interval for p_a - p_b
};

inline Advantage AdvantageFromCounts(uint64_t hits_a, uint64_t hits_b, uint64_t trials) {
  Advantage a;
  a.trials = trials;
  const double t = static_cast<double>(trials);
  a.p_a = static_cast<double>(hits_a) / t;
  a.p_b = static_cast<double>(hits_b) / t;
  a.advantage = std::abs(a.p_a - a.p_b);
  a.std_err_a = std::sqrt(a.p_a * (1 - a.p_a) / t);
  a.std_err_b = std::sqrt(a.p_b * (1 - a.p_b) / t);
  a.std_err = std::sqrt(a.std_err_a * a.std_err_a + a.std_err_b * a.std_err_b);
  const double diff = a.p_a - a.p_b;
  a.ci_low = diff - 1.96 * a.std_err;
  a.ci_high = diff + 1.96 * a.std_err;
  return a;
}

// Estimates |P[E(A)] - P[E(B)]| from independent samples of two mechanisms.
// Both mechanisms draw from forks of rng so the estimate is deterministic.
template <class Sample>
Advantage EstimateIndistinguishability(const std::function<Sample(Rng&)>& mech_a,
                                       const std::function<Sample(Rng&)>& mech_b,
                                       const std::function<bool(const Sample&)>& event,
                                       uint64_t trials, const Rng& rng) {
  if (trials == 0) throw DomainError("trials must be positive");
  Rng ra = rng.Fork("mechanism-a"), rb = rng.Fork("mechanism-b");
  uint64_t ha = 0, hb = 0;
  for (uint64_t i = 0; i < trials; ++i) {
    ha += event(mech_a(ra));
    hb += event(mech_b(rb));
  }
  return AdvantageFromCounts(ha, hb, trials);
}

// Neighbouring inputs on a k x k grid that defeat strong amplification:
// D0 has x_1 = 0, D1 has x_1 = 1; x_2..x_k are 1 and the rest 0. Reports
// are flipped with probability 1 / (1 + e^eps0), then pass through the
// two-iteration alternating shuffler with no public permutation. The event
// is an all-zero output column.
struct NoStrongAmpReport {
  uint32_t k = 0;
  double eps0 = 0;
  Advantage estimate;  // a = D0, b = D1
  double gap() const { return estimate.p_a - estimate.p_b; }
};

inline bool HasZeroColumn(const std::vector<uint8_t>& y, uint32_t k) {
  for (uint32_t c = 0; c < k; ++c) {
    bool zero = true;
    for (uint32_t r = 0; r < k && zero; ++r) zero = y[r * k + c] == 0;
    if (zero) return true;
  }
  return false;
}

inline NoStrongAmpReport AttackNoStrongAmp(uint32_t k, double eps0, uint64_t trials,
                                           const Rng& rng) {
  if (k < 1) throw DomainError("k must be positive");
  if (eps0 < 0 || !std::isfinite(eps0)) throw DomainError("eps0 must be finite and >= 0");
  if (trials < 1000) throw PreconditionViolated("need at least 1000 trials");
  const uint32_t n = k * k;
  const double flip = 1 / (1 + std::exp(eps0));
  auto mech = [=](uint8_t first) {
    return std::function<std::vector<uint8_t>(Rng&)>([=](Rng& r) {
      std::vector<uint8_t> x(n, 0);
      x[0] = first;
      for (uint32_t i = 1; i < k; ++i) x[i] = 1;
      for (auto& v : x) {
        if (r.Bernoulli(flip)) v ^= 1;
      }
      return AlternatingShufflePure<uint8_t>(x, k, k, 2, {}, r);
    });
  };
  NoStrongAmpReport rep;
  rep.k = k;
  rep.eps0 = eps0;
  rep.estimate = EstimateIndistinguishability<std::vector<uint8_t>>(
      mech(0), mech(1), [k](const std::vector<uint8_t>& y) { return HasZeroColumn(y, k); },
      trials, rng);
  return rep;
}

// Distinguishing game against the two-iteration alternating shuffler with a
// public permutation, on all-distinct inputs (user u holds value u) and the
// neighbour that swaps users 0 and 1. The adversary knows the public
// permutation and uses that every output column holds exactly one item from
// each arranged row: a hypothesis that puts two items of one row in the same
// column is impossible. If both or neither hypothesis survives it guesses.
struct NotDoReport {
  uint32_t n = 0;
  uint64_t trials = 0;
  double success = 0;  // P[correct guess]
  double std_err = 0;
  double decided = 0;  // fraction of trials with exactly one consistent hypothesis
};

enum class NotDoTarget { kAlternating, kUniform };

inline NotDoReport AttackNotDo(uint32_t n, uint64_t trials, const Rng& rng,
                               NotDoTarget target = NotDoTarget::kAlternating) {
  const auto k = static_cast<uint32_t>(std::llround(std::sqrt(static_cast<double>(n))));
  if (k * k != n || n < 4) {
    throw NotSquare("n = " + std::to_string(n) + " must be a perfect square >= 4");
  }
  if (k > 64) throw TooLarge("the row bitmask supports at most 64 rows");
  if (trials < 10000) throw PreconditionViolated("need at least 10000 trials");
  Rng r = rng.Fork("not-do");
  uint64_t correct = 0, decided = 0;
  std::vector<uint32_t> row_of_user(n), owner(n);
  for (uint64_t trial = 0; trial < trials; ++trial) {
    const bool b = r.Bernoulli(0.5);
    std::vector<uint32_t> x(n);
    std::iota(x.begin(), x.end(), 0u);
    if (b) std::swap(x[0], x[1]);
    const auto pi = r.Permutation(n);
    std::vector<uint32_t> y;
    if (target == NotDoTarget::kAlternating) {
      y = AlternatingShufflePure<uint32_t>(x, k, k, 2, pi, r);
    } else {
      const auto sigma = r.Permutation(n);
      y.resize(n);
      for (uint32_t j = 0; j < n; ++j) y[j] = x[sigma[j]];
    }
    // Adversary.
    for (uint32_t pos = 0; pos < n; ++pos) row_of_user[pi[pos]] = pos / k;
    auto consistent = [&](bool hyp) {
      // Under hyp, value v belongs to owner[v].
      std::iota(owner.begin(), owner.end(), 0u);
      if (hyp) std::swap(owner[0], owner[1]);
      for (uint32_t c = 0; c < k; ++c) {
        uint64_t seen = 0;
        for (uint32_t rr = 0; rr < k; ++rr) {
          const uint64_t bit = uint64_t{1} << row_of_user[owner[y[rr * k + c]]];
          if (seen & bit) return false;
          seen |= bit;
        }
      }
      return true;
    };
    const bool c0 = consistent(false), c1 = consistent(true);
    bool guess;
    if (c0 != c1) {
      guess = c1;
      ++decided;
    } else {
      guess = r.Bernoulli(0.5);
    }
    correct += guess == b;
  }
  NotDoReport rep;
  rep.n = n;
  rep.trials = trials;
  const double t = static_cast<double>(trials);
  rep.success = static_cast<double>(correct) / t;
  rep.std_err = std::sqrt(rep.success * (1 - rep.success) / t);
  rep.decided = static_cast<double>(decided) / t;
  return rep;
}

// Exact success probability of the adversary above against the alternating
// shuffler: it decides exactly when the swapped users sit in different
// arranged rows and land in different output columns.
inline double NotDoExactSuccess(uint32_t n) {
  const double k = std::sqrt(static_cast<double>(n));
  const double decided = (k - 1) / (k + 1);
  return 0.5 + decided / 2;
}

}  // namespace shufflestack

#endif  // SHUFFLESTACK_DP_ACCOUNTANT_H_
