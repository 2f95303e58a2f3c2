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

#ifndef SHUFFLESTACK_IKOS_H_
#define SHUFFLESTACK_IKOS_H_

// Split-and-shuffle secure summation over Z_q through m two-iteration
// alternating shufflers that share one public permutation, its security
// parameters, and differentially private real summation on top of it.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "shufflestack/alternating.h"
#include "shufflestack/common.h"
#include "shufflestack/rng.h"

namespace shufflestack {

inline uint32_t ExactSqrt(uint64_t n) {
  const auto k = static_cast<uint64_t>(std::llround(std::sqrt(static_cast<double>(n))));
  if (k * k != n || n == 0) {
    throw NotSquare("n = " + std::to_string(n) + " is not a positive perfect square");
  }
  return static_cast<uint32_t>(k);
}

// m additive shares of x mod q: the first m - 1 uniform, the last completing
// the sum.
inline std::vector<uint64_t> SplitShares(uint64_t x, uint32_t m, uint64_t q, Rng& rng) {
  if (q < 2) throw DomainError("q must be at least 2");
  if (m < 1) throw DomainError("m must be positive");
  if (x >= q) throw DomainError("input must lie in [0, q)");
  std::vector<uint64_t> s(m);
  uint64_t acc = 0;
  for (uint32_t j = 0; j + 1 < m; ++j) {
    s[j] = rng.UniformBelow(q);
    acc = (acc + s[j]) % q;
  }
  s[m - 1] = (x + q - acc) % q;
  return s;
}

// What the server sees: the public permutation and, per instance, the
// shuffled shares.
struct IkosView {
  uint64_t q = 0;
  std::vector<uint32_t> public_perm;
  std::vector<std::vector<uint64_t>> outputs;  // m rows of n shares

  uint64_t Sum() const {
    uint64_t s = 0;
    for (const auto& row : outputs) {
      for (uint64_t v : row) s = (s + v) % q;
    }
    return s;
  }
};

// Runs each share column through its own alternating shuffler. shares[i] are
// client i's m shares; a corrupt client may submit anything in [0, q).
inline IkosView IkosViewFromShares(const std::vector<std::vector<uint64_t>>& shares,
                                   uint64_t q, const Rng& rng) {
  const uint32_t k = ExactSqrt(shares.size());
  const size_t m = shares.empty() ? 0 : shares[0].size();
  IkosView v;
  v.q = q;
  v.public_perm = rng.Fork("ikos-public").Permutation(static_cast<uint32_t>(shares.size()));
  for (size_t j = 0; j < m; ++j) {
    std::vector<uint64_t> col(shares.size());
    for (size_t i = 0; i < shares.size(); ++i) {
      if (shares[i].size() != m) throw SizeMismatch("clients sent different share counts");
      if (shares[i][j] >= q) throw DomainError("share out of range");
      col[i] = shares[i][j];
    }
    Rng inst = rng.Fork("ikos-instance", j);
    v.outputs.push_back(AlternatingShufflePure<uint64_t>(col, k, k, 2, v.public_perm, inst));
  }
  return v;
}

inline IkosView IkosViewOf(const std::vector<uint64_t>& xs, uint32_t m, uint64_t q,
                           uint64_t seed) {
  ExactSqrt(xs.size());
  Rng rng(seed);
  Rng split = rng.Fork("ikos-split");
  std::vector<std::vector<uint64_t>> shares;
  shares.reserve(xs.size());
  for (uint64_t x : xs) shares.push_back(SplitShares(x, m, q, split));
  return IkosViewFromShares(shares, q, rng);
}

// Worst-case statistical security of the m-instance view, all clients honest.
inline double SigmaIkos(uint64_t n, uint32_t m, double q) {
  if (n < 361 || m < 3) {
    throw PreconditionViolated("the summation bound needs n >= 361 and m >= 3; got n = " +
                               std::to_string(n) + ", m = " + std::to_string(m));
  }
  if (!(q >= 2)) throw DomainError("q must be at least 2");
  const double log2e = std::log2(std::exp(1.0));
  return (m - 2) * (0.5 * std::log2(static_cast<double>(n)) - log2e) - std::log2(q) - 2;
}

// Honest per-row count guaranteed by the public permutation at security
// level sigma: (1 - gamma) sqrt(n) - (sigma + ln n)^{1/2} n^{1/4}.
inline double IkosHonestRow(uint64_t n, double gamma, double sigma) {
  const double nd = static_cast<double>(n);
  return (1 - gamma) * std::sqrt(nd) - std::sqrt(sigma + std::log(nd)) * std::pow(nd, 0.25);
}

// Largest sigma in [0, 256] (to 1e-3) with honest row >= 19 and
// sigma <= (m - 2) log2(row / e) - log2 q - 3.
inline double SigmaIkosCorrupted(uint64_t n, uint32_t m, double q, double gamma) {
  if (m < 3) throw PreconditionViolated("the summation bound needs m >= 3");
  if (!(gamma >= 0 && gamma < 1)) throw DomainError("gamma must lie in [0, 1)");
  if (!(q >= 2)) throw DomainError("q must be at least 2");
  if (n == 0) throw DomainError("n must be positive");
  const double log2e = std::log2(std::exp(1.0));
  auto ok = [&](double sigma) {
    const double row = IkosHonestRow(n, gamma, sigma);
    if (row < 19) return false;
    return sigma <= (m - 2) * (std::log2(row) - log2e) - std::log2(q) - 3;
  };
  if (!ok(0)) {
    throw Infeasible("no sigma >= 0 satisfies the corrupted-input summation bound");
  }
  double lo = 0, hi = 256;
  if (ok(hi)) return hi;
  while (hi - lo > 1e-3) {
    const double mid = (lo + hi) / 2;
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

// ---------------------------------------------------------------------------
// Exact view distance at toy scale.

// Statistical distance between the views of xs and ys (public permutation
// included), summing over every public permutation, share vector and row
// permutation. Vectors in Z_q^n are indexed base q.
inline double IkosViewDistance(const std::vector<uint64_t>& xs,
                               const std::vector<uint64_t>& ys, uint32_t m, uint64_t q) {
  if (xs.size() != ys.size()) throw SizeMismatch("inputs differ in length");
  const uint32_t n = static_cast<uint32_t>(xs.size());
  const uint32_t k = ExactSqrt(n);
  if (m < 1 || q < 2) throw DomainError("need m >= 1 and q >= 2");
  uint64_t space = 1;
  for (uint32_t i = 0; i < n; ++i) space *= q;
  double cells = 1;
  for (uint32_t j = 0; j < m; ++j) cells *= static_cast<double>(space);
  if (n > 4 || cells > 1e7 || space > 4096) throw TooLarge("exact view enumeration is limited to tiny cases");

  auto encode = [&](const std::vector<uint64_t>& v) {
    uint64_t idx = 0;
    for (uint32_t i = n; i-- > 0;) idx = idx * q + v[i] % q;
    return idx;
  };
  auto decode = [&](uint64_t idx) {
    std::vector<uint64_t> v(n);
    for (uint32_t i = 0; i < n; ++i) {
      v[i] = idx % q;
      idx /= q;
    }
    return v;
  };
  // Coordinate-wise addition and subtraction tables.
  std::vector<uint64_t> add_t(space * space), sub_t(space * space);
  for (uint64_t a = 0; a < space; ++a) {
    const auto va = decode(a);
    for (uint64_t b = 0; b < space; ++b) {
      const auto vb = decode(b);
      std::vector<uint64_t> sum(n), diff(n);
      for (uint32_t i = 0; i < n; ++i) {
        sum[i] = (va[i] + vb[i]) % q;
        diff[i] = (va[i] + q - vb[i]) % q;
      }
      add_t[a * space + b] = encode(sum);
      sub_t[a * space + b] = encode(diff);
    }
  }
  auto add = [&](uint64_t a, uint64_t b) { return add_t[a * space + b]; };
  auto sub = [&](uint64_t a, uint64_t b) { return sub_t[a * space + b]; };
  const uint64_t x_idx = encode(xs), y_idx = encode(ys);
  const double share_weight = std::pow(static_cast<double>(q), -static_cast<double>(n) * (m - 1));

  double total = 0;
  const uint64_t n_pi = Factorial(n);
  for (uint64_t pr = 0; pr < n_pi; ++pr) {
    const auto pi = UnrankPermutation(pr, n);
    const auto dist = EnumerateAsDistribution(n, k, k, 2, pi);
    // For each output vector o: the distribution of the input vector it
    // came from, as (preimage index, probability) pairs.
    std::vector<std::vector<std::pair<uint64_t, double>>> pre(space);
    std::vector<std::pair<std::vector<uint32_t>, double>> perms;
    for (uint64_t r = 0; r < dist.size(); ++r) {
      if (dist[r] > 0) perms.push_back({UnrankPermutation(r, n), dist[r]});
    }
    for (uint64_t o = 0; o < space; ++o) {
      const auto ov = decode(o);
      std::vector<uint64_t> yv(n);
      for (const auto& [sigma, p] : perms) {
        for (uint32_t j = 0; j < n; ++j) yv[sigma[j]] = ov[j];
        pre[o].push_back({encode(yv), p});
      }
    }
    // partial[view prefix][sum of preimages], built one instance at a time.
    std::vector<std::vector<double>> partial(1, std::vector<double>(space, 0));
    partial[0][0] = 1;
    for (uint32_t j = 0; j + 1 < m; ++j) {
      std::vector<std::vector<double>> next(partial.size() * space,
                                           std::vector<double>(space, 0));
      for (size_t v = 0; v < partial.size(); ++v) {
        for (uint64_t o = 0; o < space; ++o) {
          auto& dst = next[v * space + o];
          for (uint64_t s = 0; s < space; ++s) {
            if (partial[v][s] == 0) continue;
            for (const auto& [y, p] : pre[o]) dst[add(s, y)] += partial[v][s] * p;
          }
        }
      }
      partial = std::move(next);
    }
    double pi_dist = 0;
    for (size_t v = 0; v < partial.size(); ++v) {
      for (uint64_t o = 0; o < space; ++o) {
        double px = 0, py = 0;
        for (const auto& [y, p] : pre[o]) {
          px += partial[v][sub(x_idx, y)] * p;
          py += partial[v][sub(y_idx, y)] * p;
        }
        pi_dist += std::abs(px - py);
      }
    }
    total += pi_dist * share_weight / 2;
  }
  return total / static_cast<double>(n_pi);
}

// ---------------------------------------------------------------------------
// Differentially private real summation.

struct DpSumResult {
  uint64_t n = 0;
  uint32_t m = 0;
  uint64_t q = 0;
  double p = 0;               // discrete Laplace parameter e^{-eps / sqrt(n)}
  double true_sum = 0;
  double quantized_sum = 0;   // sum of rounded inputs, de-quantized
  double noisy_sum = 0;
  double squared_error = 0;   // (noisy_sum - true_sum)^2
  double quantization_error = 0;  // |quantized_sum - true_sum|
  int64_t noise = 0;          // aggregate noise in grid units
  uint32_t bits_per_message = 0;
};

// Analytic variance of the aggregate noise after de-quantization.
inline double DpSumNoiseVariance(uint64_t n, double eps) {
  const double p = std::exp(-eps / std::sqrt(static_cast<double>(n)));
  return 2 * p / ((1 - p) * (1 - p)) / static_cast<double>(n);
}

// Negative binomial with real shape r: Poisson with a Gamma(r, p / (1 - p))
// rate, so that n draws at r = 1/n sum to a geometric variable.
inline int64_t SampleNegBinomial(double r, double p, Rng& rng) {
  if (p <= 0) return 0;
  std::gamma_distribution<double> gamma(r, p / (1 - p));
  const double lambda = gamma(rng);
  if (lambda <= 0) return 0;
  std::poisson_distribution<int64_t> poisson(lambda);
  return poisson(rng);
}

inline DpSumResult DpSum(const std::vector<double>& reals, double eps, uint32_t m,
                         uint64_t seed) {
  const uint32_t k = ExactSqrt(reals.size());
  if (!(eps > 0)) throw DomainError("eps must be positive");
  if (m < 1) throw DomainError("m must be positive");
  const uint64_t n = reals.size();
  DpSumResult res;
  res.n = n;
  res.m = m;
  res.q = 2 * n * k;
  res.p = std::isinf(eps) ? 0 : std::exp(-eps / k);
  res.bits_per_message = static_cast<uint32_t>(std::ceil(std::log2(static_cast<double>(res.q))));
  Rng rng(seed);
  Rng noise_rng = rng.Fork("dp-noise");
  std::vector<uint64_t> encoded(n);
  int64_t quantized = 0;
  for (uint64_t i = 0; i < n; ++i) {
    const double x = reals[i];
    if (!(x >= 0 && x <= 1)) throw DomainError("inputs must lie in [0, 1]");
    res.true_sum += x;
    const auto level = static_cast<int64_t>(std::llround(x * k));
    quantized += level;
    const int64_t z = SampleNegBinomial(1.0 / n, res.p, noise_rng) -
                      SampleNegBinomial(1.0 / n, res.p, noise_rng);
    res.noise += z;
    const auto qq = static_cast<int64_t>(res.q);
    encoded[i] = static_cast<uint64_t>(((level + z) % qq + qq) % qq);
  }
  const IkosView view = IkosViewOf(encoded, m, res.q, rng.Fork("dp-ikos").NextU64());
  // True quantized sums lie in [0, q/2]; decode in a window with margin q/4
  // on both sides.
  const auto qq = static_cast<int64_t>(res.q);
  int64_t s = static_cast<int64_t>(view.Sum());
  s = (s + qq / 4) % qq - qq / 4;
  res.quantized_sum = static_cast<double>(quantized) / k;
  res.noisy_sum = static_cast<double>(s) / k;
  res.squared_error = (res.noisy_sum - res.true_sum) * (res.noisy_sum - res.true_sum);
  res.quantization_error = std::abs(res.quantized_sum - res.true_sum);
  return res;
}

}  // namespace shufflestack

#endif  // SHUFFLESTACK_IKOS_H_
