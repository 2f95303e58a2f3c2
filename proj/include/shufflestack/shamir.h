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

#ifndef SHUFFLESTACK_SHAMIR_H_
#define SHUFFLESTACK_SHAMIR_H_

#include <cstdint>
#include <set>
#include <utility>
#include <vector>

#include "shufflestack/common.h"
#include "shufflestack/elgamal.h"
#include "shufflestack/rng.h"

namespace shufflestack {

// Threshold semantics: a t-out-of-n sharing uses a polynomial of degree t-1,
// so any t shares reconstruct and any t-1 reveal nothing.

template <class G>
struct SharePoint {
  uint32_t index;  // evaluation point, 1-based
  ScalarOf<G> value;
};

template <class G>
struct FeldmanCommitment {
  ElementOf<G> constant;             // g^secret
  std::vector<ElementOf<G>> coeffs;  // g^{a_1}, ..., g^{a_{t-1}}
};

template <class G>
struct Sharing {
  std::vector<SharePoint<G>> shares;
  FeldmanCommitment<G> commitment;
};

template <class G>
ScalarOf<G> EvalPolynomial(const std::vector<ScalarOf<G>>& coeffs, uint32_t x) {
  const ScalarOf<G> xs = G::SFromU64(x);
  ScalarOf<G> acc = G::SZero();
  for (size_t k = coeffs.size(); k-- > 0;) acc = acc * xs + coeffs[k];
  return acc;
}

// Shares `secret` with fresh random coefficients and commits to them.
template <class G>
Sharing<G> Share(const ScalarOf<G>& secret, int t, int n, Rng& rng) {
  if (t < 1 || t > n) {
    throw InvalidThreshold("need 1 <= t <= n, got t=" + std::to_string(t) +
                           " n=" + std::to_string(n));
  }
  std::vector<ScalarOf<G>> poly(t);
  poly[0] = secret;
  for (int k = 1; k < t; ++k) poly[k] = G::SRandom(rng);
  Sharing<G> out;
  out.shares.reserve(n);
  for (int j = 1; j <= n; ++j) {
    out.shares.push_back({static_cast<uint32_t>(j), EvalPolynomial<G>(poly, j)});
  }
  out.commitment.constant = G::ExpG(secret);
  for (int k = 1; k < t; ++k) out.commitment.coeffs.push_back(G::ExpG(poly[k]));
  return out;
}

// g^{P(j)} from the coefficient commitments, by Horner's rule in the
// exponent.
template <class G>
ElementOf<G> DeriveShareCommitment(const FeldmanCommitment<G>& comm,
                                   uint32_t j) {
  const ScalarOf<G> xs = G::SFromU64(j);
  ElementOf<G> acc = G::Identity();
  for (size_t k = comm.coeffs.size(); k-- > 0;) {
    acc = G::Exp(acc * comm.coeffs[k], xs);
  }
  return acc * comm.constant;
}

template <class G>
bool VerifyShare(const FeldmanCommitment<G>& comm, const SharePoint<G>& sp) {
  return G::ExpG(sp.value) == DeriveShareCommitment<G>(comm, sp.index);
}

// Lagrange coefficients at zero for the given distinct evaluation points.
template <class G>
std::vector<ScalarOf<G>> LagrangeAtZero(const std::vector<uint32_t>& xs) {
  std::vector<ScalarOf<G>> out(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) {
    ScalarOf<G> num = G::SOne(), den = G::SOne();
    const ScalarOf<G> xi = G::SFromU64(xs[i]);
    for (size_t k = 0; k < xs.size(); ++k) {
      if (k == i) continue;
      const ScalarOf<G> xk = G::SFromU64(xs[k]);
      num = num * xk;
      den = den * (xk - xi);
    }
    out[i] = num * G::SInv(den);
  }
  return out;
}

namespace internal {

// Picks the first t entries with distinct positive indices.
template <class P>
std::vector<size_t> PickDistinct(const std::vector<P>& pts, int t,
                                 uint32_t (*index_of)(const P&)) {
  if (t < 1) throw InvalidThreshold("threshold must be positive");
  std::vector<size_t> chosen;
  std::set<uint32_t> seen;
  for (size_t i = 0; i < pts.size() && static_cast<int>(chosen.size()) < t; ++i) {
    uint32_t idx = index_of(pts[i]);
    if (idx == 0) throw DomainError("share index must be positive");
    if (seen.insert(idx).second) chosen.push_back(i);
  }
  if (static_cast<int>(chosen.size()) < t) {
    throw NotEnoughShares("have " + std::to_string(chosen.size()) +
                          " distinct shares, need " + std::to_string(t));
  }
  return chosen;
}

}  // namespace internal

// Interpolates at zero from the first t distinct shares.
template <class G>
ScalarOf<G> Reconstruct(const std::vector<SharePoint<G>>& shares, int t) {
  auto chosen = internal::PickDistinct<SharePoint<G>>(
      shares, t, [](const SharePoint<G>& s) { return s.index; });
  std::vector<uint32_t> xs;
  for (size_t i : chosen) xs.push_back(shares[i].index);
  auto lambda = LagrangeAtZero<G>(xs);
  ScalarOf<G> acc = G::SZero();
  for (size_t k = 0; k < chosen.size(); ++k) {
    acc = acc + lambda[k] * shares[chosen[k]].value;
  }
  return acc;
}

// prod_j v_j^{lambda_j}: maps points (j, h^{P(j)}) to h^{P(0)}.
template <class G>
ElementOf<G> InterpolateInExponent(
    const std::vector<std::pair<uint32_t, ElementOf<G>>>& points, int t) {
  using Point = std::pair<uint32_t, ElementOf<G>>;
  auto chosen = internal::PickDistinct<Point>(
      points, t, [](const Point& p) { return p.first; });
  std::vector<uint32_t> xs;
  for (size_t i : chosen) xs.push_back(points[i].first);
  auto lambda = LagrangeAtZero<G>(xs);
  ElementOf<G> acc = G::Identity();
  for (size_t k = 0; k < chosen.size(); ++k) {
    acc = acc * G::Exp(points[chosen[k]].second, lambda[k]);
  }
  return acc;
}

// Batched form for many bases sharing one set of indices, used by the
// decryption server: out[i] = prod_j vs[j][i]^{lambda_j}.
template <class G>
std::vector<ElementOf<G>> InterpolateInExponentBatch(
    const std::vector<uint32_t>& indices,
    const std::vector<std::vector<ElementOf<G>>>& vs, int t) {
  if (static_cast<int>(indices.size()) < t) {
    throw NotEnoughShares("have " + std::to_string(indices.size()) +
                          " responses, need " + std::to_string(t));
  }
  std::vector<uint32_t> xs(indices.begin(), indices.begin() + t);
  auto lambda = LagrangeAtZero<G>(xs);
  const size_t k = vs.empty() ? 0 : vs[0].size();
  std::vector<ElementOf<G>> out(k, G::Identity());
  for (int j = 0; j < t; ++j) {
    for (size_t i = 0; i < k; ++i) out[i] = out[i] * G::Exp(vs[j][i], lambda[j]);
  }
  return out;
}

}  // namespace shufflestack

#endif  // SHUFFLESTACK_SHAMIR_H_
