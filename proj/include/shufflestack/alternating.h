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

#ifndef SHUFFLESTACK_ALTERNATING_H_
#define SHUFFLESTACK_ALTERNATING_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "shufflestack/common.h"
#include "shufflestack/rng.h"
#include "shufflestack/zk.h"

namespace shufflestack {

// The ideal alternating shuffler. Items are laid out row-major in an h x w
// grid through a public permutation (grid[pos] = items[public_perm[pos]]),
// then ell times every row is permuted independently and the grid is
// transposed. The final grid is read out row-major.
//
// A row permutation p acts as new_row[j] = old_row[p[j]], the same
// convention as the verifiable shuffle.

// Supplies the permutation of row `row` in iteration `iter`.
using RowPermSource =
    std::function<std::vector<uint32_t>(uint32_t iter, uint32_t row, uint32_t len)>;

// Transposes an rows x cols row-major grid.
template <class T>
std::vector<T> Transpose(const std::vector<T>& grid, uint32_t rows, uint32_t cols) {
  std::vector<T> out(grid.size());
  for (uint32_t r = 0; r < rows; ++r) {
    for (uint32_t c = 0; c < cols; ++c) out[c * rows + r] = grid[r * cols + c];
  }
  return out;
}

template <class T>
std::vector<T> ArrangeGrid(const std::vector<T>& items,
                           const std::vector<uint32_t>& public_perm) {
  if (public_perm.empty()) return items;
  if (public_perm.size() != items.size() || !IsPermutation(public_perm)) {
    throw SizeMismatch("public permutation does not match the item count");
  }
  std::vector<T> grid(items.size());
  for (size_t pos = 0; pos < items.size(); ++pos) grid[pos] = items[public_perm[pos]];
  return grid;
}

template <class T>
std::vector<T> AlternatingShufflePure(const std::vector<T>& items, uint32_t h,
                                      uint32_t w, uint32_t ell,
                                      const std::vector<uint32_t>& public_perm,
                                      const RowPermSource& rows) {
  if (static_cast<uint64_t>(h) * w != items.size()) {
    throw SizeMismatch("grid " + std::to_string(h) + "x" + std::to_string(w) +
                       " does not hold " + std::to_string(items.size()) + " items");
  }
  std::vector<T> grid = ArrangeGrid(items, public_perm);
  uint32_t H = h, W = w;
  for (uint32_t it = 0; it < ell; ++it) {
    std::vector<T> next(grid.size());
    for (uint32_t r = 0; r < H; ++r) {
      std::vector<uint32_t> p = rows(it, r, W);
      if (p.size() != W || !IsPermutation(p)) {
        throw SizeMismatch("row permutation has the wrong shape");
      }
      for (uint32_t j = 0; j < W; ++j) next[r * W + j] = grid[r * W + p[j]];
    }
    grid = Transpose(next, H, W);
    std::swap(H, W);
  }
  return grid;
}

// Samples every row permutation uniformly from rng, in iteration-major,
// row-minor order.
template <class T>
std::vector<T> AlternatingShufflePure(const std::vector<T>& items, uint32_t h,
                                      uint32_t w, uint32_t ell,
                                      const std::vector<uint32_t>& public_perm, Rng& rng) {
  return AlternatingShufflePure<T>(
      items, h, w, ell, public_perm,
      [&rng](uint32_t, uint32_t, uint32_t len) { return rng.Permutation(len); });
}

// ---------------------------------------------------------------------------
// Permutation ranking (lexicographic) for dense distributions over S_n.

inline uint64_t Factorial(uint32_t n) {
  uint64_t f = 1;
  for (uint32_t i = 2; i <= n; ++i) f *= i;
  return f;
}

inline uint64_t RankPermutation(const std::vector<uint32_t>& perm) {
  const size_t n = perm.size();
  uint64_t rank = 0;
  for (size_t i = 0; i < n; ++i) {
    uint32_t smaller = 0;
    for (size_t j = i + 1; j < n; ++j) smaller += perm[j] < perm[i];
    rank = rank * (n - i) + smaller;
  }
  return rank;
}

inline std::vector<uint32_t> UnrankPermutation(uint64_t rank, uint32_t n) {
  std::vector<uint32_t> digits(n);
  for (uint32_t i = n; i-- > 0;) {
    digits[i] = static_cast<uint32_t>(rank % (n - i));
    rank /= (n - i);
  }
  std::vector<uint32_t> pool(n);
  std::iota(pool.begin(), pool.end(), 0u);
  std::vector<uint32_t> perm(n);
  for (uint32_t i = 0; i < n; ++i) {
    perm[i] = pool[digits[i]];
    pool.erase(pool.begin() + digits[i]);
  }
  return perm;
}

// Exact output distribution of the alternating shuffler, indexed by the rank
// of sigma where output[j] = input[sigma[j]]. Computed by dynamic
// programming over S_n, one row at a time.
class PermutationDistribution {
 public:
  explicit PermutationDistribution(uint32_t n) : n_(n), p_(Factorial(n), 0.0) {}

  uint32_t n() const { return n_; }
  double operator[](uint64_t rank) const { return p_[rank]; }
  double& operator[](uint64_t rank) { return p_[rank]; }
  size_t size() const { return p_.size(); }
  double Prob(const std::vector<uint32_t>& perm) const { return p_[RankPermutation(perm)]; }

  size_t Support() const {
    size_t s = 0;
    for (double v : p_) s += v > 0;
    return s;
  }

  double TvdToUniform() const {
    const double u = 1.0 / static_cast<double>(p_.size());
    double acc = 0;
    for (double v : p_) acc += std::abs(v - u);
    return acc / 2;
  }

  double Tvd(const PermutationDistribution& other) const {
    if (other.n_ != n_) throw SizeMismatch("distributions over different S_n");
    double acc = 0;
    for (size_t i = 0; i < p_.size(); ++i) acc += std::abs(p_[i] - other.p_[i]);
    return acc / 2;
  }

 private:
  uint32_t n_;
  std::vector<double> p_;
};

inline constexpr uint32_t kMaxEnumerationItems = 9;
inline constexpr uint32_t kMaxEnumerationIterations = 6;

inline PermutationDistribution EnumerateAsDistribution(
    uint32_t n, uint32_t h, uint32_t w, uint32_t ell,
    const std::vector<uint32_t>& public_perm = {}) {
  if (static_cast<uint64_t>(h) * w != n) throw SizeMismatch("h * w must equal n");
  if (n > kMaxEnumerationItems || ell > kMaxEnumerationIterations) {
    throw TooLarge("exact enumeration is limited to n <= 9 and ell <= 6");
  }
  std::vector<uint32_t> start(n);
  std::iota(start.begin(), start.end(), 0u);
  start = ArrangeGrid(start, public_perm);

  PermutationDistribution dist(n);
  dist[RankPermutation(start)] = 1.0;
  uint32_t H = h, W = w;
  std::vector<std::vector<uint32_t>> row_perms;
  for (uint32_t it = 0; it < ell; ++it) {
    // All permutations of one row.
    row_perms.clear();
    std::vector<uint32_t> p(W);
    std::iota(p.begin(), p.end(), 0u);
    do {
      row_perms.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    const double weight = 1.0 / static_cast<double>(row_perms.size());
    for (uint32_t r = 0; r < H; ++r) {
      PermutationDistribution next(n);
      for (uint64_t k = 0; k < dist.size(); ++k) {
        if (dist[k] == 0) continue;
        const auto sigma = UnrankPermutation(k, n);
        auto moved = sigma;
        for (const auto& rp : row_perms) {
          for (uint32_t j = 0; j < W; ++j) moved[r * W + j] = sigma[r * W + rp[j]];
          next[RankPermutation(moved)] += dist[k] * weight;
        }
      }
      dist = std::move(next);
    }
    PermutationDistribution next(n);
    for (uint64_t k = 0; k < dist.size(); ++k) {
      if (dist[k] == 0) continue;
      next[RankPermutation(Transpose(UnrankPermutation(k, n), H, W))] += dist[k];
    }
    dist = std::move(next);
    std::swap(H, W);
  }
  return dist;
}

}  // namespace shufflestack

#endif  // SHUFFLESTACK_ALTERNATING_H_
