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

#ifndef SHUFFLESTACK_EXP_COUNTER_H_
#define SHUFFLESTACK_EXP_COUNTER_H_

#include <cstdint>

namespace shufflestack {

// Exponentiation tally for one party. Groups bump whatever counter is
// installed on the current thread, so protocol code only needs to open a
// CountingScope around the work it does on a party's behalf.
struct ExpCounter {
  uint64_t exps = 0;
};

namespace internal {
inline thread_local ExpCounter* current_counter = nullptr;
}  // namespace internal

inline void CountExp(uint64_t k = 1) {
  if (internal::current_counter != nullptr) internal::current_counter->exps += k;
}

class CountingScope {
 public:
  explicit CountingScope(ExpCounter* c) : prev_(internal::current_counter) {
    internal::current_counter = c;
  }
  ~CountingScope() { internal::current_counter = prev_; }
  CountingScope(const CountingScope&) = delete;
  CountingScope& operator=(const CountingScope&) = delete;

 private:
  ExpCounter* prev_;
};

}  // namespace shufflestack

#endif  // SHUFFLESTACK_EXP_COUNTER_H_
