// Copyright 2026 The morphalign Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MORPHALIGN_PARALLEL_HPP
#define MORPHALIGN_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace morphalign {

/// How work over sentence pairs is split. The shard count fixes the
/// partition and the merge order, so results do not depend on how many
/// threads execute the shards.
struct ExecPolicy {
  unsigned threads = 0;  // 0: MORPHALIGN_THREADS, else hardware concurrency
  std::size_t shards = 8;
};

/// Worker cap from MORPHALIGN_THREADS (0 or unset means automatic).
inline unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("MORPHALIGN_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Half-open item range of shard `s` when `n` items are cut into `shards`
/// contiguous pieces.
inline std::pair<std::size_t, std::size_t> shard_range(std::size_t n,
                                                       std::size_t shards,
                                                       std::size_t s) {
  const std::size_t base = n / shards, extra = n % shards;
  const std::size_t begin = s * base + std::min(s, extra);
  return {begin, begin + base + (s < extra ? 1 : 0)};
}

/// Runs fn(shard) for every shard on up to `threads` workers. The first
/// exception thrown by any shard is rethrown after all workers finish.
template <class Fn>
void run_shards(std::size_t shards, unsigned threads, Fn&& fn) {
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(threads, shards));
  if (workers <= 1) {
    for (std::size_t s = 0; s < shards; ++s) fn(s);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t s = next++; s < shards; s = next++) {
        try {
          fn(s);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

/// Map-reduce over items [0, n): each shard folds its items into its own
/// accumulator, then accumulators are merged in shard order. `Acc` needs
/// `void merge(const Acc&)`.
template <class Acc, class Make, class Body>
Acc sharded_reduce(std::size_t n, const ExecPolicy& policy, Make make,
                   Body body) {
  const std::size_t shards = std::max<std::size_t>(
      1, std::min(policy.shards, std::max<std::size_t>(n, 1)));
  std::vector<Acc> partial;
  partial.reserve(shards);
  for (std::size_t s = 0; s < shards; ++s) partial.push_back(make());
  run_shards(shards, resolve_threads(policy.threads), [&](std::size_t s) {
    const auto [begin, end] = shard_range(n, shards, s);
    for (std::size_t k = begin; k < end; ++k) body(partial[s], k);
  });
  Acc out = std::move(partial[0]);
  for (std::size_t s = 1; s < shards; ++s) out.merge(partial[s]);
  return out;
}

/// Calls fn(k) for every k in [0, n); any output must be written by index.
template <class Fn>
void parallel_for(std::size_t n, const ExecPolicy& policy, Fn fn) {
  const std::size_t shards = std::max<std::size_t>(
      1, std::min(policy.shards, std::max<std::size_t>(n, 1)));
  run_shards(shards, resolve_threads(policy.threads), [&](std::size_t s) {
    const auto [begin, end] = shard_range(n, shards, s);
    for (std::size_t k = begin; k < end; ++k) fn(k);
  });
}

}  // namespace morphalign

#endif  // MORPHALIGN_PARALLEL_HPP
