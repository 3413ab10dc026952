// Copyright 2026 The qrem-bias Authors
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

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

#include "qrem/detail/text.hpp"

namespace qrem::detail {

/// Worker count from QREM_THREADS, else hardware concurrency (at least 1).
inline std::size_t thread_count() {
  if (const char* env = std::getenv("QREM_THREADS")) {
    if (auto v = parse_uint(env); v && *v > 0) return static_cast<std::size_t>(*v);
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [0, count) across `workers` threads. Each index is
/// handled exactly once; the first exception is rethrown after joining.
template <typename Body>
void parallel_for(std::size_t count, Body&& body, std::size_t workers = thread_count()) {
  workers = std::min(workers, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

/// Pairwise (tree) sum; the association order depends only on the length.
inline double pairwise_sum(std::span<const double> v) {
  if (v.empty()) return 0.0;
  if (v.size() == 1) return v[0];
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

}  // namespace qrem::detail
