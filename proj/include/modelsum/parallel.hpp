// Copyright 2026 The modelsum Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
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
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "modelsum/error.hpp"

namespace modelsum {

/// Runs fn(i) for i in [0, count) on up to `workers` threads. Each index is
/// executed exactly once; callers write results into slot i so the outcome is
/// independent of scheduling. If any call throws, the exception raised by
/// the lowest index is rethrown after all threads finish.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t workers, Fn&& fn) {
  if (count == 0) return;
  workers = std::clamp<std::size_t>(workers, 1, count);
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

/// Worker count from an explicit setting, else MODELSUM_WORKERS, else 1.
inline std::size_t resolve_workers(std::optional<std::size_t> requested = std::nullopt) {
  if (requested) {
    if (*requested == 0) throw UsageError("worker count must be at least 1");
    return *requested;
  }
  if (const char* env = std::getenv("MODELSUM_WORKERS"); env && *env) {
    try {
      std::size_t pos = 0;
      long v = std::stol(env, &pos);
      if (pos == std::string(env).size() && v >= 1) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    throw UsageError(std::string("invalid MODELSUM_WORKERS value: ") + env);
  }
  return 1;
}

}  // namespace modelsum
