/*
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "vscreen/ml/mlp.hpp"
#include "vscreen/rank_engine.hpp"

namespace vscreen::app {

/// "all" or builtin names, matched case-insensitively, in canonical form.
std::vector<std::string> normalize_schemes(const std::vector<std::string>& in);
/// "autodock", "diffdock", "all"; "global" is accepted and ignored since the
/// Global scheme always spans both pathways.
std::vector<PathwaySelection> normalize_pathways(const std::vector<std::string>& in);
/// "wnn" / "wide" or "deep".
ml::NetConfig net_preset(std::string_view name);

/// Runs fn(i) for i in [0, n) on up to `jobs` threads (0 = hardware
/// concurrency). Callers write results into slot i, so output order never
/// depends on scheduling. The exception of the lowest failing index is
/// rethrown.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t jobs, Fn&& fn) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, n);
  if (jobs <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < jobs; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace vscreen::app
