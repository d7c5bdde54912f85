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

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace vscreen {

/// Portable seeded generator (format version 1).
///
/// Raw bits come from std::mt19937_64, whose recurrence is fixed by the C++
/// standard. Every derived draw is defined here rather than through the
/// implementation-defined std:: distributions, so a given seed produces the
/// same sequence with any conforming standard library:
///
///   uniform()  = (u64 >> 11) * 2^-53                 in [0, 1)
///   below(n)   = rejection-sampled u64 % n            unbiased
///   normal()   = Box-Muller on two uniform() draws, second value cached
class Rng {
 public:
  static constexpr int kFormatVersion = 1;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  double uniform();
  std::size_t below(std::size_t n);
  double normal();

  /// Fisher-Yates, drawing j = below(i + 1) from the back.
  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = below(i);
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// SplitMix64 finalizer over (seed, stream); used to derive independent
/// sub-stream seeds (per target, per scorer, per epoch, ...).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace vscreen
