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

#include <algorithm>
#include <cmath>

#include "vscreen/error.hpp"
#include "vscreen/ml/preprocess.hpp"
#include "vscreen/rng.hpp"

namespace vscreen::ml {

namespace {

std::size_t train_count(std::size_t n, double fraction, std::size_t min_each_side) {
  auto k = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 0.5));
  if (n >= 2 * min_each_side) k = std::clamp(k, min_each_side, n - min_each_side);
  return k;
}

}  // namespace

SplitIndices split_labels(std::span<const int> labels, double train_fraction,
                          std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ArgumentError("train fraction must lie strictly between 0 and 1");
  }
  std::vector<std::size_t> actives;
  std::vector<std::size_t> inactives;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    (labels[i] == 1 ? actives : inactives).push_back(i);
  }
  if (actives.size() < 2) {
    throw DataError("split needs at least 2 actives (validation EF undefined), found " +
                    std::to_string(actives.size()));
  }
  if (labels.size() < 4) throw DataError("split needs at least 4 ligands");

  Rng rng(seed);
  SplitIndices out;
  for (auto* group : {&actives, &inactives}) {
    rng.shuffle(std::span<std::size_t>(*group));
    const std::size_t k = train_count(group->size(), train_fraction, 1);
    out.train.insert(out.train.end(), group->begin(), group->begin() + static_cast<std::ptrdiff_t>(k));
    out.validation.insert(out.validation.end(), group->begin() + static_cast<std::ptrdiff_t>(k),
                          group->end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.validation.begin(), out.validation.end());
  return out;
}

SplitIndices split_dataset(const ScreenDataset& ds, double train_fraction, std::uint64_t seed) {
  std::vector<int> labels;
  labels.reserve(ds.n_total());
  for (const auto& r : ds.records()) labels.push_back(r.label);
  return split_labels(labels, train_fraction, seed);
}

}  // namespace vscreen::ml
