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
#include <limits>
#include <numeric>

#include "vscreen/error.hpp"
#include "vscreen/metrics.hpp"

namespace vscreen {

RankedLibrary ranked_library(const ScreenDataset& ds, const RankTable& table) {
  const std::size_t s = ds.scorer_index(table.scorer_id);
  if (table.n_ranked() != ds.n_total()) {
    throw ArgumentError("rank table does not cover the dataset");
  }
  RankedLibrary lib;
  lib.n_total_library = ds.n_total();
  lib.n_actives_total = ds.n_actives();
  lib.labels.reserve(table.order.size());
  lib.scores.reserve(table.order.size());
  for (std::size_t idx : table.order) {
    lib.labels.push_back(ds.record(idx).label);
    const auto v = ds.oriented_score(idx, s);
    lib.scores.push_back(v ? *v : -std::numeric_limits<double>::infinity());
  }
  return lib;
}

RankedLibrary ranked_library(const ConsensusRanking& ranking) {
  RankedLibrary lib;
  lib.n_total_library = ranking.n_total;
  lib.n_actives_total = ranking.n_actives;
  for (const auto& e : ranking.retained) {
    lib.labels.push_back(e.label);
    lib.scores.push_back(-e.average_rank);
  }
  return lib;
}

RankedLibrary ranked_library_from_scores(std::span<const double> scores,
                                         std::span<const int> labels,
                                         std::span<const std::string> ids) {
  if (scores.size() != labels.size() || ids.size() != labels.size()) {
    throw ArgumentError("scores, labels and ids differ in length");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return ids[a] < ids[b];
  });
  RankedLibrary lib;
  lib.n_total_library = scores.size();
  for (std::size_t i : order) {
    lib.labels.push_back(labels[i]);
    lib.scores.push_back(scores[i]);
    lib.n_actives_total += labels[i] == 1 ? 1 : 0;
  }
  return lib;
}

std::size_t ef_window(std::size_t n_total, double x_pct) {
  if (!(x_pct > 0.0) || x_pct > 100.0) {
    throw ArgumentError("EF percentage must lie in (0, 100]");
  }
  // the small epsilon keeps exact products such as 10000 * 1 / 100 from
  // landing a hair under the integer
  const double raw = static_cast<double>(n_total) * x_pct / 100.0;
  const auto w = static_cast<std::size_t>(std::floor(raw + 1e-9));
  return std::max<std::size_t>(1, w);
}

double enrichment_factor(const RankedLibrary& lib, double x_pct) {
  const std::size_t w = ef_window(lib.n_total_library, x_pct);
  if (lib.n_actives_total == 0) {
    throw MetricError("enrichment factor undefined: library has no actives");
  }
  const std::size_t inspected = std::min(w, lib.retained_count());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < inspected; ++i) hits += lib.labels[i] == 1 ? 1 : 0;
  const double hit_rate = static_cast<double>(hits) / static_cast<double>(w);
  const double base_rate =
      static_cast<double>(lib.n_actives_total) / static_cast<double>(lib.n_total_library);
  return hit_rate / base_rate;
}

namespace {

struct RieBounds {
  double rie_min;
  double rie_max;
  double random_denominator;
};

RieBounds rie_bounds(std::size_t n_total, std::size_t n_actives, double alpha) {
  const double N = static_cast<double>(n_total);
  const double ra = static_cast<double>(n_actives) / N;
  RieBounds b{};
  b.rie_min = (1.0 - std::exp(alpha * ra)) / (ra * (1.0 - std::exp(alpha)));
  b.rie_max = (1.0 - std::exp(-alpha * ra)) / (ra * (1.0 - std::exp(-alpha)));
  b.random_denominator = ra * (1.0 - std::exp(-alpha)) / std::expm1(alpha / N);
  return b;
}

void check_bedroc_domain(std::size_t n_total, std::size_t n_actives, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ArgumentError("BEDROC alpha must be positive");
  }
  if (n_actives == 0) throw MetricError("BEDROC undefined: library has no actives");
  if (n_actives >= n_total) throw MetricError("BEDROC undefined: library has no inactives");
}

}  // namespace

BedrocTerms bedroc_terms(const RankedLibrary& lib, double alpha) {
  check_bedroc_domain(lib.n_total_library, lib.n_actives_total, alpha);
  if (!lib.complete()) {
    throw UnsupportedInputError("BEDROC needs a complete (unfiltered) ranking");
  }
  const double N = static_cast<double>(lib.n_total_library);
  double sum = 0.0;
  for (std::size_t i = 0; i < lib.labels.size(); ++i) {
    if (lib.labels[i] == 1) sum += std::exp(-alpha * static_cast<double>(i + 1) / N);
  }
  const auto b = rie_bounds(lib.n_total_library, lib.n_actives_total, alpha);
  BedrocTerms t;
  t.rie = sum / b.random_denominator;
  t.rie_min = b.rie_min;
  t.rie_max = b.rie_max;
  t.bedroc = std::clamp((t.rie - t.rie_min) / (t.rie_max - t.rie_min), 0.0, 1.0);
  return t;
}

double bedroc(const RankedLibrary& lib, double alpha) { return bedroc_terms(lib, alpha).bedroc; }

double random_bedroc(std::size_t n_total, std::size_t n_actives, double alpha) {
  check_bedroc_domain(n_total, n_actives, alpha);
  const auto b = rie_bounds(n_total, n_actives, alpha);
  return (1.0 - b.rie_min) / (b.rie_max - b.rie_min);
}

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw ArgumentError("scores and labels differ in length");
  std::size_t n_pos = 0;
  for (int l : labels) n_pos += l == 1 ? 1 : 0;
  const std::size_t n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw MetricError("ROC-AUC undefined: need at least one active and one inactive");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // ascending ranks, each tie group sharing the mean of its positions
  double active_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    std::size_t actives_in_group = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      actives_in_group += labels[order[j]] == 1 ? 1 : 0;
      ++j;
    }
    const double mean_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    active_rank_sum += mean_rank * static_cast<double>(actives_in_group);
    i = j;
  }
  const double n = static_cast<double>(n_pos);
  const double m = static_cast<double>(n_neg);
  return (active_rank_sum - n * (n + 1.0) / 2.0) / (n * m);
}

double roc_auc(const RankedLibrary& lib) {
  if (!lib.complete()) {
    throw UnsupportedInputError("ROC-AUC needs a complete (unfiltered) ranking");
  }
  if (!lib.scores.empty()) return roc_auc(lib.scores, lib.labels);
  std::vector<double> by_position(lib.labels.size());
  for (std::size_t i = 0; i < by_position.size(); ++i) {
    by_position[i] = -static_cast<double>(i);
  }
  return roc_auc(by_position, lib.labels);
}

}  // namespace vscreen
