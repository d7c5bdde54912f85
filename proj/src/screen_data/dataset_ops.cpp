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
#include <numeric>

#include "vscreen/error.hpp"
#include "vscreen/rng.hpp"
#include "vscreen/screen_data.hpp"

namespace vscreen {

ScreenDataset orient_scores(const ScreenDataset& ds) {
  std::vector<ScorerSpec> specs(ds.scorers().begin(), ds.scorers().end());
  std::vector<ScoreRecord> records(ds.records().begin(), ds.records().end());
  for (std::size_t r = 0; r < records.size(); ++r) {
    for (std::size_t s = 0; s < specs.size(); ++s) {
      records[r].scores[s] = ds.oriented_score(r, s);
    }
  }
  for (auto& s : specs) s.direction = Direction::HigherBetter;
  return ScreenDataset(ds.target_id(), std::move(specs), std::move(records));
}

ScreenDataset subsample_inactives(const ScreenDataset& ds, double fraction,
                                  std::uint64_t seed) {
  if (!(fraction > 0.0) || fraction > 1.0) {
    throw ArgumentError("subsample fraction must lie in (0, 1]");
  }
  std::vector<std::size_t> inactives;
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < ds.n_total(); ++i) {
    (ds.record(i).label == 1 ? keep : inactives).push_back(i);
  }
  const auto n_keep = static_cast<std::size_t>(
      std::floor(fraction * static_cast<double>(inactives.size()) + 0.5));

  // partial Fisher-Yates: the first n_keep slots end up a uniform sample
  Rng rng(seed);
  for (std::size_t i = 0; i < n_keep && i < inactives.size(); ++i) {
    const std::size_t j = i + rng.below(inactives.size() - i);
    std::swap(inactives[i], inactives[j]);
  }
  keep.insert(keep.end(), inactives.begin(),
              inactives.begin() + static_cast<std::ptrdiff_t>(std::min(n_keep, inactives.size())));
  std::sort(keep.begin(), keep.end());
  return ds.subset(keep);
}

ValidationReport validate_dataset(const ScreenDataset& ds) {
  ValidationReport report;
  report.target_id = ds.target_id();
  report.n_total = ds.n_total();
  report.n_actives = ds.n_actives();
  report.n_inactives = ds.n_inactives();

  for (std::size_t s = 0; s < ds.scorers().size(); ++s) {
    std::size_t missing = 0;
    for (const auto& r : ds.records()) missing += r.scores[s].has_value() ? 0 : 1;
    report.missing.push_back({ds.scorers()[s].id, missing});
    if (ds.n_total() > 0 && missing == ds.n_total()) {
      report.violations.push_back("scorer " + ds.scorers()[s].id + " has no scores");
    }
  }
  for (const auto& r : ds.records()) {
    const bool any = std::any_of(r.scores.begin(), r.scores.end(),
                                 [](const auto& v) { return v.has_value(); });
    if (!any) report.violations.push_back("ligand " + r.ligand_id + " has no scores");
  }
  if (ds.n_total() == 0) report.violations.push_back("empty library");
  if (ds.n_actives() == 0) {
    report.violations.push_back("no actives: enrichment undefined");
  }
  if (ds.n_total() > 0 && ds.n_inactives() == 0) {
    report.violations.push_back("no inactives: classification metrics undefined");
  }
  return report;
}

}  // namespace vscreen
