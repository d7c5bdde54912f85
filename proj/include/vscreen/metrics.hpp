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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vscreen/rank_engine.hpp"
#include "vscreen/screen_data.hpp"

namespace vscreen {

/// A ranking as seen by the metrics: the retained ligands best first, plus
/// the size N and active count n of the library the ranking came from
/// (filtered-out ligands still count towards N and n).
struct RankedLibrary {
  std::vector<int> labels;
  /// Optional per-entry scores (higher = better, parallel to `labels`).
  /// Used for tie-aware ROC-AUC and score-threshold classification.
  std::vector<double> scores;
  std::size_t n_total_library = 0;
  std::size_t n_actives_total = 0;

  std::size_t retained_count() const { return labels.size(); }
  bool complete() const { return labels.size() == n_total_library; }
};

/// Full-library ranking of one scorer; scores are oriented, missing ones
/// become -inf (tied with each other, below every scored ligand).
RankedLibrary ranked_library(const ScreenDataset& ds, const RankTable& table);

/// Retained part of a consensus ranking; scores are -average_rank.
RankedLibrary ranked_library(const ConsensusRanking& ranking);

/// Orders by descending score, ties by ascending id.
RankedLibrary ranked_library_from_scores(std::span<const double> scores,
                                         std::span<const int> labels,
                                         std::span<const std::string> ids);

/// max(1, floor(N * x / 100)).
std::size_t ef_window(std::size_t n_total, double x_pct);

/// (actives in the first min(w, retained) entries / w) / (n / N) with w the
/// full window size, so a list emptied by filtering scores 0.
double enrichment_factor(const RankedLibrary& lib, double x_pct);

struct BedrocTerms {
  double rie = 0.0;
  double rie_min = 0.0;
  double rie_max = 0.0;
  double bedroc = 0.0;
};

/// RIE with the random-expectation denominator (so a random ranking has
/// E[RIE] = 1), normalised between the worst and perfect RIE and clamped to
/// [0, 1]. Needs a complete ranking.
BedrocTerms bedroc_terms(const RankedLibrary& lib, double alpha);
double bedroc(const RankedLibrary& lib, double alpha);

/// BEDROC of the expected random ranking (RIE = 1 pushed through the same
/// min-max normalisation).
double random_bedroc(std::size_t n_total, std::size_t n_actives, double alpha);

/// Mann-Whitney estimate with tie-averaged ranks: probability that a random
/// active outscores a random inactive, ties counting one half.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

/// Uses `lib.scores` when present, otherwise list position. Needs a complete
/// ranking.
double roc_auc(const RankedLibrary& lib);

struct ThresholdPolicy {
  enum class Kind { Top1Percent, ScoreThreshold };
  Kind kind = Kind::Top1Percent;
  double value = 0.0;

  static ThresholdPolicy top1_percent() { return {}; }
  static ThresholdPolicy score_at_least(double v) { return {Kind::ScoreThreshold, v}; }
  std::string label() const;
};

struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;
};

struct ClassicalMetrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;  ///< sensitivity
  double specificity = 0.0;
  double f1 = 0.0;
  double balanced_accuracy = 0.0;
  double mcc = 0.0;
  ThresholdPolicy policy;
  ConfusionMatrix confusion;
};

/// Precision 0 with no predicted positives; F1 0 when precision + recall is
/// 0; MCC 0 when any marginal is 0.
ClassicalMetrics classical_from_confusion(const ConfusionMatrix& cm, ThresholdPolicy policy);

/// Predicted positives are the first max(1, floor(N/100)) entries under
/// Top1Percent, or every retained entry scoring >= value. Filtered-out
/// ligands are predicted negative.
ClassicalMetrics classical_metrics(const RankedLibrary& lib, ThresholdPolicy policy);

struct ThresholdChoice {
  double threshold = 0.0;
  ClassicalMetrics metrics;
};

/// Score cut maximising F1 (ties go to the higher cut). Needs scores.
ThresholdChoice f1_optimal_threshold(const RankedLibrary& lib);

struct MetricSettings {
  double alpha = 20.0;
  std::vector<double> extra_ef_percents;  ///< reported besides EF1% and EF10%
  ThresholdPolicy policy;
};

struct MetricsReport {
  double ef1 = 0.0;
  double ef10 = 0.0;
  std::vector<std::pair<double, double>> extra_ef;  ///< (x%, EF)
  double alpha = 20.0;
  std::optional<double> bedroc;   ///< complete rankings only
  std::optional<double> roc_auc;  ///< complete rankings only
  std::optional<double> actives_remaining_pct;
  ClassicalMetrics classical;
};

/// Every metric for one ranking. BEDROC and ROC-AUC are left empty for
/// rankings that lost ligands to a filter.
MetricsReport evaluate_ranking(const RankedLibrary& lib, const MetricSettings& settings,
                               std::optional<double> actives_remaining_pct = std::nullopt);

/// Median with the midpoint convention for even counts. Empty input throws.
double median(std::vector<double> values);

struct SummaryStat {
  std::optional<double> median;
  std::optional<double> mean;
};

struct SummaryRow {
  std::string pathway;
  std::string scheme;
  std::size_t n_targets = 0;
  SummaryStat ef1;
  SummaryStat ef10;
  SummaryStat roc_auc;
  SummaryStat bedroc;
  SummaryStat actives_remaining;
  std::size_t success_times = 0;  ///< targets with EF1% > 1
};

SummaryRow aggregate(const std::map<std::string, MetricsReport>& reports,
                     const std::string& pathway, const std::string& scheme);

/// One evaluated (target, pathway, scheme) cell of the results grid.
struct TargetReport {
  std::string target_id;
  std::string pathway;
  std::string scheme;
  MetricsReport report;
};

/// Groups by (pathway, scheme) in order of first appearance.
std::vector<SummaryRow> summarize(std::span<const TargetReport> reports);

std::string format_per_target_csv(std::span<const TargetReport> reports);

enum class SummaryStatistic { Median, Mean };

/// pathway,scheme,ef1,ef10,roc_auc,bedroc,actives_remaining,success_times
/// with the chosen statistic; blank cells where a metric does not apply.
std::string format_summary_csv(std::span<const SummaryRow> rows, SummaryStatistic stat);

/// Aligned human-readable version of format_summary_csv.
std::string format_summary_table(std::span<const SummaryRow> rows, SummaryStatistic stat);

}  // namespace vscreen
