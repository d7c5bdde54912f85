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

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracle.hpp"
#include "vscreen/error.hpp"
#include "vscreen/metrics.hpp"
#include "vscreen/rng.hpp"

namespace vscreen {
namespace {

RankedLibrary from_labels(std::vector<int> labels) {
  RankedLibrary lib;
  lib.n_total_library = labels.size();
  lib.n_actives_total = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  lib.labels = std::move(labels);
  return lib;
}

std::vector<int> random_labels(Rng& rng, std::size_t n, std::size_t actives) {
  std::vector<int> labels(n, 0);
  std::fill(labels.begin(), labels.begin() + static_cast<long>(actives), 1);
  rng.shuffle(std::span<int>(labels));
  return labels;
}

TEST(Enrichment, WindowExample) {
  // 10,000 ligands, 500 actives, 10 of them in the top 100
  std::vector<int> labels(10000, 0);
  for (int i = 0; i < 10; ++i) labels[static_cast<std::size_t>(i * 7)] = 1;
  for (std::size_t i = 100; i < 590; ++i) labels[i] = 1;
  const auto lib = from_labels(labels);
  ASSERT_EQ(lib.n_actives_total, 500u);
  EXPECT_NEAR(enrichment_factor(lib, 1.0), 2.0, 1e-12);
}

TEST(Enrichment, WindowFloorAndMinimum) {
  EXPECT_EQ(ef_window(10000, 1.0), 100u);
  EXPECT_EQ(ef_window(150, 1.0), 1u);
  EXPECT_EQ(ef_window(99, 1.0), 1u);
  EXPECT_EQ(ef_window(1999, 1.0), 19u);
  EXPECT_EQ(ef_window(1000, 10.0), 100u);
}

TEST(Enrichment, BoundsAndFilteredList) {
  auto lib = from_labels({1, 1, 0, 0, 0, 0, 0, 0, 0, 0});
  EXPECT_DOUBLE_EQ(enrichment_factor(lib, 10.0), 5.0);  // = N / n
  // filtered down to nothing: EF 0, not undefined
  RankedLibrary empty;
  empty.n_total_library = 1000;
  empty.n_actives_total = 10;
  EXPECT_EQ(enrichment_factor(empty, 1.0), 0.0);
  EXPECT_THROW(enrichment_factor(from_labels({0, 0, 0}), 1.0), MetricError);
}

TEST(Enrichment, MatchesOracle) {
  Rng rng(101);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 2 + rng.below(1999);
    const std::size_t a = 1 + rng.below(n - 1);
    const auto labels = random_labels(rng, n, a);
    const auto lib = from_labels(labels);
    for (double x : {0.5, 1.0, 2.0, 5.0, 10.0, 37.5}) {
      ASSERT_NEAR(enrichment_factor(lib, x), testing::oracle_ef(labels, x), 1e-10);
    }
  }
}

TEST(RocAuc, TiesCountHalf) {
  EXPECT_DOUBLE_EQ(roc_auc(std::vector<double>{1, 1, 1, 1}, std::vector<int>{1, 0, 1, 0}), 0.5);
  EXPECT_DOUBLE_EQ(roc_auc(std::vector<double>{3, 2, 1}, std::vector<int>{1, 0, 0}), 1.0);
  EXPECT_DOUBLE_EQ(roc_auc(std::vector<double>{1, 2, 3}, std::vector<int>{1, 0, 0}), 0.0);
  EXPECT_DOUBLE_EQ(roc_auc(std::vector<double>{2, 2, 1}, std::vector<int>{1, 0, 0}), 0.75);
  EXPECT_THROW(roc_auc(std::vector<double>{1, 2}, std::vector<int>{1, 1}), MetricError);
}

TEST(RocAuc, MatchesPairCountingWithHeavyTies) {
  Rng rng(202);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 2 + rng.below(500);
    const std::size_t a = 1 + rng.below(n - 1);
    const auto labels = random_labels(rng, n, a);
    std::vector<double> scores(n);
    const std::size_t levels = 1 + rng.below(12);
    for (auto& s : scores) s = static_cast<double>(rng.below(levels));
    ASSERT_NEAR(roc_auc(scores, labels), testing::oracle_auc(scores, labels), 1e-10);
  }
}

TEST(RocAuc, ComplementUnderNegation) {
  Rng rng(5);
  const auto labels = random_labels(rng, 300, 30);
  std::vector<double> s(300), neg(300);
  for (std::size_t i = 0; i < 300; ++i) {
    s[i] = static_cast<double>(rng.below(40));
    neg[i] = -s[i];
  }
  EXPECT_NEAR(roc_auc(s, labels) + roc_auc(neg, labels), 1.0, 1e-12);
}

TEST(Bedroc, MatchesDirectSum) {
  Rng rng(303);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 2 + rng.below(1999);
    const std::size_t a = 1 + rng.below(n - 1);
    const auto labels = random_labels(rng, n, a);
    for (double alpha : {1.0, 20.0, 80.5}) {
      ASSERT_NEAR(bedroc(from_labels(labels), alpha), testing::oracle_bedroc(labels, alpha), 1e-10);
    }
  }
}

TEST(Bedroc, LimitsAndRandomValue) {
  std::vector<int> perfect(1000, 0);
  std::fill(perfect.begin(), perfect.begin() + 10, 1);
  std::vector<int> inverted(perfect.rbegin(), perfect.rend());
  EXPECT_GE(bedroc(from_labels(perfect), 20.0), 0.99);
  EXPECT_LE(bedroc(from_labels(inverted), 20.0), 0.01);
  const double r = random_bedroc(1000, 10, 20.0);
  EXPECT_GT(r, 0.0);
  EXPECT_LT(r, 0.2);
  EXPECT_THROW(bedroc(from_labels(perfect), 0.0), ArgumentError);
  auto partial = from_labels(perfect);
  partial.labels.resize(500);
  EXPECT_THROW(bedroc(partial, 20.0), UnsupportedInputError);
}

TEST(Classical, NearRandomRegime) {
  const auto m = classical_from_confusion({2, 98, 98, 9802}, ThresholdPolicy::top1_percent());
  EXPECT_NEAR(m.accuracy, 0.9804, 1e-12);
  EXPECT_NEAR(m.precision, 0.02, 1e-12);
  EXPECT_NEAR(m.recall, 0.02, 1e-12);
  EXPECT_NEAR(m.specificity, 9802.0 / 9900.0, 1e-12);
  EXPECT_NEAR(m.balanced_accuracy, 0.50505050505, 1e-10);
  EXPECT_NEAR(m.f1, 0.02, 1e-12);
}

TEST(Classical, DegenerateMarginals) {
  const auto m = classical_from_confusion({0, 0, 5, 95}, ThresholdPolicy::top1_percent());
  EXPECT_EQ(m.precision, 0.0);
  EXPECT_EQ(m.f1, 0.0);
  EXPECT_EQ(m.mcc, 0.0);
  const auto perfect = classical_from_confusion({5, 0, 0, 95}, ThresholdPolicy::top1_percent());
  EXPECT_DOUBLE_EQ(perfect.mcc, 1.0);
}

TEST(Classical, Top1PercentOnRanking) {
  // 10,000 ligands, 100 actives; 2 of them in the top 100
  std::vector<int> labels(10000, 0);
  labels[0] = labels[50] = 1;
  for (std::size_t i = 200; i < 298; ++i) labels[i] = 1;
  const auto m = classical_metrics(from_labels(labels), ThresholdPolicy::top1_percent());
  EXPECT_EQ(m.confusion.tp, 2u);
  EXPECT_EQ(m.confusion.fp, 98u);
  EXPECT_EQ(m.confusion.fn, 98u);
  EXPECT_EQ(m.confusion.tn, 9802u);
}

TEST(Classical, ScoreThresholdAndF1Optimum) {
  RankedLibrary lib = from_labels({1, 0, 1, 0, 0});
  lib.scores = {0.9, 0.8, 0.7, 0.2, 0.1};
  const auto m = classical_metrics(lib, ThresholdPolicy::score_at_least(0.75));
  EXPECT_EQ(m.confusion.tp, 1u);
  EXPECT_EQ(m.confusion.fp, 1u);
  const auto best = f1_optimal_threshold(lib);
  EXPECT_DOUBLE_EQ(best.threshold, 0.7);
  EXPECT_NEAR(best.metrics.f1, 0.8, 1e-12);
}

TEST(Evaluate, FilteredRankingSkipsBedrocAndAuc) {
  RankedLibrary lib = from_labels({1, 0, 0, 1});
  lib.n_total_library = 400;
  lib.n_actives_total = 4;
  const auto r = evaluate_ranking(lib, MetricSettings{}, 50.0);
  EXPECT_FALSE(r.bedroc.has_value());
  EXPECT_FALSE(r.roc_auc.has_value());
  EXPECT_DOUBLE_EQ(r.ef1, 50.0);  // 2 actives in a 4-wide window, base rate 1%
  EXPECT_EQ(r.actives_remaining_pct, 50.0);
}

TEST(Evaluate, ScorerRankingFromDataset) {
  const auto ds = testing::oracle_dataset();
  const auto lib = ranked_library(ds, assign_ranks(ds, "gnina_dd"));
  // L1 and L2 tie at 0.7; L1 wins on id
  EXPECT_EQ(lib.labels, (std::vector<int>{1, 0, 0}));
  EXPECT_TRUE(lib.complete());
  const auto dd = ranked_library(ds, assign_ranks(ds, "diffdock"));
  EXPECT_TRUE(std::isinf(dd.scores.back()));
}

TEST(Aggregate, MedianMeanAndSuccess) {
  EXPECT_DOUBLE_EQ(median({3, 1, 2}), 2.0);
  EXPECT_DOUBLE_EQ(median({4, 1, 2, 3}), 2.5);
  EXPECT_THROW(median({}), Error);
  std::vector<TargetReport> reports;
  for (double ef : {0.0, 2.0, 5.0, 1.0}) {
    MetricsReport m;
    m.ef1 = ef;
    m.ef10 = 1.0;
    reports.push_back({"T" + std::to_string(reports.size()), "autodock", "gnina_ad", m});
  }
  const auto rows = summarize(reports);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].n_targets, 4u);
  EXPECT_EQ(rows[0].success_times, 2u);  // strictly above 1
  EXPECT_DOUBLE_EQ(*rows[0].ef1.median, 1.5);
  EXPECT_DOUBLE_EQ(*rows[0].ef1.mean, 2.0);
  EXPECT_FALSE(rows[0].bedroc.median.has_value());
  const auto csv = format_summary_csv(rows, SummaryStatistic::Median);
  EXPECT_NE(csv.find("success_times"), std::string::npos);
}

TEST(Aggregate, RowsKeepFirstAppearanceOrder) {
  std::vector<TargetReport> reports;
  for (const char* scheme : {"b", "a", "b", "c"}) {
    MetricsReport m;
    reports.push_back({"T", "p", scheme, m});
  }
  const auto rows = summarize(reports);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].scheme, "b");
  EXPECT_EQ(rows[1].scheme, "a");
  EXPECT_EQ(rows[2].scheme, "c");
}

}  // namespace
}  // namespace vscreen
