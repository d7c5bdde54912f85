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

#include <gtest/gtest.h>

#include "vscreen/error.hpp"
#include "vscreen/ml/preprocess.hpp"
#include "vscreen/rng.hpp"

namespace vscreen::ml {
namespace {

TEST(Scaler, OutlierColumnExample) {
  Eigen::MatrixXd x(5, 1);
  x << 1, 2, 3, 4, 100;
  const auto p = fit_scaler(x);
  EXPECT_DOUBLE_EQ(p.median[0], 3.0);
  EXPECT_DOUBLE_EQ(p.iqr[0], 2.0);
  EXPECT_DOUBLE_EQ(apply_scaler(x, p)(4, 0), 48.5);
}

TEST(Scaler, MedianRowMapsToZeroAndConstantColumn) {
  Eigen::MatrixXd x(4, 2);
  x << 1, 7, 2, 7, 3, 7, 10, 7;
  const auto p = fit_scaler(x);
  Eigen::MatrixXd med(1, 2);
  med << p.median[0], p.median[1];
  EXPECT_TRUE(apply_scaler(med, p).isZero(0.0));
  EXPECT_TRUE(apply_scaler(x, p).col(1).isZero(0.0));
  EXPECT_THROW(apply_scaler(Eigen::MatrixXd::Zero(2, 3), p), ShapeError);
}

TEST(Scaler, InterpolatedQuantile) {
  const std::vector<double> v{1, 2, 3, 4};
  EXPECT_DOUBLE_EQ(interpolated_quantile(v, 0.25), 1.75);
  EXPECT_DOUBLE_EQ(interpolated_quantile(v, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(interpolated_quantile(v, 1.0), 4.0);
}

TEST(Split, StratifiedCounts) {
  std::vector<int> labels(1040, 0);
  std::fill(labels.begin(), labels.begin() + 40, 1);
  const auto s = split_labels(labels, 0.75, 7);
  auto actives = [&](const std::vector<std::size_t>& idx) {
    return std::count_if(idx.begin(), idx.end(), [&](std::size_t i) { return labels[i] == 1; });
  };
  EXPECT_EQ(s.train.size(), 780u);
  EXPECT_EQ(actives(s.train), 30);
  EXPECT_EQ(s.validation.size(), 260u);
  EXPECT_EQ(actives(s.validation), 10);
}

TEST(Split, PartitionAndDeterminism) {
  Rng rng(1);
  std::vector<int> labels(333);
  for (auto& l : labels) l = rng.uniform() < 0.1 ? 1 : 0;
  const auto a = split_labels(labels, 0.75, 11);
  const auto b = split_labels(labels, 0.75, 11);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.validation, b.validation);
  std::vector<std::size_t> all = a.train;
  all.insert(all.end(), a.validation.begin(), a.validation.end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < all.size(); ++i) ASSERT_EQ(all[i], i);
  EXPECT_TRUE(std::is_sorted(a.train.begin(), a.train.end()));
  EXPECT_NE(split_labels(labels, 0.75, 12).train, a.train);
}

TEST(Split, TinyTargetsKeepBothSides) {
  const std::vector<int> labels{1, 1, 0, 0};
  const auto s = split_labels(labels, 0.75, 3);
  EXPECT_EQ(s.train.size(), 2u);
  EXPECT_EQ(s.validation.size(), 2u);
  EXPECT_THROW(split_labels(std::vector<int>{1, 0, 0, 0, 0}, 0.75, 1), DataError);
  EXPECT_THROW(split_labels(std::vector<int>{1, 1, 0}, 0.75, 1), DataError);
  EXPECT_THROW(split_labels(labels, 1.0, 1), ArgumentError);
}

}  // namespace
}  // namespace vscreen::ml
