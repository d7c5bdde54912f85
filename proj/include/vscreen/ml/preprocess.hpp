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
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "vscreen/screen_data.hpp"

namespace vscreen::ml {

/// Quantile of sorted data by linear interpolation between order
/// statistics: position q * (n - 1).
double interpolated_quantile(std::span<const double> sorted, double q);

struct ScalerParams {
  std::vector<double> median;
  std::vector<double> iqr;

  std::size_t width() const { return median.size(); }
  bool operator==(const ScalerParams&) const = default;
};

/// Per-column median and Q3 - Q1. Rows are samples.
ScalerParams fit_scaler(const Eigen::MatrixXd& train);

/// (x - median) / IQR; a column with IQR 0 maps to 0. Throws ShapeError on a
/// width mismatch.
Eigen::MatrixXd apply_scaler(const Eigen::MatrixXd& x, const ScalerParams& params);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

/// Label-stratified split: round-half-up(train_fraction * count) of the
/// actives and of the inactives go to train, drawn by a seeded shuffle. Both
/// sides keep at least one active (and one inactive when there are two or
/// more). Indices come back sorted. Throws DataError with fewer than two
/// actives or four ligands.
SplitIndices split_labels(std::span<const int> labels, double train_fraction,
                          std::uint64_t seed);

SplitIndices split_dataset(const ScreenDataset& ds, double train_fraction, std::uint64_t seed);

}  // namespace vscreen::ml
