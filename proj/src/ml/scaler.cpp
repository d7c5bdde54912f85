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

namespace vscreen::ml {

double interpolated_quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw ArgumentError("quantile of an empty column");
  if (!(q >= 0.0 && q <= 1.0)) throw ArgumentError("quantile level must lie in [0, 1]");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

ScalerParams fit_scaler(const Eigen::MatrixXd& train) {
  if (train.rows() == 0) throw ArgumentError("cannot fit a scaler on an empty matrix");
  ScalerParams p;
  std::vector<double> col(static_cast<std::size_t>(train.rows()));
  for (Eigen::Index j = 0; j < train.cols(); ++j) {
    for (Eigen::Index i = 0; i < train.rows(); ++i) col[static_cast<std::size_t>(i)] = train(i, j);
    std::sort(col.begin(), col.end());
    p.median.push_back(interpolated_quantile(col, 0.5));
    p.iqr.push_back(interpolated_quantile(col, 0.75) - interpolated_quantile(col, 0.25));
  }
  return p;
}

Eigen::MatrixXd apply_scaler(const Eigen::MatrixXd& x, const ScalerParams& params) {
  if (static_cast<std::size_t>(x.cols()) != params.width() ||
      params.iqr.size() != params.median.size()) {
    throw ShapeError("scaler fitted on " + std::to_string(params.width()) +
                     " features applied to a matrix with " + std::to_string(x.cols()));
  }
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double med = params.median[static_cast<std::size_t>(j)];
    const double iqr = params.iqr[static_cast<std::size_t>(j)];
    if (iqr > 0.0) {
      out.col(j) = (x.col(j).array() - med) / iqr;
    } else {
      out.col(j).setZero();
    }
  }
  return out;
}

}  // namespace vscreen::ml
