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
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "vscreen/rank_engine.hpp"
#include "vscreen/screen_data.hpp"

namespace vscreen::ml {

enum class FeatureKind {
  Score,                ///< oriented raw score (missing -> target's worst)
  Percentile,           ///< (rank - 1) / (N - 1), 0 = best (missing -> 1)
  ConsensusPercentile,  ///< position in a consensus ordering, same scale
  PercentileMean,
  PercentileStd,  ///< population standard deviation
  SignedLog,      ///< sign(s) * ln(1 + |s|)
  Square,
  Product,
  PercentileDiff,
  PercentileMin,
  PercentileMax,
  PercentileMedian,
  PercentileRange,
};

std::string_view to_string(FeatureKind k);
FeatureKind parse_feature_kind(std::string_view text);

/// Operands name scorers, except for ConsensusPercentile whose single
/// operand names a consensus ranking.
struct FeatureDef {
  std::string name;
  FeatureKind kind = FeatureKind::Score;
  std::vector<std::string> operands;

  bool operator==(const FeatureDef&) const = default;
};

struct FeatureRecipe {
  int version = 1;
  std::size_t n_primary = 0;
  std::vector<FeatureDef> features;

  std::size_t width() const { return features.size(); }
  /// Unique names, operand counts matching each kind.
  void validate() const;
  bool operator==(const FeatureRecipe&) const = default;
};

/// Consensus keys used by the default recipe.
inline constexpr std::string_view kConsensusAutoDock = "cc_medium_autodock";
inline constexpr std::string_view kConsensusDiffDock = "cc_medium_diffdock";
inline constexpr std::string_view kConsensusGlobal = "cc_medium_global";

/// 17 primary columns (6 scores, 6 percentiles, 3 CC-Medium consensus
/// percentiles, mean and std of the score percentiles) followed by 25
/// derived ones (6 signed logs, 6 squares, 6 rescorer products, 3
/// cross-pathway percentile differences, min/max/median/range of the score
/// percentiles): 42 in total.
FeatureRecipe default_recipe();

std::string recipe_to_json(const FeatureRecipe& recipe);
FeatureRecipe parse_recipe(std::string_view json_text);
FeatureRecipe load_recipe(const std::filesystem::path& path);

/// Rows are ligands. `missing_counts` holds per-ligand missing-score counts
/// for reporting; it is not part of the matrix.
struct FeatureMatrix {
  std::vector<std::string> names;
  Eigen::MatrixXd values;
  std::vector<std::string> target_ids;
  std::vector<std::string> ligand_ids;
  std::vector<int> labels;
  std::vector<std::size_t> missing_counts;

  std::size_t rows() const { return static_cast<std::size_t>(values.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(values.cols()); }

  FeatureMatrix select_rows(std::span<const std::size_t> rows) const;
  /// Row-wise concatenation; column names must agree.
  static FeatureMatrix concat(std::span<const FeatureMatrix> parts);
};

/// Evaluates `recipe` on a target. `tables` must hold a rank table for every
/// scorer the recipe names; `consensus` every consensus key it names.
FeatureMatrix build_features(const ScreenDataset& ds, std::span<const RankTable> tables,
                             const std::map<std::string, ConsensusRanking>& consensus,
                             const FeatureRecipe& recipe);

/// Rank tables for every dataset scorer plus the three CC-Medium rankings,
/// then build_features.
FeatureMatrix build_features(const ScreenDataset& ds, const FeatureRecipe& recipe);

/// Comma-separated dump: target_id, ligand_id, label, then one column per
/// feature.
std::string format_feature_matrix(const FeatureMatrix& m);

}  // namespace vscreen::ml
