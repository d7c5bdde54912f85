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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vscreen/metrics.hpp"
#include "vscreen/ml/features.hpp"
#include "vscreen/ml/mlp.hpp"
#include "vscreen/ml/preprocess.hpp"

namespace vscreen::ml {

struct TrainedModel {
  NetConfig config;
  FeatureRecipe recipe;
  ScalerParams scaler;
  Mlp network;
  std::vector<EpochLog> log;
  std::size_t best_epoch = 0;
  double pos_weight = 1.0;
};

inline constexpr std::string_view kModelFormat = "vscreen-mlp";
inline constexpr int kModelFormatVersion = 1;

/// Fits the scaler on `train` only, scales both matrices, trains.
TrainedModel fit_model(const FeatureMatrix& train, const FeatureMatrix& validation,
                       const FeatureRecipe& recipe, const NetConfig& config);

/// Logits for unscaled feature rows; higher means more likely active.
std::vector<double> predict_logits(const TrainedModel& model, const FeatureMatrix& raw);
/// Sigmoid of predict_logits.
std::vector<double> predict(const TrainedModel& model, const FeatureMatrix& raw);

/// Structured text with every double in shortest round-trip form, so a
/// reloaded model predicts bit-identically.
std::string model_to_json(const TrainedModel& model);
/// Throws ConfigError on a different format or version.
TrainedModel parse_model(std::string_view json_text);
void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

std::string net_config_to_json(const NetConfig& config);
NetConfig parse_net_config(std::string_view json_text);

/// epoch,train_loss,validation_ef1,best
std::string format_training_log(std::span<const EpochLog> log);

/// (model - baseline) / baseline * 100. Throws ArgumentError for a zero
/// baseline.
double delta_pct(double model_ef1, double baseline_ef1);

/// "+109.8%" style, one decimal.
std::string format_delta(double pct);

struct ModelEvaluation {
  MetricsReport report;  ///< ranking metrics; classical part at Top1Percent
  double threshold = 0.5;
  ClassicalMetrics at_threshold;  ///< predicted positive when probability >= threshold
  double f1_threshold = 0.0;      ///< probability cut maximising F1
  ClassicalMetrics at_f1_threshold;
  std::optional<double> delta_pct;
};

struct EvaluationOptions {
  double threshold = 0.5;
  double alpha = 20.0;
  std::optional<double> baseline_ef1;
};

/// Ranks one target's ligands by logit (ties by ligand id) and runs the
/// shared metrics on it.
ModelEvaluation evaluate_logits(std::span<const double> logits, std::span<const int> labels,
                                std::span<const std::string> ligand_ids,
                                const EvaluationOptions& options);

/// predict_logits then evaluate_logits. `validation` must hold one target.
ModelEvaluation evaluate_model(const TrainedModel& model, const FeatureMatrix& validation,
                               const EvaluationOptions& options);

struct ComparisonRow {
  std::string method;
  double ef1 = 0.0;
  bool baseline = false;
};

/// rank,method,ef1,delta_vs_baseline. Non-baseline rows by descending EF1%
/// (ties by name), the baseline last with "Ref.". Exactly one row must be
/// the baseline.
std::string format_comparison_csv(std::span<const ComparisonRow> rows);
std::string format_comparison_table(std::span<const ComparisonRow> rows);

}  // namespace vscreen::ml
