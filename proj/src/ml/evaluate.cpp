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

#include <fmt/format.h>

#include "vscreen/csv.hpp"
#include "vscreen/error.hpp"
#include "vscreen/ml/model.hpp"
#include "vscreen/numfmt.hpp"

namespace vscreen::ml {

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double logit(double p) {
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  return std::log(p / (1.0 - p));
}

}  // namespace

TrainedModel fit_model(const FeatureMatrix& train, const FeatureMatrix& validation,
                       const FeatureRecipe& recipe, const NetConfig& config) {
  if (train.cols() != recipe.width() || validation.cols() != recipe.width()) {
    throw ShapeError(fmt::format("recipe has {} features, matrices have {} and {}",
                                 recipe.width(), train.cols(), validation.cols()));
  }
  TrainedModel model;
  model.config = config;
  model.recipe = recipe;
  model.scaler = fit_scaler(train.values);
  const Eigen::MatrixXd xt = apply_scaler(train.values, model.scaler);
  const Eigen::MatrixXd xv = apply_scaler(validation.values, model.scaler);

  TrainingSet tr{&xt, train.labels, train.target_ids, train.ligand_ids};
  TrainingSet va{&xv, validation.labels, validation.target_ids, validation.ligand_ids};
  auto result = train_mlp(tr, va, config);
  model.network = std::move(result.network);
  model.log = std::move(result.log);
  model.best_epoch = result.best_epoch;
  model.pos_weight = result.pos_weight;
  return model;
}

std::vector<double> predict_logits(const TrainedModel& model, const FeatureMatrix& raw) {
  if (raw.cols() != model.network.n_inputs()) {
    throw ShapeError(fmt::format("model expects {} features, matrix has {}",
                                 model.network.n_inputs(), raw.cols()));
  }
  const Eigen::VectorXd z = model.network.logits(apply_scaler(raw.values, model.scaler));
  return {z.data(), z.data() + z.size()};
}

std::vector<double> predict(const TrainedModel& model, const FeatureMatrix& raw) {
  auto out = predict_logits(model, raw);
  for (double& v : out) v = sigmoid(v);
  return out;
}

double delta_pct(double model_ef1, double baseline_ef1) {
  if (baseline_ef1 == 0.0 || !std::isfinite(baseline_ef1)) {
    throw ArgumentError("relative change against a zero baseline is undefined");
  }
  return (model_ef1 - baseline_ef1) / baseline_ef1 * 100.0;
}

std::string format_delta(double pct) {
  const std::string body = fmt::format("{:.1f}%", std::abs(pct));
  if (body == "0.0%") return body;
  return (pct > 0.0 ? "+" : "-") + body;
}

ModelEvaluation evaluate_logits(std::span<const double> logits, std::span<const int> labels,
                                std::span<const std::string> ligand_ids,
                                const EvaluationOptions& options) {
  if (!(options.threshold > 0.0 && options.threshold < 1.0)) {
    throw ArgumentError("decision threshold must lie strictly between 0 and 1");
  }
  const RankedLibrary lib = ranked_library_from_scores(logits, labels, ligand_ids);
  MetricSettings settings;
  settings.alpha = options.alpha;
  ModelEvaluation ev;
  ev.report = evaluate_ranking(lib, settings);
  ev.threshold = options.threshold;
  ev.at_threshold =
      classical_metrics(lib, ThresholdPolicy::score_at_least(logit(options.threshold)));
  ev.at_threshold.policy = ThresholdPolicy::score_at_least(options.threshold);
  const auto best = f1_optimal_threshold(lib);
  ev.f1_threshold = sigmoid(best.threshold);
  ev.at_f1_threshold = best.metrics;
  ev.at_f1_threshold.policy = ThresholdPolicy::score_at_least(ev.f1_threshold);
  if (options.baseline_ef1) ev.delta_pct = delta_pct(ev.report.ef1, *options.baseline_ef1);
  return ev;
}

ModelEvaluation evaluate_model(const TrainedModel& model, const FeatureMatrix& validation,
                               const EvaluationOptions& options) {
  for (const auto& t : validation.target_ids) {
    if (t != validation.target_ids.front()) {
      throw ArgumentError("evaluate_model expects a single target");
    }
  }
  const auto z = predict_logits(model, validation);
  return evaluate_logits(z, validation.labels, validation.ligand_ids, options);
}

namespace {

std::vector<ComparisonRow> ordered(std::span<const ComparisonRow> rows, double& base) {
  const auto n_base = std::count_if(rows.begin(), rows.end(),
                                    [](const ComparisonRow& r) { return r.baseline; });
  if (n_base != 1) throw ArgumentError("comparison needs exactly one baseline row");
  std::vector<ComparisonRow> out;
  for (const auto& r : rows) {
    if (r.baseline) {
      base = r.ef1;
    } else {
      out.push_back(r);
    }
  }
  std::sort(out.begin(), out.end(), [](const ComparisonRow& a, const ComparisonRow& b) {
    if (a.ef1 != b.ef1) return a.ef1 > b.ef1;
    return a.method < b.method;
  });
  for (const auto& r : rows) {
    if (r.baseline) out.push_back(r);
  }
  return out;
}

}  // namespace

std::string format_comparison_csv(std::span<const ComparisonRow> rows) {
  double base = 0.0;
  const auto sorted = ordered(rows, base);
  std::string out = "rank,method,ef1,delta_vs_baseline\n";
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto& r = sorted[i];
    out += join_csv({std::to_string(i + 1), r.method, format_real(r.ef1),
                     r.baseline ? "Ref." : format_delta(delta_pct(r.ef1, base))});
    out += "\n";
  }
  return out;
}

std::string format_comparison_table(std::span<const ComparisonRow> rows) {
  double base = 0.0;
  const auto sorted = ordered(rows, base);
  std::size_t width = 5;
  for (const auto& r : sorted) width = std::max(width, r.method.size());
  std::string out = fmt::format("{:<4} {:<{}} {:>8} {:>14}\n", "Rank", "Model", width, "EF@1%",
                                "Delta vs base");
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto& r = sorted[i];
    out += fmt::format("{:<4} {:<{}} {:>8.3f} {:>14}\n", i + 1, r.method, width, r.ef1,
                       r.baseline ? "Ref." : format_delta(delta_pct(r.ef1, base)));
  }
  return out;
}

}  // namespace vscreen::ml
