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
#include "vscreen/metrics.hpp"
#include "vscreen/numfmt.hpp"

namespace vscreen {

std::string ThresholdPolicy::label() const {
  if (kind == Kind::Top1Percent) return "top1percent";
  return "score>=" + format_real(value);
}

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

void check_two_classes(const RankedLibrary& lib) {
  if (lib.n_actives_total == 0 || lib.n_actives_total >= lib.n_total_library) {
    throw MetricError("classification metrics undefined: library holds a single class");
  }
}

ConfusionMatrix confusion_for(const RankedLibrary& lib, std::size_t tp, std::size_t predicted) {
  ConfusionMatrix cm;
  cm.tp = tp;
  cm.fp = predicted - tp;
  cm.fn = lib.n_actives_total - tp;
  cm.tn = (lib.n_total_library - lib.n_actives_total) - cm.fp;
  return cm;
}

}  // namespace

ClassicalMetrics classical_from_confusion(const ConfusionMatrix& cm, ThresholdPolicy policy) {
  ClassicalMetrics m;
  m.policy = policy;
  m.confusion = cm;
  const std::size_t total = cm.tp + cm.fp + cm.fn + cm.tn;
  m.accuracy = ratio(cm.tp + cm.tn, total);
  m.precision = ratio(cm.tp, cm.tp + cm.fp);
  m.recall = ratio(cm.tp, cm.tp + cm.fn);
  m.specificity = ratio(cm.tn, cm.tn + cm.fp);
  m.f1 = (m.precision + m.recall) > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  m.balanced_accuracy = (m.recall + m.specificity) / 2.0;

  const double tp = static_cast<double>(cm.tp);
  const double fp = static_cast<double>(cm.fp);
  const double fn = static_cast<double>(cm.fn);
  const double tn = static_cast<double>(cm.tn);
  const double marg = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  m.mcc = marg > 0.0 ? (tp * tn - fp * fn) / std::sqrt(marg) : 0.0;
  return m;
}

ClassicalMetrics classical_metrics(const RankedLibrary& lib, ThresholdPolicy policy) {
  check_two_classes(lib);
  std::size_t predicted = 0;
  std::size_t tp = 0;
  if (policy.kind == ThresholdPolicy::Kind::Top1Percent) {
    predicted = std::min(ef_window(lib.n_total_library, 1.0), lib.retained_count());
    for (std::size_t i = 0; i < predicted; ++i) tp += lib.labels[i] == 1 ? 1 : 0;
  } else {
    if (lib.scores.size() != lib.labels.size()) {
      throw ArgumentError("score-threshold policy needs per-ligand scores");
    }
    for (std::size_t i = 0; i < lib.labels.size(); ++i) {
      if (lib.scores[i] >= policy.value) {
        ++predicted;
        tp += lib.labels[i] == 1 ? 1 : 0;
      }
    }
  }
  return classical_from_confusion(confusion_for(lib, tp, predicted), policy);
}

ThresholdChoice f1_optimal_threshold(const RankedLibrary& lib) {
  check_two_classes(lib);
  if (lib.scores.size() != lib.labels.size() || lib.scores.empty()) {
    throw ArgumentError("F1-optimal threshold needs per-ligand scores");
  }
  std::vector<std::size_t> order(lib.scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return lib.scores[a] > lib.scores[b]; });

  ThresholdChoice best;
  best.threshold = lib.scores[order.front()];
  double best_f1 = -1.0;
  std::size_t tp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double cut = lib.scores[order[i]];
    while (i < order.size() && lib.scores[order[i]] == cut) {
      tp += lib.labels[order[i]] == 1 ? 1 : 0;
      ++i;
    }
    const auto cm = confusion_for(lib, tp, i);
    const auto m = classical_from_confusion(cm, ThresholdPolicy::score_at_least(cut));
    if (m.f1 > best_f1) {
      best_f1 = m.f1;
      best.threshold = cut;
      best.metrics = m;
    }
  }
  return best;
}

MetricsReport evaluate_ranking(const RankedLibrary& lib, const MetricSettings& settings,
                               std::optional<double> actives_remaining_pct) {
  MetricsReport r;
  r.alpha = settings.alpha;
  r.ef1 = enrichment_factor(lib, 1.0);
  r.ef10 = enrichment_factor(lib, 10.0);
  for (double x : settings.extra_ef_percents) r.extra_ef.emplace_back(x, enrichment_factor(lib, x));
  if (lib.complete() && lib.n_actives_total < lib.n_total_library) {
    r.bedroc = bedroc(lib, settings.alpha);
    r.roc_auc = roc_auc(lib);
  }
  r.actives_remaining_pct = actives_remaining_pct;
  r.classical = classical_metrics(lib, settings.policy);
  return r;
}

}  // namespace vscreen
