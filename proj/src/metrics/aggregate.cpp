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
#include <numeric>

#include <fmt/format.h>

#include "vscreen/csv.hpp"
#include "vscreen/error.hpp"
#include "vscreen/metrics.hpp"
#include "vscreen/numfmt.hpp"

namespace vscreen {

double median(std::vector<double> values) {
  if (values.empty()) throw ArgumentError("median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return (values[mid - 1] + values[mid]) / 2.0;
}

namespace {

SummaryStat stat_of(const std::vector<double>& values) {
  SummaryStat s;
  if (values.empty()) return s;
  s.median = median(values);
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  return s;
}

std::string cell(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

}  // namespace

SummaryRow aggregate(const std::map<std::string, MetricsReport>& reports,
                     const std::string& pathway, const std::string& scheme) {
  if (reports.empty()) throw ArgumentError("aggregate needs at least one target report");
  std::vector<double> ef1, ef10, auc, bed, remaining;
  SummaryRow row;
  row.pathway = pathway;
  row.scheme = scheme;
  row.n_targets = reports.size();
  for (const auto& [target, r] : reports) {
    ef1.push_back(r.ef1);
    ef10.push_back(r.ef10);
    if (r.roc_auc) auc.push_back(*r.roc_auc);
    if (r.bedroc) bed.push_back(*r.bedroc);
    if (r.actives_remaining_pct) remaining.push_back(*r.actives_remaining_pct);
    row.success_times += r.ef1 > 1.0 ? 1 : 0;
  }
  row.ef1 = stat_of(ef1);
  row.ef10 = stat_of(ef10);
  row.roc_auc = stat_of(auc);
  row.bedroc = stat_of(bed);
  row.actives_remaining = stat_of(remaining);
  return row;
}

std::vector<SummaryRow> summarize(std::span<const TargetReport> reports) {
  std::vector<std::pair<std::string, std::string>> keys;
  std::map<std::pair<std::string, std::string>, std::map<std::string, MetricsReport>> groups;
  for (const auto& r : reports) {
    auto key = std::make_pair(r.pathway, r.scheme);
    if (!groups.contains(key)) keys.push_back(key);
    groups[key][r.target_id] = r.report;
  }
  std::vector<SummaryRow> rows;
  for (const auto& key : keys) rows.push_back(aggregate(groups[key], key.first, key.second));
  return rows;
}

std::string format_per_target_csv(std::span<const TargetReport> reports) {
  std::vector<double> extra;
  if (!reports.empty()) {
    for (const auto& [x, v] : reports.front().report.extra_ef) extra.push_back(x);
  }
  std::vector<std::string> header{"target_id", "pathway", "scheme", "ef1", "ef10"};
  for (double x : extra) header.push_back("ef" + format_real(x));
  for (const char* h : {"roc_auc", "bedroc", "alpha", "actives_remaining_pct", "threshold_policy",
                        "tp", "fp", "fn", "tn", "accuracy", "precision", "recall", "specificity",
                        "f1", "balanced_accuracy", "mcc"}) {
    header.emplace_back(h);
  }
  std::string out = join_csv(header) + "\n";
  for (const auto& t : reports) {
    const auto& r = t.report;
    const auto& c = r.classical;
    std::vector<std::string> row{t.target_id, t.pathway, t.scheme, format_real(r.ef1),
                                 format_real(r.ef10)};
    for (const auto& [x, v] : r.extra_ef) row.push_back(format_real(v));
    row.push_back(cell(r.roc_auc));
    row.push_back(cell(r.bedroc));
    row.push_back(format_real(r.alpha));
    row.push_back(cell(r.actives_remaining_pct));
    row.push_back(c.policy.label());
    for (std::size_t v : {c.confusion.tp, c.confusion.fp, c.confusion.fn, c.confusion.tn}) {
      row.push_back(std::to_string(v));
    }
    for (double v : {c.accuracy, c.precision, c.recall, c.specificity, c.f1, c.balanced_accuracy,
                     c.mcc}) {
      row.push_back(format_real(v));
    }
    out += join_csv(row) + "\n";
  }
  return out;
}

namespace {

const std::optional<double>& pick(const SummaryStat& s, SummaryStatistic stat) {
  return stat == SummaryStatistic::Median ? s.median : s.mean;
}

}  // namespace

std::string format_summary_csv(std::span<const SummaryRow> rows, SummaryStatistic stat) {
  std::string out =
      "pathway,scheme,ef1,ef10,roc_auc,bedroc,actives_remaining_pct,success_times,n_targets\n";
  for (const auto& r : rows) {
    out += join_csv({r.pathway, r.scheme, cell(pick(r.ef1, stat)), cell(pick(r.ef10, stat)),
                     cell(pick(r.roc_auc, stat)), cell(pick(r.bedroc, stat)),
                     cell(pick(r.actives_remaining, stat)), std::to_string(r.success_times),
                     std::to_string(r.n_targets)});
    out += "\n";
  }
  return out;
}

std::string format_summary_table(std::span<const SummaryRow> rows, SummaryStatistic stat) {
  const std::string tag = stat == SummaryStatistic::Median ? "Median" : "Average";
  const auto num = [](const std::optional<double>& v, int prec) {
    return v ? fmt::format("{:.{}f}", *v, prec) : std::string("-");
  };
  const auto pct = [](const std::optional<double>& v) {
    return v ? fmt::format("{:.1f}%", *v) : std::string("-");
  };
  std::string out = fmt::format("{:<10} {:<12} {:>8} {:>8} {:>8} {:>8} {:>9} {:>8}\n", "Pathway",
                                "Scheme", tag + " EF1%", "EF10%", "ROC-AUC", "BEDROC", "Remain",
                                "Success");
  for (const auto& r : rows) {
    out += fmt::format("{:<10} {:<12} {:>8} {:>8} {:>8} {:>8} {:>9} {:>5}/{:<2}\n", r.pathway,
                       r.scheme, num(pick(r.ef1, stat), 2), num(pick(r.ef10, stat), 2),
                       num(pick(r.roc_auc, stat), 3), num(pick(r.bedroc, stat), 3),
                       pct(pick(r.actives_remaining, stat)), r.success_times, r.n_targets);
  }
  return out;
}

}  // namespace vscreen
