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
#include <ostream>

#include <fmt/format.h>

#include "vscreen/app.hpp"
#include "vscreen/csv.hpp"
#include "vscreen/error.hpp"
#include "vscreen/numfmt.hpp"

namespace vscreen::app {

namespace fs = std::filesystem;

namespace {

std::vector<std::vector<std::string>> read_table(std::string_view text,
                                                 const std::vector<std::string>& header,
                                                 const std::string& what) {
  std::vector<std::vector<std::string>> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (line_no++ == 0) {
      if (fields != header) throw DataError(what + " has an unexpected header");
      continue;
    }
    if (fields.size() != header.size()) {
      throw ParseError(what + ": row " + std::to_string(line_no - 1) + " has " +
                           std::to_string(fields.size()) + " fields",
                       line_no - 1);
    }
    rows.push_back(std::move(fields));
  }
  if (line_no == 0) throw DataError(what + " is empty");
  return rows;
}

std::optional<double> cell(const std::string& s, std::size_t row) {
  if (s.empty()) return std::nullopt;
  if (auto v = parse_real(s)) return v;
  throw ParseError("not a number: '" + s + "'", row);
}

}  // namespace

std::vector<SummaryRow> parse_summary_csv(std::string_view text, SummaryStatistic stat) {
  const std::vector<std::string> header{"pathway",     "scheme",
                                        "ef1",         "ef10",
                                        "roc_auc",     "bedroc",
                                        "actives_remaining_pct", "success_times",
                                        "n_targets"};
  std::vector<SummaryRow> out;
  std::size_t row_no = 0;
  for (const auto& f : read_table(text, header, "summary file")) {
    ++row_no;
    SummaryRow r;
    r.pathway = f[0];
    r.scheme = f[1];
    auto set = [&](SummaryStat& s, const std::string& v) {
      (stat == SummaryStatistic::Median ? s.median : s.mean) = cell(v, row_no);
    };
    set(r.ef1, f[2]);
    set(r.ef10, f[3]);
    set(r.roc_auc, f[4]);
    set(r.bedroc, f[5]);
    set(r.actives_remaining, f[6]);
    r.success_times = static_cast<std::size_t>(cell(f[7], row_no).value_or(0.0));
    r.n_targets = static_cast<std::size_t>(cell(f[8], row_no).value_or(0.0));
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ExternalResult> load_external_results(const fs::path& path) {
  std::vector<ExternalResult> out;
  std::size_t row_no = 0;
  for (const auto& f : read_table(read_text_file(path), {"method", "ef1"}, path.string())) {
    ++row_no;
    const auto v = cell(f[1], row_no);
    if (!v) throw ParseError(path.string() + ": missing ef1 value", row_no);
    out.push_back({f[0], *v});
  }
  return out;
}

void cmd_report(const RunConfig& config, std::ostream& out) {
  std::string report;
  bool any = false;
  for (auto [file, stat, title] :
       {std::tuple{"summary_median.csv", SummaryStatistic::Median, "Median over targets"},
        std::tuple{"summary_mean.csv", SummaryStatistic::Mean, "Average over targets"}}) {
    const auto path = config.out / file;
    if (!fs::exists(path)) continue;
    any = true;
    const auto rows = parse_summary_csv(read_text_file(path), stat);
    report += fmt::format("{}\n{}\n", title, format_summary_table(rows, stat));
  }

  const auto consensus = config.out / "consensus_summary.csv";
  if (fs::exists(consensus)) {
    any = true;
    const auto rows = read_table(read_text_file(consensus),
                                 {"target_id", "pathway", "scheme", "n_total", "n_retained",
                                  "n_actives", "n_actives_retained", "actives_remaining_pct"},
                                 consensus.string());
    report += "Consensus filtering\n";
    report += fmt::format("{:<12} {:<10} {:<12} {:>10} {:>10} {:>9}\n", "Target", "Pathway",
                          "Scheme", "Retained", "Actives", "Remain");
    for (const auto& f : rows) {
      report += fmt::format("{:<12} {:<10} {:<12} {:>10} {:>10} {:>8}%\n", f[0], f[1], f[2],
                            f[4] + "/" + f[3], f[6] + "/" + f[5],
                            fmt::format("{:.1f}", cell(f[7], 0).value_or(0.0)));
    }
    report += "\n";
  }

  const auto comparison = config.out / "comparison.csv";
  if (fs::exists(comparison)) {
    any = true;
    const auto rows = read_table(read_text_file(comparison),
                                 {"rank", "method", "ef1", "delta_vs_baseline"},
                                 comparison.string());
    std::size_t width = 5;
    for (const auto& f : rows) width = std::max(width, f[1].size());
    report += "Model comparison\n";
    report += fmt::format("{:<4} {:<{}} {:>8} {:>14}\n", "Rank", "Model", width, "EF@1%",
                          "Delta vs base");
    for (const auto& f : rows) {
      report += fmt::format("{:<4} {:<{}} {:>8.3f} {:>14}\n", f[0], f[1], width,
                            cell(f[2], 0).value_or(0.0), f[3]);
    }
    report += "\n";
  }
  if (!any) throw DataError("no results to report in " + config.out.string());
  write_text_file(config.out / "report.txt", report);
  out << report;
  write_manifest(config, "report", {});
}

}  // namespace vscreen::app
