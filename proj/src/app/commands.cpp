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
#include <limits>
#include <map>
#include <ostream>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

#include "app/internal.hpp"
#include "vscreen/app.hpp"
#include "vscreen/csv.hpp"
#include "vscreen/error.hpp"
#include "vscreen/ml/model.hpp"
#include "vscreen/numfmt.hpp"
#include "vscreen/rng.hpp"
#include "vscreen/synth.hpp"

namespace vscreen::app {

namespace fs = std::filesystem;

namespace {

// Stream offsets for derive_seed, one per consumer of the run seed.
constexpr std::uint64_t kSubsampleStream = 0x1000;
constexpr std::uint64_t kSplitStream = 0x2000;
constexpr std::uint64_t kNetStream = 0x3000;

std::string safe_name(std::string_view s) {
  std::string out;
  for (char c : s) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    out += ok ? c : '_';
  }
  return out;
}

void require_inputs(const RunConfig& config) {
  if (config.inputs.empty()) throw ConfigError("no input score tables given (use --input)");
}

// Rethrows data problems with the target they came from.
template <typename Fn>
auto for_target(const ScreenDataset& ds, Fn&& fn) {
  try {
    return fn();
  } catch (const MetricError& e) {
    throw MetricError("target " + ds.target_id() + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError("target " + ds.target_id() + ": " + e.what());
  }
}

struct SchemeRun {
  std::string pathway;
  ConsensusSpec spec;
};

std::vector<SchemeRun> scheme_runs(const RunConfig& config) {
  std::vector<SchemeRun> runs;
  for (const auto& name : config.schemes) {
    if (name == "Global") {
      runs.push_back({"global", builtin_consensus(name, PathwaySelection::Both)});
      continue;
    }
    for (auto p : config.pathways) runs.push_back({std::string(to_string(p)), builtin_consensus(name, p)});
  }
  for (const auto& path : config.custom_schemes) {
    auto spec = load_consensus_spec(path);
    runs.push_back({spec.pathway, std::move(spec)});
  }
  return runs;
}

std::vector<RankTable> all_rank_tables(const ScreenDataset& ds) {
  std::vector<RankTable> tables;
  for (const auto& s : ds.scorers()) tables.push_back(assign_ranks(ds, s.id));
  return tables;
}

ConsensusRanking rank_with(const ScreenDataset& ds, const std::vector<RankTable>& tables,
                           const ConsensusSpec& spec) {
  const auto filter = apply_filter(ds, spec.filter);
  return consensus_rank(ds, tables, spec, filter.retained);
}

std::vector<fs::path> manifest_inputs(const RunConfig& config) {
  std::vector<fs::path> in = config.inputs;
  for (const auto* p : {&config.scorers_file, &config.recipe_file, &config.extra_results,
                        &config.synth_spec, &config.model_file}) {
    if (*p) in.push_back(**p);
  }
  in.insert(in.end(), config.custom_schemes.begin(), config.custom_schemes.end());
  return in;
}

std::string pct(double v) { return fmt::format("{:.1f}%", v); }

}  // namespace

std::vector<ScreenDataset> load_inputs(const RunConfig& config) {
  require_inputs(config);
  std::vector<ScreenDataset> all;
  for (const auto& path : config.inputs) {
    for (auto& ds : load_score_tables(path, config.scorers)) all.push_back(std::move(ds));
  }
  std::sort(all.begin(), all.end(), [](const ScreenDataset& a, const ScreenDataset& b) {
    return a.target_id() < b.target_id();
  });
  for (std::size_t i = 1; i < all.size(); ++i) {
    if (all[i].target_id() == all[i - 1].target_id()) {
      throw DataError("target " + all[i].target_id() + " appears in more than one input");
    }
  }
  if (config.inactive_fraction < 1.0) {
    for (std::size_t t = 0; t < all.size(); ++t) {
      all[t] = subsample_inactives(all[t], config.inactive_fraction,
                                   derive_seed(config.seed, kSubsampleStream + t));
    }
  }
  return all;
}

void cmd_ingest(const RunConfig& config, std::ostream& out) {
  config.validate();
  const auto datasets = load_inputs(config);

  std::vector<std::string> header{"target_id", "n_total", "n_actives", "n_inactives"};
  for (const auto& s : config.scorers) header.push_back("missing_" + s.id);
  header.emplace_back("violations");
  std::string csv = join_csv(header) + "\n";

  out << fmt::format("{:<16} {:>8} {:>8} {:>10}  {}\n", "Target", "N", "Actives", "Inactives",
                     "Status");
  for (const auto& ds : datasets) {
    const auto r = validate_dataset(ds);
    std::vector<std::string> row{r.target_id, std::to_string(r.n_total), std::to_string(r.n_actives),
                                 std::to_string(r.n_inactives)};
    for (const auto& m : r.missing) row.push_back(std::to_string(m.missing));
    std::string v;
    for (const auto& s : r.violations) v += (v.empty() ? "" : "; ") + s;
    row.push_back(v);
    csv += join_csv(row) + "\n";
    out << fmt::format("{:<16} {:>8} {:>8} {:>10}  {}\n", r.target_id, r.n_total, r.n_actives,
                       r.n_inactives, r.ok() ? "ok" : v);
  }
  write_text_file(config.out / "validation.csv", csv);
  write_text_file(config.out / "scores.csv", format_score_tables(datasets));
  write_manifest(config, "ingest", manifest_inputs(config));
}

void cmd_consensus(const RunConfig& config, std::ostream& out) {
  config.validate();
  const auto datasets = load_inputs(config);
  const auto runs = scheme_runs(config);
  for (const auto& r : runs) {
    write_text_file(config.out / "specs" / (safe_name(r.pathway + "__" + r.spec.name) + ".json"),
                    consensus_spec_to_json(r.spec));
  }

  std::vector<std::vector<ConsensusRanking>> results(datasets.size());
  parallel_for(datasets.size(), config.jobs, [&](std::size_t t) {
    const auto& ds = datasets[t];
    for_target(ds, [&] {
      const auto tables = all_rank_tables(ds);
      for (const auto& r : runs) results[t].push_back(rank_with(ds, tables, r.spec));
      return 0;
    });
  });

  std::string summary =
      "target_id,pathway,scheme,n_total,n_retained,n_actives,n_actives_retained,"
      "actives_remaining_pct\n";
  std::map<std::pair<std::string, std::string>, std::vector<double>> remaining;
  for (std::size_t t = 0; t < datasets.size(); ++t) {
    for (std::size_t k = 0; k < runs.size(); ++k) {
      const auto& c = results[t][k];
      const auto& r = runs[k];
      write_text_file(config.out / "rankings" /
                          (safe_name(c.target_id + "__" + r.pathway + "__" + r.spec.name) + ".csv"),
                      format_ranking(c));
      std::size_t kept_actives = 0;
      for (const auto& e : c.retained) kept_actives += e.label == 1 ? 1 : 0;
      summary += join_csv({c.target_id, r.pathway, r.spec.name, std::to_string(c.n_total),
                           std::to_string(c.retained.size()), std::to_string(c.n_actives),
                           std::to_string(kept_actives), format_real(c.actives_remaining_pct)});
      summary += "\n";
      remaining[{r.pathway, r.spec.name}].push_back(c.actives_remaining_pct);
    }
  }
  write_text_file(config.out / "consensus_summary.csv", summary);

  out << fmt::format("{:<10} {:<12} {:>16}\n", "Pathway", "Scheme", "Actives remain");
  for (const auto& r : runs) {
    out << fmt::format("{:<10} {:<12} {:>16}\n", r.pathway, r.spec.name,
                       pct(median(remaining[{r.pathway, r.spec.name}])));
  }
  write_manifest(config, "consensus", manifest_inputs(config));
}

void cmd_metrics(const RunConfig& config, std::ostream& out) {
  config.validate();
  const auto datasets = load_inputs(config);
  const auto runs = scheme_runs(config);

  std::vector<std::vector<TargetReport>> per(datasets.size());
  parallel_for(datasets.size(), config.jobs, [&](std::size_t t) {
    const auto& ds = datasets[t];
    for_target(ds, [&] {
      const auto tables = all_rank_tables(ds);
      for (std::size_t s = 0; s < tables.size(); ++s) {
        const auto& spec = ds.scorers()[s];
        per[t].push_back({ds.target_id(), std::string(to_string(spec.pathway)), spec.id,
                          evaluate_ranking(ranked_library(ds, tables[s]), config.metrics)});
      }
      for (const auto& r : runs) {
        const auto c = rank_with(ds, tables, r.spec);
        per[t].push_back({ds.target_id(), r.pathway, r.spec.name,
                          evaluate_ranking(ranked_library(c), config.metrics,
                                           c.actives_remaining_pct)});
      }
      return 0;
    });
  });
  std::vector<TargetReport> reports;
  for (auto& v : per) reports.insert(reports.end(), v.begin(), v.end());
  const auto rows = summarize(reports);

  write_text_file(config.out / "metrics_per_target.csv", format_per_target_csv(reports));
  write_text_file(config.out / "summary_median.csv",
                  format_summary_csv(rows, SummaryStatistic::Median));
  write_text_file(config.out / "summary_mean.csv", format_summary_csv(rows, SummaryStatistic::Mean));
  nlohmann::ordered_json meta;
  meta["alpha"] = config.metrics.alpha;
  meta["ef_percents"] = std::vector<double>{1.0, 10.0};
  for (double x : config.metrics.extra_ef_percents) meta["ef_percents"].push_back(x);
  meta["threshold_policy"] = config.metrics.policy.label();
  meta["n_targets"] = datasets.size();
  meta["summary_statistics"] = {"median", "mean"};
  write_text_file(config.out / "metrics_meta.json", meta.dump(2) + "\n");

  out << fmt::format("{} targets, BEDROC alpha = {}\n", datasets.size(),
                     format_real(config.metrics.alpha));
  out << format_summary_table(rows, SummaryStatistic::Median);
  write_manifest(config, "metrics", manifest_inputs(config));
}

namespace {

std::string display_name(const ml::NetConfig& c) {
  std::string widths;
  for (auto w : c.widths) widths += (widths.empty() ? "" : "-") + std::to_string(w);
  std::string base = c.name;
  if (c.name == "wnn") base = "Wide Neural Network";
  if (c.name == "deep") base = "Deep Neural Network";
  return base + " (" + widths + ")";
}

// EF1% of a single scorer on a subset of records.
double scorer_ef1(const ScreenDataset& ds, std::size_t scorer,
                  std::span<const std::size_t> records) {
  std::vector<double> s;
  std::vector<int> y;
  std::vector<std::string> ids;
  for (auto i : records) {
    const auto v = ds.oriented_score(i, scorer);
    s.push_back(v ? *v : -std::numeric_limits<double>::infinity());
    y.push_back(ds.record(i).label);
    ids.push_back(ds.record(i).ligand_id);
  }
  return enrichment_factor(ranked_library_from_scores(s, y, ids), 1.0);
}

}  // namespace

void cmd_train(const RunConfig& config, std::ostream& out) {
  config.validate();
  const auto datasets = load_inputs(config);
  const std::size_t n_targets = datasets.size();

  std::vector<ml::FeatureMatrix> train_parts(n_targets);
  std::vector<ml::FeatureMatrix> val_parts(n_targets);
  std::vector<double> baseline(n_targets);
  parallel_for(n_targets, config.jobs, [&](std::size_t t) {
    const auto& ds = datasets[t];
    for_target(ds, [&] {
      const auto fm = ml::build_features(ds, config.recipe);
      const auto split =
          ml::split_dataset(ds, config.train_fraction, derive_seed(config.seed, kSplitStream + t));
      train_parts[t] = fm.select_rows(split.train);
      val_parts[t] = fm.select_rows(split.validation);
      if (!config.baseline_ef1) {
        baseline[t] = scorer_ef1(ds, ds.scorer_index(config.baseline_scorer), split.validation);
      }
      return 0;
    });
  });
  const auto train = ml::FeatureMatrix::concat(train_parts);
  const auto validation = ml::FeatureMatrix::concat(val_parts);
  const double baseline_ef1 = config.baseline_ef1 ? *config.baseline_ef1 : median(baseline);

  std::vector<ml::TrainedModel> models(config.nets.size());
  parallel_for(config.nets.size(), config.jobs, [&](std::size_t k) {
    auto net = config.nets[k];
    net.seed = derive_seed(config.seed, kNetStream + k);
    models[k] = ml::fit_model(train, validation, config.recipe, net);
  });

  std::vector<ml::ComparisonRow> rows;
  std::string per_target =
      "model,target_id,ef1,ef10,roc_auc,bedroc,baseline_ef1,delta_vs_baseline,threshold,"
      "precision_at_threshold,recall_at_threshold,f1_at_threshold,mcc_at_threshold,"
      "f1_optimal_threshold,precision_at_f1_optimal,recall_at_f1_optimal,f1_at_f1_optimal,"
      "mcc_at_f1_optimal\n";
  std::set<std::string> used_names;
  for (std::size_t k = 0; k < models.size(); ++k) {
    const auto& model = models[k];
    std::string file = safe_name(model.config.name);
    while (!used_names.insert(file).second) file += "_" + std::to_string(k);
    save_model(model, config.out / "models" / (file + ".json"));
    write_text_file(config.out / "models" / (file + "_training_log.csv"),
                    ml::format_training_log(model.log));

    std::vector<double> efs;
    for (std::size_t t = 0; t < n_targets; ++t) {
      const double base_t = config.baseline_ef1 ? *config.baseline_ef1 : baseline[t];
      ml::EvaluationOptions opt;
      opt.threshold = config.decision_threshold;
      opt.alpha = config.metrics.alpha;
      if (base_t > 0.0) opt.baseline_ef1 = base_t;
      const auto ev = for_target(datasets[t], [&] { return ml::evaluate_model(model, val_parts[t], opt); });
      efs.push_back(ev.report.ef1);
      const auto opt_cell = [](const std::optional<double>& v) { return v ? format_real(*v) : ""; };
      per_target += join_csv(
          {file, datasets[t].target_id(), format_real(ev.report.ef1), format_real(ev.report.ef10),
           opt_cell(ev.report.roc_auc), opt_cell(ev.report.bedroc), format_real(base_t),
           ev.delta_pct ? ml::format_delta(*ev.delta_pct) : "", format_real(ev.threshold),
           format_real(ev.at_threshold.precision), format_real(ev.at_threshold.recall),
           format_real(ev.at_threshold.f1), format_real(ev.at_threshold.mcc),
           format_real(ev.f1_threshold), format_real(ev.at_f1_threshold.precision),
           format_real(ev.at_f1_threshold.recall), format_real(ev.at_f1_threshold.f1),
           format_real(ev.at_f1_threshold.mcc)});
      per_target += "\n";
    }
    rows.push_back({display_name(model.config), median(efs), false});
    out << fmt::format("{}: best epoch {} of {}, validation EF1% {}\n", display_name(model.config),
                       model.best_epoch, model.log.size(), fmt::format("{:.3f}", median(efs)));
  }
  if (config.extra_results) {
    for (const auto& e : load_external_results(*config.extra_results)) {
      rows.push_back({e.method, e.ef1, false});
    }
  }
  rows.push_back({config.baseline_scorer + " (baseline)", baseline_ef1, true});

  write_text_file(config.out / "model_eval_per_target.csv", per_target);
  write_text_file(config.out / "comparison.csv", ml::format_comparison_csv(rows));
  out << ml::format_comparison_table(rows);
  write_manifest(config, "train", manifest_inputs(config));
}

void cmd_synth(const RunConfig& config, std::ostream& out) {
  config.validate();
  if (!config.synth_spec) throw ConfigError("synth needs a spec file (--spec)");
  const auto specs = synth::load_synthetic_specs(*config.synth_spec);
  if (specs.empty()) throw ConfigError("synth spec lists no targets");

  std::vector<ScreenDataset> datasets(specs.size());
  parallel_for(specs.size(), config.jobs,
               [&](std::size_t t) { datasets[t] = synth::generate_synthetic(specs[t]); });
  std::sort(datasets.begin(), datasets.end(), [](const ScreenDataset& a, const ScreenDataset& b) {
    return a.target_id() < b.target_id();
  });

  std::vector<ScorerSpec> scorers;
  for (const auto& s : specs.front().scorers) scorers.push_back(s.spec);
  write_text_file(config.out / "synth_scores.csv", format_score_tables(datasets));
  write_text_file(config.out / "synth_scorers.json", scorer_specs_to_json(scorers));

  out << fmt::format("{:<16} {:>8} {:>8} {:>20}\n", "Target", "N", "Actives", "Seed");
  for (std::size_t t = 0; t < specs.size(); ++t) {
    const auto& s = specs[t];
    out << fmt::format("{:<16} {:>8} {:>8} {:>20}\n", s.target_id, s.n_actives + s.n_inactives,
                       s.n_actives, s.seed);
  }
  write_manifest(config, "synth", manifest_inputs(config));
}

}  // namespace vscreen::app
