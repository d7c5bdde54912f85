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

#include <ostream>

#include <CLI11.hpp>

#include "app/internal.hpp"
#include "vscreen/app.hpp"
#include "vscreen/error.hpp"
#include "vscreen/ml/features.hpp"
#include "vscreen/numfmt.hpp"

namespace vscreen::app {

namespace {

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::size_t> jobs;

  std::vector<std::string> inputs;
  std::string scorers;
  double inactive_fraction = 0.0;

  std::vector<std::string> schemes;
  std::vector<std::string> pathways;
  std::vector<std::string> custom_schemes;

  std::optional<double> alpha;
  std::vector<double> ef_percents;
  std::string threshold_policy;

  std::string recipe;
  std::vector<std::string> nets;
  std::optional<std::size_t> patience;
  std::optional<std::size_t> max_epochs;
  std::string baseline;
  std::optional<double> baseline_ef1;
  std::string extra_results;
  std::optional<double> threshold;
  std::optional<double> train_fraction;

  std::string synth_spec;
};

void add_data_options(CLI::App* sub, Overrides& o) {
  sub->add_option("-i,--input", o.inputs, "Score table(s)");
  sub->add_option("--scorers", o.scorers, "Scorer spec file (JSON)");
  sub->add_option("--inactive-fraction", o.inactive_fraction,
                  "Keep this fraction of inactives per target (seeded)");
}

void add_scheme_options(CLI::App* sub, Overrides& o) {
  sub->add_option("--scheme", o.schemes,
                  "Builtin scheme: cc-medium, uc-strong, cc-weak, global, or all");
  sub->add_option("--pathway", o.pathways, "autodock, diffdock, or all");
  sub->add_option("--spec", o.custom_schemes, "Custom consensus spec file (JSON)");
}

RunConfig resolve(const Overrides& o) {
  RunConfig c = o.config.empty() ? RunConfig{} : load_run_config(o.config);
  if (o.seed) c.seed = *o.seed;
  if (!o.out.empty()) c.out = o.out;
  if (o.jobs) c.jobs = *o.jobs;
  if (!o.inputs.empty()) c.inputs.assign(o.inputs.begin(), o.inputs.end());
  if (!o.scorers.empty()) {
    c.scorers_file = o.scorers;
    c.scorers = load_scorer_specs(o.scorers);
  }
  if (o.inactive_fraction != 0.0) c.inactive_fraction = o.inactive_fraction;
  if (!o.schemes.empty()) c.schemes = normalize_schemes(o.schemes);
  if (!o.pathways.empty()) c.pathways = normalize_pathways(o.pathways);
  if (!o.custom_schemes.empty()) {
    c.custom_schemes.assign(o.custom_schemes.begin(), o.custom_schemes.end());
    // a custom spec alone replaces the builtin selection
    if (o.schemes.empty()) c.schemes.clear();
  }
  if (o.alpha) c.metrics.alpha = *o.alpha;
  if (!o.ef_percents.empty()) c.metrics.extra_ef_percents = o.ef_percents;
  if (!o.threshold_policy.empty()) {
    if (o.threshold_policy == "top1percent") {
      c.metrics.policy = ThresholdPolicy::top1_percent();
    } else if (auto v = parse_real(o.threshold_policy)) {
      c.metrics.policy = ThresholdPolicy::score_at_least(*v);
    } else {
      throw ConfigError("--threshold-policy must be top1percent or a number");
    }
  }
  if (!o.recipe.empty()) {
    c.recipe_file = o.recipe;
    c.recipe = ml::load_recipe(o.recipe);
  }
  if (!o.nets.empty()) {
    c.nets.clear();
    for (const auto& n : o.nets) c.nets.push_back(net_preset(n));
  }
  for (auto& n : c.nets) {
    if (o.patience) n.patience = *o.patience;
    if (o.max_epochs) n.max_epochs = *o.max_epochs;
  }
  if (!o.baseline.empty()) c.baseline_scorer = o.baseline;
  if (o.baseline_ef1) c.baseline_ef1 = *o.baseline_ef1;
  if (!o.extra_results.empty()) c.extra_results = o.extra_results;
  if (o.threshold) c.decision_threshold = *o.threshold;
  if (o.train_fraction) c.train_fraction = *o.train_fraction;
  if (!o.synth_spec.empty()) c.synth_spec = o.synth_spec;
  return c;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Consensus ranking, enrichment metrics and ML re-ranking for docking screens",
               "vscreen"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));
  Overrides o;
  app.add_option("--config", o.config, "Run config (JSON)");
  app.add_option("--seed", o.seed, "Run seed");
  app.add_option("--out", o.out, "Output directory");
  app.add_option("--jobs", o.jobs, "Worker threads across targets (0 = all cores)");

  auto* ingest = app.add_subcommand("ingest", "Load, validate and normalise score tables");
  auto* consensus = app.add_subcommand("consensus", "Filter and consensus-rank each target");
  auto* metrics = app.add_subcommand("metrics", "Per-target metrics and cross-target summaries");
  auto* train = app.add_subcommand("train", "Train neural re-rankers and compare to a baseline");
  auto* synth = app.add_subcommand("synth", "Generate seeded synthetic score tables");
  auto* report = app.add_subcommand("report", "Render the result tables found in --out");
  for (auto* sub : {ingest, consensus, metrics, train, synth, report}) sub->fallthrough();

  for (auto* sub : {ingest, consensus, metrics, train}) add_data_options(sub, o);
  add_scheme_options(consensus, o);
  add_scheme_options(metrics, o);
  metrics->add_option("--alpha", o.alpha, "BEDROC alpha (default 20)");
  metrics->add_option("--ef", o.ef_percents, "Extra EF percentages besides 1 and 10");
  metrics->add_option("--threshold-policy", o.threshold_policy,
                      "top1percent (default) or a score cut");
  train->add_option("--recipe", o.recipe, "Feature recipe file (JSON)");
  train->add_option("--net", o.nets, "wnn and/or deep (default wnn)");
  train->add_option("--patience", o.patience, "Early-stopping patience in epochs");
  train->add_option("--max-epochs", o.max_epochs, "Epoch limit");
  train->add_option("--baseline", o.baseline, "Baseline scorer id (default gnina_ad)");
  train->add_option("--baseline-ef1", o.baseline_ef1, "Use this baseline EF1% instead");
  train->add_option("--extra-results", o.extra_results, "method,ef1 rows to merge");
  train->add_option("--threshold", o.threshold, "Decision threshold on probability");
  train->add_option("--train-fraction", o.train_fraction, "Per-target train share");
  train->add_option("--alpha", o.alpha, "BEDROC alpha (default 20)");
  synth->add_option("--spec", o.synth_spec, "Synthetic library spec (JSON)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    // help and version requests exit 0, every usage error exits 2
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    const RunConfig config = resolve(o);
    if (ingest->parsed()) cmd_ingest(config, out);
    if (consensus->parsed()) cmd_consensus(config, out);
    if (metrics->parsed()) cmd_metrics(config, out);
    if (train->parsed()) cmd_train(config, out);
    if (synth->parsed()) cmd_synth(config, out);
    if (report->parsed()) cmd_report(config, out);
  } catch (const Error& e) {
    err << "vscreen: error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    err << "vscreen: internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace vscreen::app
