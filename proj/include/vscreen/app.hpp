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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vscreen/metrics.hpp"
#include "vscreen/ml/features.hpp"
#include "vscreen/ml/mlp.hpp"
#include "vscreen/rank_engine.hpp"
#include "vscreen/screen_data.hpp"

namespace vscreen::app {

inline constexpr std::string_view kVersion = "0.1.0";

/// Everything a run needs, resolved from defaults, an optional JSON config
/// file and command-line overrides (in that order of precedence).
struct RunConfig {
  std::vector<std::filesystem::path> inputs;  ///< score tables
  std::optional<std::filesystem::path> scorers_file;
  std::vector<ScorerSpec> scorers = default_scorer_specs();

  /// Builtin scheme names; "all" expands to every builtin.
  std::vector<std::string> schemes = builtin_scheme_names();
  std::vector<PathwaySelection> pathways{PathwaySelection::AutoDock, PathwaySelection::DiffDock};
  std::vector<std::filesystem::path> custom_schemes;

  MetricSettings metrics;
  /// Applied at ingest: keep this fraction of inactives per target.
  double inactive_fraction = 1.0;

  std::optional<std::filesystem::path> recipe_file;
  ml::FeatureRecipe recipe = ml::default_recipe();
  std::vector<ml::NetConfig> nets{ml::NetConfig::wide()};
  double train_fraction = 0.75;
  double decision_threshold = 0.5;
  std::string baseline_scorer = "gnina_ad";
  std::optional<double> baseline_ef1;
  /// method,ef1 rows merged into the model comparison.
  std::optional<std::filesystem::path> extra_results;

  std::optional<std::filesystem::path> synth_spec;
  std::optional<std::filesystem::path> model_file;

  std::uint64_t seed = 0;
  std::filesystem::path out = "out";
  std::size_t jobs = 1;

  /// Throws ConfigError: alpha <= 0, EF percentages outside (0, 100],
  /// missing referenced files, bad fractions.
  void validate() const;
};

/// Parses a run config. Relative paths are resolved against `base_dir`.
RunConfig parse_run_config(std::string_view json_text, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

/// Settings (not file locations) as structured text, for the manifest.
std::string resolved_config_json(const RunConfig& config);

/// Lower-case hex SHA-256 of a file's bytes. Throws DataError.
std::string sha256_file(const std::filesystem::path& path);

/// Writes <out>/manifest_<command>.json: tool version, command, resolved
/// settings, seeds, format versions and input digests (inputs identified by
/// file name and content hash, no timestamps).
void write_manifest(const RunConfig& config, std::string_view command,
                    const std::vector<std::filesystem::path>& inputs);

std::vector<ScreenDataset> load_inputs(const RunConfig& config);

// Each command writes its files under config.out, prints a human-readable
// summary to `out`, and throws vscreen::Error subclasses on failure.
void cmd_ingest(const RunConfig& config, std::ostream& out);
void cmd_consensus(const RunConfig& config, std::ostream& out);
void cmd_metrics(const RunConfig& config, std::ostream& out);
void cmd_train(const RunConfig& config, std::ostream& out);
void cmd_synth(const RunConfig& config, std::ostream& out);
void cmd_report(const RunConfig& config, std::ostream& out);

/// Summary rows read back from format_summary_csv output; only the chosen
/// statistic is populated.
std::vector<SummaryRow> parse_summary_csv(std::string_view text, SummaryStatistic stat);

/// Extra comparison rows: header "method,ef1".
struct ExternalResult {
  std::string method;
  double ef1 = 0.0;
};
std::vector<ExternalResult> load_external_results(const std::filesystem::path& path);

/// Full command line entry point: parses arguments, runs the subcommand,
/// reports errors on `err`. Returns the process exit code (0 ok, 1 internal
/// error, 2 configuration/usage error, 3 data error).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vscreen::app
