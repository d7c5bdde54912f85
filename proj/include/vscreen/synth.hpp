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
#include <string>
#include <string_view>
#include <vector>

#include "vscreen/screen_data.hpp"

namespace vscreen::synth {

// Seeded synthetic screening libraries. Scores are Gaussian with a shared
// correlation structure; actives get a per-scorer mean shift. They exist to
// exercise the ranking and metric code, not to imitate real docking output.

struct SyntheticScorer {
  ScorerSpec spec;
  double signal_strength = 0.0;  ///< active mean shift, in units of `spread`
  double missing_rate = 0.0;     ///< in [0, 1)
  double location = 0.0;         ///< inactive mean on the oriented scale
  double spread = 1.0;
  /// -1 shifts every active; k >= 0 shifts only actives of subgroup k.
  int signal_group = -1;
};

struct SyntheticSpec {
  std::string target_id = "SYN";
  std::size_t n_actives = 0;
  std::size_t n_inactives = 0;
  std::vector<SyntheticScorer> scorers;
  /// Uniform pairwise noise correlation, ignored when `correlation` is set.
  double noise_correlation = 0.0;
  std::vector<std::vector<double>> correlation;
  /// Actives are dealt round-robin into this many subgroups.
  std::size_t n_signal_groups = 1;
  std::uint64_t seed = 0;

  /// Throws ArgumentError for an invalid correlation structure, rates or
  /// spreads out of range, or an empty scorer list.
  void validate() const;
};

/// The six canonical scorers with docking-like ranges: AutoDock energies
/// around -7 kcal/mol, CNN scores around 0.35, NMDN around 0 with spread
/// 1000, DiffDock confidence around -1. Signal strengths all zero.
std::vector<SyntheticScorer> default_scorer_profile();

ScreenDataset generate_synthetic(const SyntheticSpec& spec);

/// Parses a synth spec file: top-level seed / correlation / scorers shared by
/// every entry of "targets". Per-target seeds default to a seed derived from
/// the top-level seed and the target's position.
std::vector<SyntheticSpec> parse_synthetic_specs(std::string_view json_text);
std::vector<SyntheticSpec> load_synthetic_specs(const std::filesystem::path& path);

struct BaselineEstimate {
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t trials = 0;
};

/// EF at x% under uniformly random orderings of n actives among N ligands.
BaselineEstimate random_baseline(std::size_t n_total, std::size_t n_actives, double x_pct,
                                 std::size_t trials, std::uint64_t seed);

}  // namespace vscreen::synth
