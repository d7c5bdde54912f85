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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vscreen/screen_data.hpp"

namespace vscreen {

/// Per-scorer ranks over a full target library (1 = best).
struct RankTable {
  std::string target_id;
  std::string scorer_id;
  std::vector<std::size_t> ranks;  ///< indexed by record
  std::vector<std::size_t> order;  ///< record indices, best first
  std::size_t n_scored = 0;        ///< records with a score; the rest rank last

  std::size_t n_ranked() const { return ranks.size(); }
};

/// Descending oriented score; exact ties by ascending ligand_id; ligands
/// without this score after every scored ligand, ordered by ligand_id.
RankTable assign_ranks(const ScreenDataset& ds, std::string_view scorer_id);

struct Threshold {
  std::string scorer_id;
  double min = 0.0;  ///< on the oriented scale

  bool operator==(const Threshold&) const = default;
};

/// A ligand passes when it meets every threshold of at least one
/// alternative. Single-pathway schemes have exactly one alternative; the
/// global scheme has one per pathway. No alternatives means no filtering.
struct FilterSpec {
  std::string name;
  std::vector<std::vector<Threshold>> alternatives;

  static FilterSpec all_of(std::string name, std::vector<Threshold> thresholds);
  bool empty() const { return alternatives.empty(); }
  bool operator==(const FilterSpec&) const = default;
};

struct ThresholdPass {
  std::string scorer_id;
  double min = 0.0;
  std::size_t passed = 0;
};

struct FilterResult {
  std::vector<bool> retained;  ///< indexed by record
  std::size_t n_retained = 0;
  std::vector<ThresholdPass> pass_counts;  ///< one per threshold, alternative order
};

/// A ligand missing a thresholded score fails that threshold.
FilterResult apply_filter(const ScreenDataset& ds, const FilterSpec& filter);

struct MemberWeight {
  std::string scorer_id;
  double weight = 1.0;

  bool operator==(const MemberWeight&) const = default;
};

struct ConsensusSpec {
  std::string name;
  std::string pathway = "custom";  ///< informational label
  FilterSpec filter;
  std::vector<MemberWeight> members;

  /// Throws ConfigError for negative/non-finite weights, an all-zero
  /// weight vector, duplicate members, or an empty member list.
  void validate() const;
  bool operator==(const ConsensusSpec&) const = default;
};

struct RankedEntry {
  std::size_t record = 0;
  std::string ligand_id;
  double average_rank = 0.0;
  int label = 0;
};

struct ConsensusRanking {
  std::string target_id;
  std::string spec_name;
  std::vector<RankedEntry> retained;  ///< ascending average rank, ties by ligand_id
  std::vector<RankedEntry> excluded;  ///< same order, filtered-out ligands
  std::size_t n_total = 0;
  std::size_t n_actives = 0;
  double actives_remaining_pct = 0.0;
};

/// Weighted average of full-library ranks for every ligand, then split into
/// retained/excluded by `retained`. `tables` must contain a table for each
/// member scorer over the same library.
ConsensusRanking consensus_rank(const ScreenDataset& ds, std::span<const RankTable> tables,
                                const ConsensusSpec& spec, const std::vector<bool>& retained);

/// assign_ranks for every member, apply_filter, consensus_rank.
ConsensusRanking run_consensus(const ScreenDataset& ds, const ConsensusSpec& spec);

/// ligand_id,average_rank,label,retained rows: retained ligands first, then
/// excluded ones, each in ranking order.
std::string format_ranking(const ConsensusRanking& ranking);

enum class PathwaySelection { AutoDock, DiffDock, Both };

PathwaySelection parse_pathway_selection(std::string_view text);
std::string_view to_string(PathwaySelection p);

/// Builtin schemes: "CC-Medium", "UC-Strong", "CC-Weak" for a single
/// pathway, "Global" for Both. Names are matched case-insensitively.
ConsensusSpec builtin_consensus(std::string_view name, PathwaySelection pathway);

/// Canonical display names of the builtins, in table order.
std::vector<std::string> builtin_scheme_names();

std::string consensus_spec_to_json(const ConsensusSpec& spec);
ConsensusSpec parse_consensus_spec(std::string_view json_text);
ConsensusSpec load_consensus_spec(const std::filesystem::path& path);

}  // namespace vscreen
