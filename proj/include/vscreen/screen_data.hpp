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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vscreen {

enum class Direction { HigherBetter, LowerBetter };
enum class Pathway { AutoDock, DiffDock, Shared };

std::string_view to_string(Direction d);
std::string_view to_string(Pathway p);
Direction parse_direction(std::string_view text);  // "higher" | "lower"
Pathway parse_pathway(std::string_view text);      // "autodock" | "diffdock" | "shared"

/// Identity, score direction and pathway of one scoring method. `column` is
/// the header name in score tables (defaults to the id).
struct ScorerSpec {
  std::string id;
  std::string column;
  Direction direction = Direction::HigherBetter;
  Pathway pathway = Pathway::Shared;

  bool operator==(const ScorerSpec&) const = default;
};

/// Canonical ids of the six scorers the builtin schemes and the default
/// feature recipe refer to.
namespace scorer {
inline constexpr std::string_view kAutoDock = "autodock";
inline constexpr std::string_view kDiffDock = "diffdock";
inline constexpr std::string_view kGninaAD = "gnina_ad";
inline constexpr std::string_view kGninaDD = "gnina_dd";
inline constexpr std::string_view kNmdnAD = "nmdn_ad";
inline constexpr std::string_view kNmdnDD = "nmdn_dd";
}  // namespace scorer

/// AutoDock energy is lower-better; DiffDock confidence, GNINA CNNaffinity
/// and NMDN pKd are higher-better.
std::vector<ScorerSpec> default_scorer_specs();

std::vector<ScorerSpec> parse_scorer_specs(std::string_view json_text);
std::vector<ScorerSpec> load_scorer_specs(const std::filesystem::path& path);
std::string scorer_specs_to_json(std::span<const ScorerSpec> specs);

/// One ligand of one target. `scores` is aligned with the owning dataset's
/// scorer list; nullopt marks a scorer that failed on this ligand.
struct ScoreRecord {
  std::string target_id;
  std::string ligand_id;
  int label = 0;
  std::vector<std::optional<double>> scores;
};

/// One target's labeled library. Immutable once constructed.
class ScreenDataset {
 public:
  ScreenDataset() = default;
  /// Throws ConfigError on duplicate scorer ids, DataError on duplicate
  /// ligand ids, labels outside {0,1}, score vectors of the wrong width, or
  /// records belonging to another target.
  ScreenDataset(std::string target_id, std::vector<ScorerSpec> scorers,
                std::vector<ScoreRecord> records);

  const std::string& target_id() const { return target_id_; }
  std::span<const ScorerSpec> scorers() const { return scorers_; }
  std::span<const ScoreRecord> records() const { return records_; }
  const ScoreRecord& record(std::size_t i) const { return records_[i]; }

  std::size_t n_total() const { return records_.size(); }
  std::size_t n_actives() const { return n_actives_; }
  std::size_t n_inactives() const { return records_.size() - n_actives_; }

  std::optional<std::size_t> find_scorer(std::string_view id) const;
  /// Throws ConfigError naming the scorer if it is not part of the dataset.
  std::size_t scorer_index(std::string_view id) const;

  /// Score re-expressed so larger is better, whatever the stored direction.
  std::optional<double> oriented_score(std::size_t record, std::size_t scorer) const;

  bool is_oriented() const;

  /// Records at `indices` (kept in the given order), same scorers.
  ScreenDataset subset(std::span<const std::size_t> indices) const;

 private:
  std::string target_id_;
  std::vector<ScorerSpec> scorers_;
  std::vector<ScoreRecord> records_;
  std::size_t n_actives_ = 0;
};

/// Reads a comma-separated score table with columns target_id, ligand_id,
/// label and one column per scorer spec. Returns one dataset per target,
/// sorted by target id; record order within a target follows the file.
std::vector<ScreenDataset> load_score_tables(const std::filesystem::path& path,
                                             std::span<const ScorerSpec> specs);
std::vector<ScreenDataset> parse_score_tables(std::string_view text,
                                              std::span<const ScorerSpec> specs);

/// As load_score_tables but the file must hold exactly one target.
ScreenDataset load_score_table(const std::filesystem::path& path,
                               std::span<const ScorerSpec> specs);

/// Inverse of parse_score_tables: header then one row per record, scores in
/// shortest round-trip decimal, empty cell for a missing score.
std::string format_score_tables(std::span<const ScreenDataset> datasets);

/// LowerBetter scores negated, every direction set to HigherBetter.
ScreenDataset orient_scores(const ScreenDataset& ds);

/// Keeps every active and round-half-up(fraction * n_inactives) inactives
/// drawn uniformly without replacement; retained records keep file order.
ScreenDataset subsample_inactives(const ScreenDataset& ds, double fraction,
                                  std::uint64_t seed);

struct MissingCount {
  std::string scorer_id;
  std::size_t missing = 0;
};

struct ValidationReport {
  std::string target_id;
  std::size_t n_total = 0;
  std::size_t n_actives = 0;
  std::size_t n_inactives = 0;
  std::vector<MissingCount> missing;
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

ValidationReport validate_dataset(const ScreenDataset& ds);

}  // namespace vscreen
