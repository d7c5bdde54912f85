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
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "vscreen/csv.hpp"
#include "vscreen/error.hpp"
#include "vscreen/numfmt.hpp"
#include "vscreen/screen_data.hpp"

namespace vscreen {

std::string_view to_string(Direction d) {
  return d == Direction::HigherBetter ? "higher" : "lower";
}

std::string_view to_string(Pathway p) {
  switch (p) {
    case Pathway::AutoDock:
      return "autodock";
    case Pathway::DiffDock:
      return "diffdock";
    case Pathway::Shared:
      break;
  }
  return "shared";
}

Direction parse_direction(std::string_view text) {
  if (text == "higher") return Direction::HigherBetter;
  if (text == "lower") return Direction::LowerBetter;
  throw ConfigError("unknown score direction '" + std::string(text) +
                    "' (expected higher|lower)");
}

Pathway parse_pathway(std::string_view text) {
  if (text == "autodock") return Pathway::AutoDock;
  if (text == "diffdock") return Pathway::DiffDock;
  if (text == "shared") return Pathway::Shared;
  throw ConfigError("unknown pathway '" + std::string(text) +
                    "' (expected autodock|diffdock|shared)");
}

std::vector<ScorerSpec> default_scorer_specs() {
  auto make = [](std::string_view id, Direction d, Pathway p) {
    return ScorerSpec{std::string(id), std::string(id), d, p};
  };
  return {
      make(scorer::kAutoDock, Direction::LowerBetter, Pathway::AutoDock),
      make(scorer::kGninaAD, Direction::HigherBetter, Pathway::AutoDock),
      make(scorer::kNmdnAD, Direction::HigherBetter, Pathway::AutoDock),
      make(scorer::kDiffDock, Direction::HigherBetter, Pathway::DiffDock),
      make(scorer::kGninaDD, Direction::HigherBetter, Pathway::DiffDock),
      make(scorer::kNmdnDD, Direction::HigherBetter, Pathway::DiffDock),
  };
}

std::vector<ScorerSpec> parse_scorer_specs(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("scorer spec is not valid JSON: ") + e.what());
  }
  const nlohmann::json* list = &doc;
  if (doc.is_object()) {
    if (!doc.contains("scorers")) throw ConfigError("scorer spec lacks 'scorers' list");
    list = &doc.at("scorers");
  }
  if (!list->is_array()) throw ConfigError("scorer spec 'scorers' must be a list");

  std::vector<ScorerSpec> specs;
  std::unordered_set<std::string> seen;
  for (const auto& item : *list) {
    if (!item.is_object() || (!item.contains("scorer_id") && !item.contains("id"))) {
      throw ConfigError("scorer entry needs a 'scorer_id'");
    }
    ScorerSpec spec;
    spec.id = item.contains("scorer_id") ? item.at("scorer_id").get<std::string>()
                                         : item.at("id").get<std::string>();
    spec.column = item.value("column", spec.id);
    if (!item.contains("direction")) {
      throw ConfigError("scorer '" + spec.id + "' has no direction");
    }
    spec.direction = parse_direction(item.at("direction").get<std::string>());
    spec.pathway = parse_pathway(item.value("pathway", std::string("shared")));
    if (!seen.insert(spec.id).second) {
      throw ConfigError("duplicate scorer_id '" + spec.id + "'");
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

std::vector<ScorerSpec> load_scorer_specs(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const DataError&) {
    throw ConfigError("cannot open scorer spec file: " + path.string());
  }
  return parse_scorer_specs(text);
}

std::string scorer_specs_to_json(std::span<const ScorerSpec> specs) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& s : specs) {
    list.push_back({{"scorer_id", s.id},
                    {"column", s.column},
                    {"direction", std::string(to_string(s.direction))},
                    {"pathway", std::string(to_string(s.pathway))}});
  }
  return nlohmann::json{{"scorers", list}}.dump(2) + "\n";
}

ScreenDataset::ScreenDataset(std::string target_id, std::vector<ScorerSpec> scorers,
                             std::vector<ScoreRecord> records)
    : target_id_(std::move(target_id)),
      scorers_(std::move(scorers)),
      records_(std::move(records)) {
  std::unordered_set<std::string> scorer_ids;
  for (const auto& s : scorers_) {
    if (!scorer_ids.insert(s.id).second) {
      throw ConfigError("duplicate scorer_id '" + s.id + "'");
    }
  }
  std::unordered_set<std::string> ligands;
  for (const auto& r : records_) {
    if (r.target_id != target_id_) {
      throw DataError("record " + r.ligand_id + " belongs to target " + r.target_id +
                      ", not " + target_id_);
    }
    if (r.label != 0 && r.label != 1) {
      throw DataError("label of ligand " + r.ligand_id + " is not 0 or 1");
    }
    if (r.scores.size() != scorers_.size()) {
      throw DataError("ligand " + r.ligand_id + " has a score vector of the wrong width");
    }
    if (!ligands.insert(r.ligand_id).second) {
      throw DataError("duplicate ligand_id " + r.ligand_id + " in target " + target_id_);
    }
    n_actives_ += static_cast<std::size_t>(r.label);
  }
}

std::optional<std::size_t> ScreenDataset::find_scorer(std::string_view id) const {
  for (std::size_t i = 0; i < scorers_.size(); ++i) {
    if (scorers_[i].id == id) return i;
  }
  return std::nullopt;
}

std::size_t ScreenDataset::scorer_index(std::string_view id) const {
  if (auto i = find_scorer(id)) return *i;
  throw ConfigError("unknown scorer '" + std::string(id) + "' for target " + target_id_);
}

std::optional<double> ScreenDataset::oriented_score(std::size_t record,
                                                    std::size_t scorer) const {
  const auto& v = records_[record].scores[scorer];
  if (!v) return std::nullopt;
  if (scorers_[scorer].direction == Direction::HigherBetter) return *v;
  return *v == 0.0 ? 0.0 : -*v;
}

bool ScreenDataset::is_oriented() const {
  return std::all_of(scorers_.begin(), scorers_.end(), [](const ScorerSpec& s) {
    return s.direction == Direction::HigherBetter;
  });
}

ScreenDataset ScreenDataset::subset(std::span<const std::size_t> indices) const {
  std::vector<ScoreRecord> picked;
  picked.reserve(indices.size());
  for (std::size_t i : indices) picked.push_back(records_.at(i));
  return ScreenDataset(target_id_, scorers_, std::move(picked));
}

namespace {

std::size_t find_column(const std::vector<std::string>& header, std::string_view name,
                        std::string_view alias = {}) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto h = trim(header[i]);
    if (h == name || (!alias.empty() && h == alias)) return i;
  }
  throw DataError("score table is missing required column '" + std::string(name) + "'");
}

}  // namespace

std::vector<ScreenDataset> parse_score_tables(std::string_view text,
                                              std::span<const ScorerSpec> specs) {
  std::vector<std::string> lines;
  {
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(std::move(line));
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
  }
  if (lines.empty()) throw DataError("score table is empty (no header row)");

  std::string_view header_line = lines.front();
  if (header_line.starts_with("\xEF\xBB\xBF")) header_line.remove_prefix(3);
  const auto header = split_csv_line(header_line);
  const std::size_t col_target = find_column(header, "target_id", "target");
  const std::size_t col_ligand = find_column(header, "ligand_id", "ligand");
  const std::size_t col_label = find_column(header, "label");
  std::vector<std::size_t> col_scores;
  for (const auto& s : specs) col_scores.push_back(find_column(header, s.column));

  std::map<std::string, std::vector<ScoreRecord>> by_target;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::size_t row = li;  // 1-based data row
    if (trim(lines[li]).empty()) continue;
    const auto cells = split_csv_line(lines[li]);
    if (cells.size() != header.size()) {
      throw ParseError("row " + std::to_string(row) + ": expected " +
                           std::to_string(header.size()) + " cells, found " +
                           std::to_string(cells.size()),
                       row);
    }
    ScoreRecord rec;
    rec.target_id = std::string(trim(cells[col_target]));
    rec.ligand_id = std::string(trim(cells[col_ligand]));
    if (rec.target_id.empty() || rec.ligand_id.empty()) {
      throw ParseError("row " + std::to_string(row) + ": empty target_id or ligand_id", row);
    }
    const auto label = trim(cells[col_label]);
    if (label == "1") {
      rec.label = 1;
    } else if (label == "0") {
      rec.label = 0;
    } else {
      throw ParseError("row " + std::to_string(row) + ": label '" + std::string(label) +
                           "' is not 0 or 1",
                       row);
    }
    rec.scores.reserve(specs.size());
    for (std::size_t s = 0; s < specs.size(); ++s) {
      const auto cell = trim(cells[col_scores[s]]);
      if (cell.empty()) {
        rec.scores.emplace_back(std::nullopt);
        continue;
      }
      auto value = parse_real(cell);
      if (!value) {
        throw ParseError("row " + std::to_string(row) + ": non-numeric " + specs[s].column +
                             " score '" + std::string(cell) + "'",
                         row);
      }
      rec.scores.emplace_back(*value);
    }
    by_target[rec.target_id].push_back(std::move(rec));
  }

  std::vector<ScorerSpec> spec_copy(specs.begin(), specs.end());
  std::vector<ScreenDataset> out;
  for (auto& [target, records] : by_target) {
    out.emplace_back(target, spec_copy, std::move(records));
  }
  return out;
}

std::vector<ScreenDataset> load_score_tables(const std::filesystem::path& path,
                                             std::span<const ScorerSpec> specs) {
  return parse_score_tables(read_text_file(path), specs);
}

ScreenDataset load_score_table(const std::filesystem::path& path,
                               std::span<const ScorerSpec> specs) {
  auto all = load_score_tables(path, specs);
  if (all.size() != 1) {
    throw DataError(path.string() + " holds " + std::to_string(all.size()) +
                    " targets; expected exactly one");
  }
  return std::move(all.front());
}

std::string format_score_tables(std::span<const ScreenDataset> datasets) {
  std::string out;
  if (datasets.empty()) return out;
  std::vector<std::string> header{"target_id", "ligand_id", "label"};
  for (const auto& s : datasets.front().scorers()) header.push_back(s.column);
  out += join_csv(header) + "\n";
  for (const auto& ds : datasets) {
    if (ds.scorers().size() + 3 != header.size()) {
      throw DataError("datasets with different scorer sets cannot share a table");
    }
    for (const auto& r : ds.records()) {
      std::vector<std::string> row{r.target_id, r.ligand_id, std::to_string(r.label)};
      for (const auto& v : r.scores) row.push_back(v ? format_real(*v) : std::string());
      out += join_csv(row) + "\n";
    }
  }
  return out;
}

}  // namespace vscreen
