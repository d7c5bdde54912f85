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
#include <cctype>

#include <json.hpp>

#include "vscreen/csv.hpp"
#include "vscreen/error.hpp"
#include "vscreen/rank_engine.hpp"

namespace vscreen {

namespace {

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

struct PathwayScorers {
  std::string_view baseline;
  std::string_view gnina;
  std::string_view nmdn;
};

PathwayScorers scorers_of(PathwaySelection p) {
  if (p == PathwaySelection::AutoDock) {
    return {scorer::kAutoDock, scorer::kGninaAD, scorer::kNmdnAD};
  }
  return {scorer::kDiffDock, scorer::kGninaDD, scorer::kNmdnDD};
}

// NMDN / CNN cutoffs of the three filter strengths.
struct Cutoffs {
  double nmdn;
  double cnn;
};
constexpr Cutoffs kMedium{-800.0, 0.1};
constexpr Cutoffs kStrong{900.0, 0.6};
constexpr Cutoffs kWeak{-4000.0, 0.0};

std::vector<Threshold> thresholds_for(const PathwayScorers& ps, Cutoffs c) {
  return {{std::string(ps.nmdn), c.nmdn}, {std::string(ps.gnina), c.cnn}};
}

ConsensusSpec single_pathway(std::string name, PathwaySelection p, Cutoffs cut,
                             double gnina_weight) {
  const auto ps = scorers_of(p);
  ConsensusSpec spec;
  spec.name = std::move(name);
  spec.pathway = std::string(to_string(p));
  spec.filter = FilterSpec::all_of(spec.name, thresholds_for(ps, cut));
  spec.members = {{std::string(ps.baseline), 1.0},
                  {std::string(ps.gnina), gnina_weight},
                  {std::string(ps.nmdn), 1.0}};
  return spec;
}

}  // namespace

PathwaySelection parse_pathway_selection(std::string_view text) {
  const auto t = lower(text);
  if (t == "autodock") return PathwaySelection::AutoDock;
  if (t == "diffdock") return PathwaySelection::DiffDock;
  if (t == "both" || t == "global") return PathwaySelection::Both;
  throw ArgumentError("unknown pathway '" + std::string(text) +
                      "' (expected autodock|diffdock|both)");
}

std::string_view to_string(PathwaySelection p) {
  switch (p) {
    case PathwaySelection::AutoDock:
      return "autodock";
    case PathwaySelection::DiffDock:
      return "diffdock";
    case PathwaySelection::Both:
      break;
  }
  return "global";
}

std::vector<std::string> builtin_scheme_names() {
  return {"CC-Medium", "UC-Strong", "CC-Weak", "Global"};
}

ConsensusSpec builtin_consensus(std::string_view name, PathwaySelection pathway) {
  const auto key = lower(name);
  const bool single = pathway != PathwaySelection::Both;
  if (key == "global") {
    if (single) throw ArgumentError("the Global scheme merges both pathways");
    const auto ad = scorers_of(PathwaySelection::AutoDock);
    const auto dd = scorers_of(PathwaySelection::DiffDock);
    ConsensusSpec spec;
    spec.name = "Global";
    spec.pathway = "global";
    spec.filter.name = "Global";
    spec.filter.alternatives = {thresholds_for(ad, kMedium), thresholds_for(dd, kMedium)};
    spec.members = {{std::string(ad.baseline), 1.0}, {std::string(dd.baseline), 1.0},
                    {std::string(ad.gnina), 2.0},    {std::string(dd.gnina), 2.0},
                    {std::string(ad.nmdn), 1.0},     {std::string(dd.nmdn), 1.0}};
    return spec;
  }
  if (key != "cc-medium" && key != "uc-strong" && key != "cc-weak") {
    throw ArgumentError("unknown consensus scheme '" + std::string(name) + "'");
  }
  if (!single) {
    throw ArgumentError("scheme " + std::string(name) + " needs a single pathway");
  }
  if (key == "cc-medium") return single_pathway("CC-Medium", pathway, kMedium, 2.0);
  if (key == "uc-strong") return single_pathway("UC-Strong", pathway, kStrong, 1.0);
  return single_pathway("CC-Weak", pathway, kWeak, 2.0);
}

namespace {

nlohmann::json thresholds_json(const std::vector<Threshold>& ts) {
  auto arr = nlohmann::json::array();
  for (const auto& t : ts) arr.push_back({{"scorer", t.scorer_id}, {"min", t.min}});
  return arr;
}

std::vector<Threshold> parse_thresholds(const nlohmann::json& arr) {
  if (!arr.is_array()) throw ConfigError("consensus filters must be a list");
  std::vector<Threshold> out;
  for (const auto& item : arr) {
    if (!item.contains("scorer") || !item.contains("min") || !item.at("min").is_number()) {
      throw ConfigError("filter entries need 'scorer' and numeric 'min'");
    }
    out.push_back({item.at("scorer").get<std::string>(), item.at("min").get<double>()});
  }
  return out;
}

}  // namespace

std::string consensus_spec_to_json(const ConsensusSpec& spec) {
  nlohmann::json doc;
  doc["name"] = spec.name;
  doc["pathway"] = spec.pathway;
  if (spec.filter.alternatives.size() <= 1) {
    doc["filters"] = spec.filter.alternatives.empty()
                         ? nlohmann::json::array()
                         : thresholds_json(spec.filter.alternatives.front());
  } else {
    auto any = nlohmann::json::array();
    for (const auto& alt : spec.filter.alternatives) any.push_back(thresholds_json(alt));
    doc["filters_any"] = any;
  }
  auto weights = nlohmann::json::array();
  for (const auto& m : spec.members) weights.push_back({{"scorer", m.scorer_id}, {"w", m.weight}});
  doc["weights"] = weights;
  return doc.dump(2) + "\n";
}

ConsensusSpec parse_consensus_spec(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("consensus spec is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("name") || !doc.contains("weights")) {
    throw ConfigError("consensus spec needs 'name' and 'weights'");
  }
  ConsensusSpec spec;
  spec.name = doc.at("name").get<std::string>();
  spec.pathway = doc.value("pathway", std::string("custom"));
  spec.filter.name = spec.name;
  if (doc.contains("filters_any")) {
    for (const auto& alt : doc.at("filters_any")) {
      spec.filter.alternatives.push_back(parse_thresholds(alt));
    }
  } else if (doc.contains("filters")) {
    auto ts = parse_thresholds(doc.at("filters"));
    if (!ts.empty()) spec.filter.alternatives.push_back(std::move(ts));
  }
  const auto& weights = doc.at("weights");
  if (!weights.is_array()) throw ConfigError("consensus 'weights' must be a list");
  for (const auto& item : weights) {
    if (!item.contains("scorer") || !item.contains("w") || !item.at("w").is_number()) {
      throw ConfigError("weight entries need 'scorer' and numeric 'w'");
    }
    spec.members.push_back({item.at("scorer").get<std::string>(), item.at("w").get<double>()});
  }
  spec.validate();
  return spec;
}

ConsensusSpec load_consensus_spec(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const DataError&) {
    throw ConfigError("cannot open consensus spec file: " + path.string());
  }
  return parse_consensus_spec(text);
}

}  // namespace vscreen
