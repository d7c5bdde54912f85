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

#include "vscreen/ml/features.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <set>

#include <json.hpp>

#include "vscreen/csv.hpp"
#include "vscreen/error.hpp"
#include "vscreen/numfmt.hpp"

namespace vscreen::ml {

namespace {

struct KindName {
  FeatureKind kind;
  std::string_view name;
};

constexpr std::array<KindName, 13> kKindNames{{
    {FeatureKind::Score, "score"},
    {FeatureKind::Percentile, "percentile"},
    {FeatureKind::ConsensusPercentile, "consensus_percentile"},
    {FeatureKind::PercentileMean, "percentile_mean"},
    {FeatureKind::PercentileStd, "percentile_std"},
    {FeatureKind::SignedLog, "signed_log"},
    {FeatureKind::Square, "square"},
    {FeatureKind::Product, "product"},
    {FeatureKind::PercentileDiff, "percentile_diff"},
    {FeatureKind::PercentileMin, "percentile_min"},
    {FeatureKind::PercentileMax, "percentile_max"},
    {FeatureKind::PercentileMedian, "percentile_median"},
    {FeatureKind::PercentileRange, "percentile_range"},
}};

// {min, max} operand count; max 0 = unbounded.
std::pair<std::size_t, std::size_t> arity(FeatureKind k) {
  switch (k) {
    case FeatureKind::Score:
    case FeatureKind::Percentile:
    case FeatureKind::ConsensusPercentile:
    case FeatureKind::SignedLog:
    case FeatureKind::Square:
      return {1, 1};
    case FeatureKind::Product:
    case FeatureKind::PercentileDiff:
      return {2, 2};
    default:
      return {1, 0};
  }
}

}  // namespace

std::string_view to_string(FeatureKind k) {
  for (const auto& kn : kKindNames) {
    if (kn.kind == k) return kn.name;
  }
  return "?";
}

FeatureKind parse_feature_kind(std::string_view text) {
  for (const auto& kn : kKindNames) {
    if (kn.name == text) return kn.kind;
  }
  throw ConfigError("unknown feature kind '" + std::string(text) + "'");
}

void FeatureRecipe::validate() const {
  if (features.empty()) throw ConfigError("feature recipe is empty");
  if (n_primary > features.size()) throw ConfigError("n_primary exceeds the recipe width");
  std::set<std::string> seen;
  for (const auto& f : features) {
    if (f.name.empty()) throw ConfigError("feature with an empty name");
    if (!seen.insert(f.name).second) throw ConfigError("duplicate feature name '" + f.name + "'");
    const auto [lo, hi] = arity(f.kind);
    if (f.operands.size() < lo || (hi != 0 && f.operands.size() > hi)) {
      throw ConfigError("feature '" + f.name + "' has the wrong number of operands for kind " +
                        std::string(to_string(f.kind)));
    }
  }
}

FeatureRecipe default_recipe() {
  const std::vector<std::string> scorers{
      std::string(scorer::kAutoDock), std::string(scorer::kGninaAD), std::string(scorer::kNmdnAD),
      std::string(scorer::kDiffDock), std::string(scorer::kGninaDD), std::string(scorer::kNmdnDD)};
  const std::vector<std::string> rescorers{
      std::string(scorer::kGninaAD), std::string(scorer::kGninaDD), std::string(scorer::kNmdnAD),
      std::string(scorer::kNmdnDD)};

  FeatureRecipe r;
  auto add = [&](std::string name, FeatureKind kind, std::vector<std::string> ops) {
    r.features.push_back({std::move(name), kind, std::move(ops)});
  };
  for (const auto& s : scorers) add("score_" + s, FeatureKind::Score, {s});
  for (const auto& s : scorers) add("pct_" + s, FeatureKind::Percentile, {s});
  for (auto key : {kConsensusAutoDock, kConsensusDiffDock, kConsensusGlobal}) {
    add("pct_" + std::string(key), FeatureKind::ConsensusPercentile, {std::string(key)});
  }
  add("pct_mean", FeatureKind::PercentileMean, scorers);
  add("pct_std", FeatureKind::PercentileStd, scorers);
  r.n_primary = r.features.size();

  for (const auto& s : scorers) add("slog_" + s, FeatureKind::SignedLog, {s});
  for (const auto& s : scorers) add("sq_" + s, FeatureKind::Square, {s});
  for (std::size_t i = 0; i < rescorers.size(); ++i) {
    for (std::size_t j = i + 1; j < rescorers.size(); ++j) {
      add("prod_" + rescorers[i] + "_x_" + rescorers[j], FeatureKind::Product,
          {rescorers[i], rescorers[j]});
    }
  }
  add("pctdiff_gnina", FeatureKind::PercentileDiff,
      {std::string(scorer::kGninaAD), std::string(scorer::kGninaDD)});
  add("pctdiff_nmdn", FeatureKind::PercentileDiff,
      {std::string(scorer::kNmdnAD), std::string(scorer::kNmdnDD)});
  add("pctdiff_docking", FeatureKind::PercentileDiff,
      {std::string(scorer::kAutoDock), std::string(scorer::kDiffDock)});
  add("pct_min", FeatureKind::PercentileMin, scorers);
  add("pct_max", FeatureKind::PercentileMax, scorers);
  add("pct_median", FeatureKind::PercentileMedian, scorers);
  add("pct_range", FeatureKind::PercentileRange, scorers);
  return r;
}

std::string recipe_to_json(const FeatureRecipe& recipe) {
  nlohmann::ordered_json doc;
  doc["version"] = recipe.version;
  doc["n_primary"] = recipe.n_primary;
  doc["features"] = nlohmann::ordered_json::array();
  for (const auto& f : recipe.features) {
    nlohmann::ordered_json item;
    item["name"] = f.name;
    item["kind"] = std::string(to_string(f.kind));
    item["operands"] = f.operands;
    doc["features"].push_back(std::move(item));
  }
  return doc.dump(2) + "\n";
}

FeatureRecipe parse_recipe(std::string_view json_text) {
  FeatureRecipe r;
  try {
    const auto doc = nlohmann::json::parse(json_text);
    r.version = doc.value("version", 1);
    if (r.version != 1) {
      throw ConfigError("unsupported feature recipe version " + std::to_string(r.version));
    }
    for (const auto& item : doc.at("features")) {
      FeatureDef f;
      f.name = item.at("name").get<std::string>();
      f.kind = parse_feature_kind(item.at("kind").get<std::string>());
      f.operands = item.at("operands").get<std::vector<std::string>>();
      r.features.push_back(std::move(f));
    }
    r.n_primary = doc.value("n_primary", r.features.size());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed feature recipe: ") + e.what());
  }
  r.validate();
  return r;
}

FeatureRecipe load_recipe(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const DataError&) {
    throw ConfigError("cannot open feature recipe: " + path.string());
  }
  return parse_recipe(text);
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> rows) const {
  FeatureMatrix out;
  out.names = names;
  out.values.resize(static_cast<Eigen::Index>(rows.size()), values.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = rows[i];
    if (r >= this->rows()) throw ArgumentError("row index out of range");
    out.values.row(static_cast<Eigen::Index>(i)) = values.row(static_cast<Eigen::Index>(r));
    out.target_ids.push_back(target_ids[r]);
    out.ligand_ids.push_back(ligand_ids[r]);
    out.labels.push_back(labels[r]);
    out.missing_counts.push_back(missing_counts[r]);
  }
  return out;
}

FeatureMatrix FeatureMatrix::concat(std::span<const FeatureMatrix> parts) {
  FeatureMatrix out;
  if (parts.empty()) return out;
  out.names = parts.front().names;
  Eigen::Index total = 0;
  for (const auto& p : parts) {
    if (p.names != out.names) throw ShapeError("feature matrices have different columns");
    total += p.values.rows();
  }
  out.values.resize(total, static_cast<Eigen::Index>(out.names.size()));
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    out.values.middleRows(at, p.values.rows()) = p.values;
    at += p.values.rows();
    out.target_ids.insert(out.target_ids.end(), p.target_ids.begin(), p.target_ids.end());
    out.ligand_ids.insert(out.ligand_ids.end(), p.ligand_ids.begin(), p.ligand_ids.end());
    out.labels.insert(out.labels.end(), p.labels.begin(), p.labels.end());
    out.missing_counts.insert(out.missing_counts.end(), p.missing_counts.begin(),
                              p.missing_counts.end());
  }
  return out;
}

namespace {

// Per-scorer columns with missing values already imputed.
struct ScorerColumns {
  std::vector<double> score;
  std::vector<double> percentile;
};

ScorerColumns scorer_columns(const ScreenDataset& ds, const RankTable& table) {
  const std::size_t n = ds.n_total();
  const std::size_t s = ds.scorer_index(table.scorer_id);
  if (table.n_ranked() != n) {
    throw ArgumentError("rank table for " + table.scorer_id + " does not cover the library");
  }
  double worst = std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t i = 0; i < n; ++i) {
    if (auto v = ds.oriented_score(i, s)) {
      worst = std::min(worst, *v);
      any = true;
    }
  }
  if (!any) worst = 0.0;

  ScorerColumns c;
  c.score.resize(n);
  c.percentile.resize(n);
  const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = ds.oriented_score(i, s);
    c.score[i] = v ? *v : worst;
    c.percentile[i] = v ? static_cast<double>(table.ranks[i] - 1) / denom : 1.0;
  }
  return c;
}

std::vector<double> consensus_percentiles(const ScreenDataset& ds, const ConsensusRanking& r) {
  const std::size_t n = ds.n_total();
  if (r.retained.size() + r.excluded.size() != n) {
    throw ArgumentError("consensus ranking " + r.spec_name + " does not cover the library");
  }
  std::vector<double> out(n, 1.0);
  const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
  std::size_t pos = 0;
  for (const auto* part : {&r.retained, &r.excluded}) {
    for (const auto& e : *part) out[e.record] = static_cast<double>(pos++) / denom;
  }
  return out;
}

double signed_log(double v) { return std::copysign(std::log1p(std::abs(v)), v); }

double middle(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : (v[m - 1] + v[m]) / 2.0;
}

}  // namespace

FeatureMatrix build_features(const ScreenDataset& ds, std::span<const RankTable> tables,
                             const std::map<std::string, ConsensusRanking>& consensus,
                             const FeatureRecipe& recipe) {
  recipe.validate();
  const std::size_t n = ds.n_total();

  std::map<std::string, ScorerColumns> cols;
  std::map<std::string, std::vector<double>> cons;
  auto scorer = [&](const std::string& id) -> const ScorerColumns& {
    auto it = cols.find(id);
    if (it != cols.end()) return it->second;
    if (!ds.find_scorer(id)) {
      throw ConfigError("feature recipe references unavailable scorer '" + id + "'");
    }
    const auto t = std::find_if(tables.begin(), tables.end(),
                                [&](const RankTable& rt) { return rt.scorer_id == id; });
    if (t == tables.end()) throw ConfigError("no rank table for scorer '" + id + "'");
    return cols.emplace(id, scorer_columns(ds, *t)).first->second;
  };
  auto consensus_col = [&](const std::string& key) -> const std::vector<double>& {
    auto it = cons.find(key);
    if (it != cons.end()) return it->second;
    const auto c = consensus.find(key);
    if (c == consensus.end()) {
      throw ConfigError("feature recipe references unavailable consensus ranking '" + key + "'");
    }
    return cons.emplace(key, consensus_percentiles(ds, c->second)).first->second;
  };

  // Resolve every operand first so an unknown scorer fails before any work.
  for (const auto& f : recipe.features) {
    for (const auto& op : f.operands) {
      if (f.kind == FeatureKind::ConsensusPercentile) {
        consensus_col(op);
      } else {
        scorer(op);
      }
    }
  }

  FeatureMatrix m;
  m.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(recipe.width()));
  for (const auto& f : recipe.features) m.names.push_back(f.name);

  std::vector<double> pcts;
  for (std::size_t j = 0; j < recipe.width(); ++j) {
    const auto& f = recipe.features[j];
    const auto col = static_cast<Eigen::Index>(j);
    for (std::size_t i = 0; i < n; ++i) {
      const auto row = static_cast<Eigen::Index>(i);
      double v = 0.0;
      switch (f.kind) {
        case FeatureKind::Score:
          v = scorer(f.operands[0]).score[i];
          break;
        case FeatureKind::Percentile:
          v = scorer(f.operands[0]).percentile[i];
          break;
        case FeatureKind::ConsensusPercentile:
          v = consensus_col(f.operands[0])[i];
          break;
        case FeatureKind::SignedLog:
          v = signed_log(scorer(f.operands[0]).score[i]);
          break;
        case FeatureKind::Square: {
          const double s = scorer(f.operands[0]).score[i];
          v = s * s;
          break;
        }
        case FeatureKind::Product:
          v = scorer(f.operands[0]).score[i] * scorer(f.operands[1]).score[i];
          break;
        case FeatureKind::PercentileDiff:
          v = scorer(f.operands[0]).percentile[i] - scorer(f.operands[1]).percentile[i];
          break;
        default: {
          pcts.clear();
          for (const auto& op : f.operands) pcts.push_back(scorer(op).percentile[i]);
          const auto [lo, hi] = std::minmax_element(pcts.begin(), pcts.end());
          double mean = 0.0;
          for (double p : pcts) mean += p;
          mean /= static_cast<double>(pcts.size());
          switch (f.kind) {
            case FeatureKind::PercentileMean:
              v = mean;
              break;
            case FeatureKind::PercentileStd: {
              double ss = 0.0;
              for (double p : pcts) ss += (p - mean) * (p - mean);
              v = std::sqrt(ss / static_cast<double>(pcts.size()));
              break;
            }
            case FeatureKind::PercentileMin:
              v = *lo;
              break;
            case FeatureKind::PercentileMax:
              v = *hi;
              break;
            case FeatureKind::PercentileMedian:
              v = middle(pcts);
              break;
            case FeatureKind::PercentileRange:
              v = *hi - *lo;
              break;
            default:
              break;
          }
        }
      }
      m.values(row, col) = v;
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    const auto& rec = ds.record(i);
    m.target_ids.push_back(rec.target_id);
    m.ligand_ids.push_back(rec.ligand_id);
    m.labels.push_back(rec.label);
    m.missing_counts.push_back(static_cast<std::size_t>(
        std::count_if(rec.scores.begin(), rec.scores.end(), [](const auto& s) { return !s; })));
  }
  return m;
}

FeatureMatrix build_features(const ScreenDataset& ds, const FeatureRecipe& recipe) {
  std::vector<RankTable> tables;
  for (const auto& s : ds.scorers()) tables.push_back(assign_ranks(ds, s.id));

  std::set<std::string> wanted;
  for (const auto& f : recipe.features) {
    if (f.kind == FeatureKind::ConsensusPercentile) wanted.insert(f.operands.at(0));
  }
  std::map<std::string, ConsensusRanking> consensus;
  for (const auto& key : wanted) {
    PathwaySelection path;
    if (key == kConsensusAutoDock) {
      path = PathwaySelection::AutoDock;
    } else if (key == kConsensusDiffDock) {
      path = PathwaySelection::DiffDock;
    } else if (key == kConsensusGlobal) {
      path = PathwaySelection::Both;
    } else {
      throw ConfigError("unknown consensus ranking '" + key + "'");
    }
    const auto spec = builtin_consensus(path == PathwaySelection::Both ? "Global" : "CC-Medium",
                                        path);
    const auto filter = apply_filter(ds, spec.filter);
    consensus.emplace(key, consensus_rank(ds, tables, spec, filter.retained));
  }
  return build_features(ds, tables, consensus, recipe);
}

std::string format_feature_matrix(const FeatureMatrix& m) {
  std::vector<std::string> header{"target_id", "ligand_id", "label"};
  header.insert(header.end(), m.names.begin(), m.names.end());
  std::string out = join_csv(header) + "\n";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    std::vector<std::string> row{m.target_ids[i], m.ligand_ids[i], std::to_string(m.labels[i])};
    for (Eigen::Index j = 0; j < m.values.cols(); ++j) {
      row.push_back(format_real(m.values(static_cast<Eigen::Index>(i), j)));
    }
    out += join_csv(row) + "\n";
  }
  return out;
}

}  // namespace vscreen::ml
