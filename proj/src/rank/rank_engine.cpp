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

#include "vscreen/rank_engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "vscreen/csv.hpp"
#include "vscreen/error.hpp"
#include "vscreen/numfmt.hpp"

namespace vscreen {

RankTable assign_ranks(const ScreenDataset& ds, std::string_view scorer_id) {
  const std::size_t s = ds.scorer_index(scorer_id);
  const std::size_t n = ds.n_total();

  std::vector<std::optional<double>> oriented(n);
  for (std::size_t i = 0; i < n; ++i) oriented[i] = ds.oriented_score(i, s);

  RankTable table;
  table.target_id = ds.target_id();
  table.scorer_id = std::string(scorer_id);
  table.order.resize(n);
  std::iota(table.order.begin(), table.order.end(), std::size_t{0});
  std::sort(table.order.begin(), table.order.end(), [&](std::size_t a, std::size_t b) {
    const auto& sa = oriented[a];
    const auto& sb = oriented[b];
    if (sa.has_value() != sb.has_value()) return sa.has_value();
    if (sa && *sa != *sb) return *sa > *sb;
    return ds.record(a).ligand_id < ds.record(b).ligand_id;
  });
  table.ranks.assign(n, 0);
  for (std::size_t pos = 0; pos < n; ++pos) table.ranks[table.order[pos]] = pos + 1;
  table.n_scored = static_cast<std::size_t>(
      std::count_if(oriented.begin(), oriented.end(), [](const auto& v) { return v.has_value(); }));
  return table;
}

FilterSpec FilterSpec::all_of(std::string name, std::vector<Threshold> thresholds) {
  FilterSpec f;
  f.name = std::move(name);
  if (!thresholds.empty()) f.alternatives.push_back(std::move(thresholds));
  return f;
}

FilterResult apply_filter(const ScreenDataset& ds, const FilterSpec& filter) {
  struct Resolved {
    std::size_t scorer;
    double min;
  };
  std::vector<std::vector<Resolved>> alts;
  FilterResult result;
  for (const auto& alt : filter.alternatives) {
    auto& resolved = alts.emplace_back();
    for (const auto& t : alt) {
      resolved.push_back({ds.scorer_index(t.scorer_id), t.min});
      result.pass_counts.push_back({t.scorer_id, t.min, 0});
    }
  }

  const std::size_t n = ds.n_total();
  result.retained.assign(n, alts.empty());
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t counter = 0;
    bool keep = alts.empty();
    for (const auto& alt : alts) {
      bool all = true;
      for (const auto& t : alt) {
        const auto v = ds.oriented_score(i, t.scorer);
        const bool pass = v.has_value() && *v >= t.min;
        result.pass_counts[counter++].passed += pass ? 1 : 0;
        all = all && pass;
      }
      keep = keep || all;
    }
    result.retained[i] = keep;
    result.n_retained += keep ? 1 : 0;
  }
  return result;
}

void ConsensusSpec::validate() const {
  if (members.empty()) throw ConfigError("consensus '" + name + "' has no members");
  std::unordered_set<std::string> seen;
  double total = 0.0;
  for (const auto& m : members) {
    if (!std::isfinite(m.weight) || m.weight < 0.0) {
      throw ConfigError("consensus '" + name + "': weight of " + m.scorer_id +
                        " must be finite and non-negative");
    }
    if (!seen.insert(m.scorer_id).second) {
      throw ConfigError("consensus '" + name + "': duplicate member " + m.scorer_id);
    }
    total += m.weight;
  }
  if (!(total > 0.0)) {
    throw ConfigError("consensus '" + name + "' needs at least one positive weight");
  }
}

ConsensusRanking consensus_rank(const ScreenDataset& ds, std::span<const RankTable> tables,
                                const ConsensusSpec& spec, const std::vector<bool>& retained) {
  spec.validate();
  const std::size_t n = ds.n_total();
  if (retained.size() != n) {
    throw ArgumentError("retained mask does not match library size");
  }

  std::vector<const RankTable*> member_tables;
  double weight_sum = 0.0;
  for (const auto& m : spec.members) {
    auto it = std::find_if(tables.begin(), tables.end(),
                           [&](const RankTable& t) { return t.scorer_id == m.scorer_id; });
    if (it == tables.end()) {
      throw ConfigError("consensus '" + spec.name + "': no rank table for " + m.scorer_id);
    }
    if (it->n_ranked() != n) {
      throw ConfigError("rank table for " + m.scorer_id + " covers a different library");
    }
    member_tables.push_back(&*it);
    weight_sum += m.weight;
  }

  ConsensusRanking out;
  out.target_id = ds.target_id();
  out.spec_name = spec.name;
  out.n_total = n;
  out.n_actives = ds.n_actives();

  std::size_t retained_actives = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < spec.members.size(); ++k) {
      acc += spec.members[k].weight * static_cast<double>(member_tables[k]->ranks[i]);
    }
    RankedEntry e{i, ds.record(i).ligand_id, acc / weight_sum, ds.record(i).label};
    if (retained[i]) {
      retained_actives += static_cast<std::size_t>(e.label);
      out.retained.push_back(std::move(e));
    } else {
      out.excluded.push_back(std::move(e));
    }
  }
  const auto by_rank = [](const RankedEntry& a, const RankedEntry& b) {
    if (a.average_rank != b.average_rank) return a.average_rank < b.average_rank;
    return a.ligand_id < b.ligand_id;
  };
  std::sort(out.retained.begin(), out.retained.end(), by_rank);
  std::sort(out.excluded.begin(), out.excluded.end(), by_rank);
  out.actives_remaining_pct =
      out.n_actives == 0 ? 0.0
                         : 100.0 * static_cast<double>(retained_actives) /
                               static_cast<double>(out.n_actives);
  return out;
}

ConsensusRanking run_consensus(const ScreenDataset& ds, const ConsensusSpec& spec) {
  spec.validate();
  std::vector<RankTable> tables;
  for (const auto& m : spec.members) tables.push_back(assign_ranks(ds, m.scorer_id));
  const auto filtered = apply_filter(ds, spec.filter);
  return consensus_rank(ds, tables, spec, filtered.retained);
}

std::string format_ranking(const ConsensusRanking& ranking) {
  std::string out = "ligand_id,average_rank,label,retained\n";
  const auto emit = [&](const RankedEntry& e, bool kept) {
    out += csv_field(e.ligand_id);
    out += ',';
    out += format_real(e.average_rank);
    out += e.label ? ",1," : ",0,";
    out += kept ? "1\n" : "0\n";
  };
  for (const auto& e : ranking.retained) emit(e, true);
  for (const auto& e : ranking.excluded) emit(e, false);
  return out;
}

}  // namespace vscreen
