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
#include <numeric>
#include <set>

#include <gtest/gtest.h>
#include <json.hpp>

#include "fixtures.hpp"
#include "vscreen/error.hpp"
#include "vscreen/rank_engine.hpp"
#include "vscreen/rng.hpp"

namespace vscreen {
namespace {

// A rank table over n ligands where record 0 sits at `rank`; the others
// fill the remaining places in record order.
RankTable table_with_rank(const std::string& scorer, std::size_t n, std::size_t rank) {
  RankTable t;
  t.target_id = "T";
  t.scorer_id = scorer;
  t.ranks.resize(n);
  t.ranks[0] = rank;
  std::size_t next = 1;
  for (std::size_t i = 1; i < n; ++i) {
    if (next == rank) ++next;
    t.ranks[i] = next++;
  }
  t.order.resize(n);
  for (std::size_t i = 0; i < n; ++i) t.order[t.ranks[i] - 1] = i;
  t.n_scored = n;
  return t;
}

ScreenDataset flat_library(std::size_t n) {
  std::vector<std::pair<std::string, int>> ligands;
  std::vector<std::vector<std::optional<double>>> scores;
  for (std::size_t i = 0; i < n; ++i) {
    ligands.emplace_back("L" + std::to_string(10000 + i), i % 50 == 0 ? 1 : 0);
    scores.push_back(std::vector<std::optional<double>>(6, 0.0));
  }
  return testing::make_dataset("T", ligands, scores);
}

TEST(Consensus, WeightedAverageOfRanks) {
  const auto ds = flat_library(1000);
  const std::vector<RankTable> tables{table_with_rank("gnina_ad", 1000, 15),
                                      table_with_rank("autodock", 1000, 76),
                                      table_with_rank("nmdn_ad", 1000, 939)};
  const std::vector<bool> keep(1000, true);
  ConsensusSpec plain{"plain", "autodock", {}, {{"gnina_ad", 1}, {"autodock", 1}, {"nmdn_ad", 1}}};
  ConsensusSpec heavy{"heavy", "autodock", {}, {{"gnina_ad", 2}, {"autodock", 1}, {"nmdn_ad", 1}}};
  auto rank_of_first = [&](const ConsensusSpec& s) {
    const auto r = consensus_rank(ds, tables, s, keep);
    return std::find_if(r.retained.begin(), r.retained.end(),
                        [](const RankedEntry& e) { return e.record == 0; })
        ->average_rank;
  };
  EXPECT_NEAR(rank_of_first(plain), 343.33, 0.01);
  EXPECT_NEAR(rank_of_first(heavy), 261.25, 1e-9);
}

TEST(Consensus, ScaleInvariantWeightsAndSingleMember) {
  const auto ds = flat_library(200);
  const std::vector<RankTable> tables{table_with_rank("gnina_ad", 200, 3),
                                      table_with_rank("autodock", 200, 120)};
  const std::vector<bool> keep(200, true);
  const auto a = consensus_rank(ds, tables, {"a", "x", {}, {{"gnina_ad", 2}, {"autodock", 1}}}, keep);
  const auto b = consensus_rank(ds, tables, {"b", "x", {}, {{"gnina_ad", 6}, {"autodock", 3}}}, keep);
  ASSERT_EQ(a.retained.size(), b.retained.size());
  for (std::size_t i = 0; i < a.retained.size(); ++i) {
    EXPECT_EQ(a.retained[i].record, b.retained[i].record);
    EXPECT_DOUBLE_EQ(a.retained[i].average_rank, b.retained[i].average_rank);
  }
  const auto solo = consensus_rank(ds, tables, {"s", "x", {}, {{"gnina_ad", 1}}}, keep);
  for (std::size_t i = 0; i < solo.retained.size(); ++i) {
    EXPECT_EQ(solo.retained[i].record, tables[0].order[i]);
  }
}

TEST(Consensus, InvalidWeights) {
  ConsensusSpec s{"bad", "x", {}, {{"gnina_ad", -1}}};
  EXPECT_THROW(s.validate(), ConfigError);
  s.members = {{"gnina_ad", 0}, {"autodock", 0}};
  EXPECT_THROW(s.validate(), ConfigError);
  s.members = {};
  EXPECT_THROW(s.validate(), ConfigError);
  s.members = {{"gnina_ad", 1}, {"gnina_ad", 1}};
  EXPECT_THROW(s.validate(), ConfigError);
}

TEST(AssignRanks, TiesByLigandIdMissingLast) {
  const auto ds = testing::make_dataset(
      "T", {{"c", 0}, {"a", 1}, {"b", 0}, {"d", 0}},
      {{-5.0, 1.0, 1.0, std::nullopt, 1.0, 1.0},
       {-5.0, 1.0, 1.0, 0.3, 1.0, 1.0},
       {-9.0, 1.0, 1.0, std::nullopt, 1.0, 1.0},
       {-1.0, 1.0, 1.0, 0.9, 1.0, 1.0}});
  const auto ad = assign_ranks(ds, "autodock");  // lower is better
  EXPECT_EQ(ad.ranks, (std::vector<std::size_t>{3, 2, 1, 4}));
  const auto dd = assign_ranks(ds, "diffdock");
  EXPECT_EQ(dd.n_scored, 2u);
  EXPECT_EQ(dd.ranks, (std::vector<std::size_t>{4, 2, 3, 1}));
  EXPECT_EQ(dd.order, (std::vector<std::size_t>{3, 1, 2, 0}));
}

TEST(AssignRanks, IsPermutationOnRandomInput) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.below(60);
    std::vector<std::pair<std::string, int>> ligands;
    std::vector<std::vector<std::optional<double>>> scores;
    for (std::size_t i = 0; i < n; ++i) {
      ligands.emplace_back("L" + std::to_string(rng.next_u64()), static_cast<int>(rng.below(2)));
      std::vector<std::optional<double>> row(6);
      for (auto& v : row) {
        if (rng.uniform() > 0.2) v = static_cast<double>(rng.below(5));
      }
      scores.push_back(row);
    }
    const auto ds = testing::make_dataset("T", ligands, scores);
    for (const auto& s : ds.scorers()) {
      const auto t = assign_ranks(ds, s.id);
      std::vector<std::size_t> sorted = t.ranks;
      std::sort(sorted.begin(), sorted.end());
      std::vector<std::size_t> expect(n);
      std::iota(expect.begin(), expect.end(), 1);
      ASSERT_EQ(sorted, expect);
      for (std::size_t k = 1; k < n; ++k) {
        const auto a = ds.oriented_score(t.order[k - 1], ds.scorer_index(s.id));
        const auto b = ds.oriented_score(t.order[k], ds.scorer_index(s.id));
        if (a && b) {
          ASSERT_GE(*a, *b);
        }
        if (!a) {
          ASSERT_FALSE(b.has_value());
        }
      }
    }
  }
}

TEST(Filter, PredicateAndMissingFails) {
  const auto ds = testing::oracle_dataset();
  const auto spec = builtin_consensus("cc-medium", PathwaySelection::AutoDock);
  const auto f = apply_filter(ds, spec.filter);
  // nmdn_ad >= -800 and gnina_ad >= 0.1
  EXPECT_EQ(f.retained, (std::vector<bool>{true, false, true}));
  EXPECT_EQ(f.n_retained, 2u);
  ASSERT_EQ(f.pass_counts.size(), 2u);

  const auto miss = apply_filter(
      ds, FilterSpec::all_of("m", {{"diffdock", -100.0}}));  // L2 has no diffdock score
  EXPECT_EQ(miss.retained, (std::vector<bool>{true, false, true}));
  EXPECT_EQ(apply_filter(ds, FilterSpec{}).n_retained, 3u);
}

TEST(Filter, GlobalAcceptsEitherPathway) {
  const auto ds = testing::oracle_dataset();
  const auto g = builtin_consensus("Global", PathwaySelection::Both);
  const auto r = run_consensus(ds, g);
  EXPECT_EQ(r.retained.size(), 2u);
  EXPECT_EQ(r.excluded.size(), 1u);
  EXPECT_EQ(r.excluded[0].ligand_id, "L2");
  EXPECT_DOUBLE_EQ(r.actives_remaining_pct, 100.0);
}

TEST(Filter, RetainedPlusExcludedCoversLibrary) {
  const auto ds = testing::oracle_dataset();
  for (const auto& name : builtin_scheme_names()) {
    for (auto p : {PathwaySelection::AutoDock, PathwaySelection::DiffDock, PathwaySelection::Both}) {
      if ((name == "Global") != (p == PathwaySelection::Both)) continue;
      const auto r = run_consensus(ds, builtin_consensus(name, p));
      std::set<std::size_t> seen;
      for (const auto& e : r.retained) seen.insert(e.record);
      for (const auto& e : r.excluded) seen.insert(e.record);
      EXPECT_EQ(seen.size(), ds.n_total()) << name;
    }
  }
}

TEST(Builtins, EmittedConfigMatchesTable) {
  struct Row {
    const char* name;
    double nmdn, cnn, w_gnina;
  };
  for (const Row& row : {Row{"CC-Medium", -800, 0.1, 2}, Row{"UC-Strong", 900, 0.6, 1},
                         Row{"CC-Weak", -4000, 0.0, 2}}) {
    for (auto p : {PathwaySelection::AutoDock, PathwaySelection::DiffDock}) {
      const bool ad = p == PathwaySelection::AutoDock;
      const auto doc = nlohmann::json::parse(consensus_spec_to_json(builtin_consensus(row.name, p)));
      EXPECT_EQ(doc["name"], row.name);
      const auto& f = doc["filters"];
      ASSERT_EQ(f.size(), 2u);
      EXPECT_EQ(f[0]["scorer"], ad ? "nmdn_ad" : "nmdn_dd");
      EXPECT_EQ(f[0]["min"].get<double>(), row.nmdn);
      EXPECT_EQ(f[1]["scorer"], ad ? "gnina_ad" : "gnina_dd");
      EXPECT_EQ(f[1]["min"].get<double>(), row.cnn);
      const auto& w = doc["weights"];
      ASSERT_EQ(w.size(), 3u);
      EXPECT_EQ(w[0]["scorer"], ad ? "autodock" : "diffdock");
      EXPECT_EQ(w[0]["w"].get<double>(), 1.0);
      EXPECT_EQ(w[1]["w"].get<double>(), row.w_gnina);
      EXPECT_EQ(w[2]["w"].get<double>(), 1.0);
    }
  }
  EXPECT_THROW(builtin_consensus("Global", PathwaySelection::AutoDock), ArgumentError);
  EXPECT_THROW(builtin_consensus("CC-Medium", PathwaySelection::Both), ArgumentError);
  EXPECT_THROW(builtin_consensus("cc-heavy", PathwaySelection::AutoDock), ArgumentError);
  EXPECT_EQ(builtin_consensus("cc-MEDIUM", PathwaySelection::AutoDock).name, "CC-Medium");
}

TEST(Builtins, SpecJsonRoundTrip) {
  for (const auto& name : builtin_scheme_names()) {
    const auto p = name == "Global" ? PathwaySelection::Both : PathwaySelection::DiffDock;
    const auto spec = builtin_consensus(name, p);
    EXPECT_EQ(parse_consensus_spec(consensus_spec_to_json(spec)), spec) << name;
  }
  EXPECT_THROW(parse_consensus_spec(R"({"name":"x"})"), ConfigError);
  EXPECT_THROW(parse_consensus_spec(R"({"name":"x","weights":[{"scorer":"a","w":-1}]})"),
               ConfigError);
}

TEST(Ranking, FormatListsRetainedThenExcluded) {
  const auto ds = testing::oracle_dataset();
  const auto r = run_consensus(ds, builtin_consensus("CC-Medium", PathwaySelection::DiffDock));
  const auto text = format_ranking(r);
  EXPECT_EQ(text.substr(0, text.find('\n')), "ligand_id,average_rank,label,retained");
  // only L3 passes the DiffDock cutoffs
  EXPECT_EQ(r.retained.size(), 1u);
  EXPECT_EQ(r.retained[0].ligand_id, "L3");
  EXPECT_DOUBLE_EQ(r.actives_remaining_pct, 0.0);
}

}  // namespace
}  // namespace vscreen
