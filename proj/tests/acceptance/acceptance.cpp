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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "feature_oracle_table.hpp"
#include "fixtures.hpp"
#include "gradcheck.hpp"
#include "oracle.hpp"
#include "vscreen/app.hpp"
#include "vscreen/csv.hpp"
#include "vscreen/metrics.hpp"
#include "vscreen/ml/model.hpp"
#include "vscreen/rank_engine.hpp"
#include "vscreen/synth.hpp"

namespace {

using namespace vscreen;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  double time_limit_s;  // 0 = untimed
  std::function<Outcome()> run;
};

RankedLibrary from_labels(std::vector<int> labels) {
  RankedLibrary lib;
  lib.n_total_library = labels.size();
  lib.n_actives_total = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  lib.labels = std::move(labels);
  return lib;
}

std::vector<int> shuffled_labels(Rng& rng, std::size_t n, std::size_t actives) {
  std::vector<int> labels(n, 0);
  std::fill(labels.begin(), labels.begin() + static_cast<long>(actives), 1);
  rng.shuffle(std::span<int>(labels));
  return labels;
}

Outcome ef_example() {
  std::vector<int> labels(10000, 0);
  for (std::size_t i = 0; i < 100; i += 10) labels[i] = 1;
  for (std::size_t i = 100; i < 590; ++i) labels[i] = 1;
  const double ef = enrichment_factor(from_labels(labels), 1.0);
  return {std::abs(ef - 2.0) <= 1e-12, fmt::format("EF1% = {}", ef)};
}

RankTable placed(const std::string& scorer, std::size_t n, std::size_t rank) {
  RankTable t;
  t.scorer_id = scorer;
  t.ranks.resize(n);
  t.ranks[0] = rank;
  std::size_t next = 1;
  for (std::size_t i = 1; i < n; ++i) {
    if (next == rank) ++next;
    t.ranks[i] = next++;
  }
  t.n_scored = n;
  return t;
}

Outcome average_rank_example() {
  const std::size_t n = 1000;
  std::vector<std::pair<std::string, int>> ligands;
  std::vector<std::vector<std::optional<double>>> scores;
  for (std::size_t i = 0; i < n; ++i) {
    ligands.emplace_back(fmt::format("L{:04}", i), i == 0 ? 1 : 0);
    scores.push_back(std::vector<std::optional<double>>(6, 0.0));
  }
  const auto ds = testing::make_dataset("T", ligands, scores);
  const std::vector<RankTable> tables{placed("gnina_ad", n, 15), placed("autodock", n, 76),
                                      placed("nmdn_ad", n, 939)};
  const std::vector<bool> keep(n, true);
  auto first = [&](double w_gnina) {
    const ConsensusSpec spec{"x", "autodock", {}, {{"gnina_ad", w_gnina}, {"autodock", 1}, {"nmdn_ad", 1}}};
    for (const auto& e : consensus_rank(ds, tables, spec, keep).retained) {
      if (e.record == 0) return e.average_rank;
    }
    return -1.0;
  };
  const double plain = first(1.0);
  const double weighted = first(2.0);
  return {std::abs(plain - 343.33) <= 0.01 && std::abs(weighted - 261.25) <= 1e-9,
          fmt::format("unweighted {:.6f}, W_GNINA=2 {:.9f}", plain, weighted)};
}

Outcome builtin_fidelity() {
  struct Row {
    const char* name;
    double nmdn, cnn;
    double w[3];
  };
  const Row rows[] = {{"CC-Medium", -800, 0.1, {2, 1, 1}},
                      {"UC-Strong", 900, 0.6, {1, 1, 1}},
                      {"CC-Weak", -4000, 0.0, {2, 1, 1}}};
  std::string detail;
  bool ok = true;
  for (const auto& row : rows) {
    for (auto p : {PathwaySelection::AutoDock, PathwaySelection::DiffDock}) {
      const auto doc = nlohmann::json::parse(consensus_spec_to_json(builtin_consensus(row.name, p)));
      const std::string sfx = p == PathwaySelection::AutoDock ? "_ad" : "_dd";
      std::map<std::string, double> w;
      for (const auto& m : doc["weights"]) w[m["scorer"]] = m["w"].get<double>();
      const auto& f = doc["filters"];
      const bool good = f.size() == 2 && f[0]["scorer"] == "nmdn" + sfx &&
                        f[0]["min"].get<double>() == row.nmdn && f[1]["scorer"] == "gnina" + sfx &&
                        f[1]["min"].get<double>() == row.cnn && w.size() == 3 &&
                        w["gnina" + sfx] == row.w[0] &&
                        w[p == PathwaySelection::AutoDock ? "autodock" : "diffdock"] == row.w[1] &&
                        w["nmdn" + sfx] == row.w[2];
      ok &= good;
    }
    detail += fmt::format("{} {}&{} {}-{}-{}; ", row.name, row.nmdn, row.cnn, row.w[0], row.w[1], row.w[2]);
  }
  return {ok, detail};
}

Outcome oracle_equivalence() {
  Rng rng(2024);
  double worst = 0.0;
  const int instances = 1000;
  for (int t = 0; t < instances; ++t) {
    const std::size_t n = 2 + rng.below(1999);
    const std::size_t a = 1 + rng.below(n - 1);
    const auto labels = shuffled_labels(rng, n, a);
    // scores with deliberate ties, ranking by them (ties by position)
    std::vector<double> scores(n);
    const std::size_t levels = 2 + rng.below(n);
    for (auto& s : scores) s = static_cast<double>(rng.below(levels));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return scores[x] > scores[y]; });
    std::vector<int> ranked(n);
    RankedLibrary lib;
    lib.n_total_library = n;
    lib.n_actives_total = a;
    for (std::size_t i = 0; i < n; ++i) {
      ranked[i] = labels[order[i]];
      lib.labels.push_back(ranked[i]);
      lib.scores.push_back(scores[order[i]]);
    }
    for (double x : {1.0, 5.0, 10.0}) {
      worst = std::max(worst, std::abs(enrichment_factor(lib, x) - testing::oracle_ef(ranked, x)));
    }
    worst = std::max(worst, std::abs(roc_auc(lib) - testing::oracle_auc(scores, labels)));
    worst = std::max(worst, std::abs(bedroc(lib, 20.0) - testing::oracle_bedroc(ranked, 20.0)));
  }
  return {worst <= 1e-10, fmt::format("{} instances, max |diff| = {:.3g}", instances, worst)};
}

Outcome bedroc_limits() {
  std::vector<int> perfect(1000, 0);
  std::fill(perfect.begin(), perfect.begin() + 10, 1);
  const std::vector<int> inverted(perfect.rbegin(), perfect.rend());
  const double hi = bedroc(from_labels(perfect), 20.0);
  const double lo = bedroc(from_labels(inverted), 20.0);
  double sum = 0.0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    Rng rng(derive_seed(55, seed));
    sum += bedroc(from_labels(shuffled_labels(rng, 1000, 10)), 20.0);
  }
  const double mean = sum / 1000.0;
  const double analytic = random_bedroc(1000, 10, 20.0);
  return {hi >= 0.99 && lo <= 0.01 && std::abs(mean - analytic) <= 0.02,
          fmt::format("perfect {:.4f}, inverted {:.2e}, random mean {:.4f} vs analytic {:.4f}", hi,
                      lo, mean, analytic)};
}

Outcome random_enrichment() {
  double sum = 0.0;
  Rng rng(77);
  for (int t = 0; t < 1000; ++t) sum += enrichment_factor(from_labels(shuffled_labels(rng, 5000, 50)), 1.0);
  const double mean = sum / 1000.0;
  return {mean >= 0.85 && mean <= 1.15, fmt::format("mean EF1% = {:.4f}", mean)};
}

Outcome classical_regime() {
  const auto m = classical_from_confusion({2, 98, 98, 9802}, ThresholdPolicy::top1_percent());
  const bool ok = std::abs(m.accuracy - 0.9804) < 1e-12 && std::abs(m.precision - 0.02) < 1e-12 &&
                  std::abs(m.recall - 0.02) < 1e-12 &&
                  std::abs(m.balanced_accuracy - (0.02 + 9802.0 / 9900.0) / 2.0) < 1e-12 &&
                  std::abs(m.balanced_accuracy * 100.0 - 50.505) < 0.001;
  return {ok, fmt::format("accuracy {:.2f}%, precision {:.0f}%, recall {:.0f}%, balanced {:.3f}%",
                          100 * m.accuracy, 100 * m.precision, 100 * m.recall,
                          100 * m.balanced_accuracy)};
}

Outcome feature_recipe() {
  const auto recipe = ml::default_recipe();
  const auto m = ml::build_features(testing::oracle_dataset(), recipe);
  double worst = 0.0;
  bool names = m.cols() == testing::kOracleColumns.size();
  for (std::size_t j = 0; names && j < m.cols(); ++j) names = m.names[j] == testing::kOracleColumns[j];
  for (std::size_t i = 0; names && i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      worst = std::max(worst, std::abs(m.values(static_cast<Eigen::Index>(i),
                                                static_cast<Eigen::Index>(j)) -
                                       testing::kOracleTable[i][j]));
    }
  }
  return {recipe.n_primary == 17 && recipe.width() == 42 && names && worst <= 1e-9,
          fmt::format("{} primary, {} total, max |diff| = {:.3g}", recipe.n_primary, recipe.width(),
                      worst)};
}

Outcome gradient_check() {
  std::string detail;
  double worst = 0.0;
  for (const auto& cfg : {ml::NetConfig::wide(), ml::NetConfig::deep()}) {
    Rng rng(cfg.name == "wnn" ? 91 : 92);
    const ml::Mlp net(42, cfg, rng);
    Eigen::MatrixXd x(5, 42);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = rng.normal();
    }
    const std::vector<double> y{1, 0, 0, 1, 0};
    for (bool batch_stats : {true, false}) {
      if (!cfg.batch_norm.front() && !batch_stats) continue;
      const auto r = testing::check_gradients(net, x, y, 2.0, batch_stats, 150, 7);
      worst = std::max(worst, r.max_rel_error);
      detail += fmt::format("{}{} {:.2e} ({} params); ", cfg.name,
                            cfg.batch_norm.front() ? (batch_stats ? "/batch" : "/running") : "",
                            r.max_rel_error, r.checked);
    }
  }
  return {worst < 1e-4, detail};
}

Outcome planted_signal_uplift() {
  std::string detail;
  bool ok = true;
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto t0 = std::chrono::steady_clock::now();
    synth::SyntheticSpec spec;
    spec.target_id = "UPLIFT";
    spec.n_actives = 200;
    spec.n_inactives = 19800;
    spec.seed = seed;
    spec.n_signal_groups = 2;
    spec.scorers = synth::default_scorer_profile();
    for (auto& s : spec.scorers) {
      if (s.spec.id == scorer::kGninaAD) {
        s.signal_strength = 3.0;
        s.signal_group = 0;
      } else if (s.spec.id == scorer::kNmdnDD) {
        s.signal_strength = 3.0;
        s.signal_group = 1;
      }
    }
    const auto ds = synth::generate_synthetic(spec);
    const auto recipe = ml::default_recipe();
    const auto fm = ml::build_features(ds, recipe);
    const auto split = ml::split_dataset(ds, 0.75, derive_seed(seed, 99));
    const auto train = fm.select_rows(split.train);
    const auto val = fm.select_rows(split.validation);

    // strongest single column, either sign, on the same validation ligands
    double best_feature = 0.0;
    for (std::size_t j = 0; j < val.cols(); ++j) {
      for (double sign : {1.0, -1.0}) {
        std::vector<double> s(val.rows());
        for (std::size_t i = 0; i < val.rows(); ++i) {
          s[i] = sign * val.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
        best_feature = std::max(
            best_feature,
            enrichment_factor(ranked_library_from_scores(s, val.labels, val.ligand_ids), 1.0));
      }
    }
    double best_scorer = 0.0;
    const auto val_ds = ds.subset(split.validation);
    for (const auto& s : val_ds.scorers()) {
      best_scorer = std::max(best_scorer,
                             enrichment_factor(ranked_library(val_ds, assign_ranks(val_ds, s.id)), 1.0));
    }

    auto cfg = ml::NetConfig::wide();
    cfg.seed = seed;
    const auto model = ml::fit_model(train, val, recipe, cfg);
    const double wnn = ml::evaluate_model(model, val, {}).report.ef1;
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = wnn >= 1.2 * best_feature && secs <= 300.0;
    ok &= pass;
    detail += fmt::format("seed {}: WNN {:.1f} vs best feature {:.1f} (best scorer {:.1f}) {}, {:.0f}s; ",
                          seed, wnn, best_feature, best_scorer,
                          ml::format_delta(ml::delta_pct(wnn, best_feature)), secs);
  }
  return {ok, detail};
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = testing::slurp(e.path());
  }
  return files;
}

Outcome determinism() {
  testing::TempDir dir("determinism");
  write_text_file(dir / "spec.json", R"({
    "seed": 31, "n_signal_groups": 2, "noise_correlation": 0.2,
    "scorers": [
      {"scorer_id": "autodock", "signal": 0.5},
      {"scorer_id": "gnina_ad", "signal": 2.0, "signal_group": 0},
      {"scorer_id": "nmdn_ad", "signal": 0.5, "missing_rate": 0.03},
      {"scorer_id": "diffdock", "signal": 0.5},
      {"scorer_id": "gnina_dd", "signal": 0.5},
      {"scorer_id": "nmdn_dd", "signal": 2.0, "signal_group": 1}],
    "targets": [
      {"target_id": "D1", "n_actives": 20, "n_inactives": 1500},
      {"target_id": "D2", "n_actives": 25, "n_inactives": 1800},
      {"target_id": "D3", "n_actives": 15, "n_inactives": 1200}]})");
  std::vector<std::map<std::string, std::string>> runs;
  for (const char* name : {"a", "b"}) {
    const auto out = (dir / name).string();
    const auto scores = (dir / name / "synth_scores.csv").string();
    const std::vector<std::vector<std::string>> steps{
        {"synth", "--spec", (dir / "spec.json").string()},
        {"consensus", "-i", scores, "--scheme", "all"},
        {"metrics", "-i", scores},
        {"train", "-i", scores, "--net", "wnn", "--net", "deep"},
        {"report"}};
    for (auto args : steps) {
      for (const char* g : {"--seed", "5", "--jobs", "2", "--out"}) args.emplace_back(g);
      args.push_back(out);
      std::ostringstream sink, err;
      if (app::run_cli(args, sink, err) != 0) return {false, args[0] + " failed: " + err.str()};
    }
    runs.push_back(snapshot(dir / name));
  }
  std::size_t differing = 0;
  for (const auto& [file, body] : runs[0]) {
    const auto it = runs[1].find(file);
    if (it == runs[1].end() || it->second != body) ++differing;
  }
  const bool ok = differing == 0 && runs[0].size() == runs[1].size() && runs[0].size() > 20;
  return {ok, fmt::format("{} files compared, {} differ", runs[0].size(), differing)};
}

Outcome delta_arithmetic() {
  const std::vector<ml::ComparisonRow> rows{{"WNN", 4.49, false}, {"baseline", 2.14, true}};
  const auto csv = ml::format_comparison_csv(rows);
  const double d = ml::delta_pct(4.49, 2.14);
  return {std::abs(d - 109.8) <= 0.1 && csv.find("WNN,4.49,+109.8%") != std::string::npos,
          fmt::format("delta = {:.3f}% -> {}", d, ml::format_delta(d))};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "EF window example", 1.0, ef_example},
      {2, "weighted average-rank example", 1.0, average_rank_example},
      {3, "builtin scheme fidelity", 0.0, builtin_fidelity},
      {4, "metric oracle equivalence", 60.0, oracle_equivalence},
      {5, "BEDROC limits", 30.0, bedroc_limits},
      {6, "random-enrichment calibration", 0.0, random_enrichment},
      {7, "classical-metrics regime", 0.0, classical_regime},
      {8, "feature recipe", 0.0, feature_recipe},
      {9, "gradient check", 0.0, gradient_check},
      {10, "ML uplift on planted signal", 0.0, planted_signal_uplift},
      {11, "end-to-end determinism", 0.0, determinism},
      {12, "comparison delta arithmetic", 0.0, delta_arithmetic},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.time_limit_s > 0.0 && secs >= c.time_limit_s) {
      o.pass = false;
      o.detail += fmt::format(" [over the {:.0f}s limit]", c.time_limit_s);
    }
    failed += o.pass ? 0 : 1;
    std::cout << fmt::format("AC{:02} {} {} ({:.2f}s): {}\n", c.id, o.pass ? "PASS" : "FAIL",
                             c.title, secs, o.detail)
              << std::flush;
  }
  std::cout << fmt::format("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
