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

#include "vscreen/synth.hpp"

#include <cmath>

#include <Eigen/Dense>
#include <fmt/format.h>
#include <json.hpp>

#include "vscreen/csv.hpp"
#include "vscreen/error.hpp"
#include "vscreen/metrics.hpp"
#include "vscreen/rng.hpp"

namespace vscreen::synth {

namespace {

Eigen::MatrixXd correlation_matrix(const SyntheticSpec& spec) {
  const auto k = static_cast<Eigen::Index>(spec.scorers.size());
  Eigen::MatrixXd c(k, k);
  if (!spec.correlation.empty()) {
    if (spec.correlation.size() != spec.scorers.size()) {
      throw ArgumentError("correlation matrix size does not match the scorer count");
    }
    for (Eigen::Index i = 0; i < k; ++i) {
      const auto& row = spec.correlation[static_cast<std::size_t>(i)];
      if (row.size() != spec.scorers.size()) {
        throw ArgumentError("correlation matrix is not square");
      }
      for (Eigen::Index j = 0; j < k; ++j) c(i, j) = row[static_cast<std::size_t>(j)];
    }
  } else {
    c.setConstant(spec.noise_correlation);
    c.diagonal().setOnes();
  }
  return c;
}

// Lower-triangular factor L with L L^T = C. Falls back to an eigen
// decomposition for singular but positive semi-definite matrices.
Eigen::MatrixXd noise_factor(const Eigen::MatrixXd& c) {
  Eigen::LLT<Eigen::MatrixXd> llt(c);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c);
  if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() < -1e-10) {
    throw ArgumentError("correlation matrix is not positive semi-definite");
  }
  const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal();
}

}  // namespace

void SyntheticSpec::validate() const {
  if (scorers.empty()) throw ArgumentError("synthetic spec needs at least one scorer");
  for (const auto& s : scorers) {
    if (!(s.missing_rate >= 0.0 && s.missing_rate < 1.0)) {
      throw ArgumentError("missing_rate of " + s.spec.id + " must lie in [0, 1)");
    }
    if (!(s.spread > 0.0) || !std::isfinite(s.location) || !std::isfinite(s.signal_strength) ||
        s.signal_strength < 0.0) {
      throw ArgumentError("scorer " + s.spec.id + " needs spread > 0 and signal_strength >= 0");
    }
    if (s.signal_group >= 0 && static_cast<std::size_t>(s.signal_group) >= n_signal_groups) {
      throw ArgumentError("signal_group of " + s.spec.id + " exceeds n_signal_groups");
    }
  }
  if (n_signal_groups == 0) throw ArgumentError("n_signal_groups must be at least 1");
  if (correlation.empty() && !(noise_correlation >= 0.0 && noise_correlation < 1.0)) {
    throw ArgumentError("noise_correlation must lie in [0, 1)");
  }
  const auto c = correlation_matrix(*this);
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    if (c(i, i) != 1.0) throw ArgumentError("correlation matrix needs a unit diagonal");
    for (Eigen::Index j = 0; j < c.cols(); ++j) {
      if (c(i, j) != c(j, i) || std::abs(c(i, j)) > 1.0) {
        throw ArgumentError("correlation matrix must be symmetric with entries in [-1, 1]");
      }
    }
  }
  noise_factor(c);
}

std::vector<SyntheticScorer> default_scorer_profile() {
  std::vector<SyntheticScorer> out;
  for (const auto& spec : default_scorer_specs()) {
    SyntheticScorer s;
    s.spec = spec;
    if (spec.id == scorer::kAutoDock) {
      s.location = 7.0;  // oriented: AutoDock energies near -7
      s.spread = 1.5;
    } else if (spec.id == scorer::kDiffDock) {
      s.location = -1.0;
      s.spread = 1.0;
    } else if (spec.id == scorer::kGninaAD || spec.id == scorer::kGninaDD) {
      s.location = 0.35;
      s.spread = 0.2;
    } else {
      s.location = 0.0;
      s.spread = 1000.0;
    }
    out.push_back(std::move(s));
  }
  return out;
}

ScreenDataset generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  const std::size_t n = spec.n_actives + spec.n_inactives;
  const std::size_t k = spec.scorers.size();
  const Eigen::MatrixXd factor = noise_factor(correlation_matrix(spec));

  Rng rng(spec.seed);
  std::vector<int> labels(n, 0);
  std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(spec.n_actives), 1);
  rng.shuffle(std::span<int>(labels));

  std::vector<ScorerSpec> specs;
  for (const auto& s : spec.scorers) specs.push_back(s.spec);

  const int width = std::max(6, static_cast<int>(std::to_string(n).size()));
  std::vector<ScoreRecord> records;
  records.reserve(n);
  Eigen::VectorXd g(static_cast<Eigen::Index>(k));
  std::size_t active_counter = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ScoreRecord rec;
    rec.target_id = spec.target_id;
    rec.ligand_id = fmt::format("{}_L{:0{}}", spec.target_id, i + 1, width);
    rec.label = labels[i];
    const int group = rec.label == 1
                          ? static_cast<int>(active_counter++ % spec.n_signal_groups)
                          : -2;

    for (std::size_t j = 0; j < k; ++j) g(static_cast<Eigen::Index>(j)) = rng.normal();
    const Eigen::VectorXd z = factor * g;

    rec.scores.resize(k);
    bool any = false;
    for (std::size_t j = 0; j < k; ++j) {
      const auto& sc = spec.scorers[j];
      double shift = 0.0;
      if (rec.label == 1 && (sc.signal_group < 0 || sc.signal_group == group)) {
        shift = sc.signal_strength;
      }
      const double oriented = sc.location + sc.spread * (z(static_cast<Eigen::Index>(j)) + shift);
      const double raw = sc.spec.direction == Direction::LowerBetter ? -oriented : oriented;
      const bool missing = rng.uniform() < sc.missing_rate;
      if (!missing) {
        rec.scores[j] = raw;
        any = true;
      }
    }
    if (!any) {
      // every ligand keeps at least one score
      const auto& sc = spec.scorers[0];
      const double oriented = sc.location + sc.spread * z(0);
      rec.scores[0] = sc.spec.direction == Direction::LowerBetter ? -oriented : oriented;
    }
    records.push_back(std::move(rec));
  }
  return ScreenDataset(spec.target_id, std::move(specs), std::move(records));
}

namespace {

std::vector<SyntheticScorer> parse_scorers(const nlohmann::json& arr) {
  std::vector<SyntheticScorer> out;
  const auto defaults = default_scorer_profile();
  for (const auto& item : arr) {
    SyntheticScorer s;
    s.spec.id = item.contains("scorer_id") ? item.at("scorer_id").get<std::string>()
                                           : item.at("id").get<std::string>();
    // canonical ids inherit the default profile unless overridden
    for (const auto& d : defaults) {
      if (d.spec.id == s.spec.id) s = d;
    }
    s.spec.column = item.value("column", s.spec.id);
    if (item.contains("direction")) {
      s.spec.direction = parse_direction(item.at("direction").get<std::string>());
    }
    if (item.contains("pathway")) s.spec.pathway = parse_pathway(item.at("pathway").get<std::string>());
    s.signal_strength = item.value("signal", s.signal_strength);
    s.missing_rate = item.value("missing_rate", s.missing_rate);
    s.location = item.value("location", s.location);
    s.spread = item.value("spread", s.spread);
    s.signal_group = item.value("signal_group", s.signal_group);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

std::vector<SyntheticSpec> parse_synthetic_specs(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("synth spec is not valid JSON: ") + e.what());
  }
  try {
    SyntheticSpec base;
    base.seed = doc.value("seed", std::uint64_t{0});
    base.noise_correlation = doc.value("noise_correlation", 0.0);
    if (doc.contains("correlation")) {
      base.correlation = doc.at("correlation").get<std::vector<std::vector<double>>>();
    }
    base.n_signal_groups = doc.value("n_signal_groups", std::size_t{1});
    base.scorers = doc.contains("scorers") ? parse_scorers(doc.at("scorers"))
                                           : default_scorer_profile();

    std::vector<SyntheticSpec> out;
    const auto& targets = doc.at("targets");
    for (std::size_t t = 0; t < targets.size(); ++t) {
      const auto& item = targets[t];
      SyntheticSpec spec = base;
      spec.target_id = item.value("target_id", fmt::format("T{:02}", t + 1));
      spec.n_actives = item.at("n_actives").get<std::size_t>();
      spec.n_inactives = item.at("n_inactives").get<std::size_t>();
      spec.seed = item.contains("seed") ? item.at("seed").get<std::uint64_t>()
                                        : derive_seed(base.seed, t);
      if (item.contains("scorers")) spec.scorers = parse_scorers(item.at("scorers"));
      spec.validate();
      out.push_back(std::move(spec));
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed synth spec: ") + e.what());
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("invalid synth spec: ") + e.what());
  }
}

std::vector<SyntheticSpec> load_synthetic_specs(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const DataError&) {
    throw ConfigError("cannot open synth spec file: " + path.string());
  }
  return parse_synthetic_specs(text);
}

BaselineEstimate random_baseline(std::size_t n_total, std::size_t n_actives, double x_pct,
                                 std::size_t trials, std::uint64_t seed) {
  if (trials == 0) throw ArgumentError("random_baseline needs at least one trial");
  if (n_actives == 0 || n_actives > n_total) {
    throw ArgumentError("random_baseline needs 0 < n_actives <= n_total");
  }
  Rng rng(seed);
  RankedLibrary lib;
  lib.n_total_library = n_total;
  lib.n_actives_total = n_actives;
  lib.labels.assign(n_total, 0);
  std::fill(lib.labels.begin(), lib.labels.begin() + static_cast<std::ptrdiff_t>(n_actives), 1);

  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    rng.shuffle(std::span<int>(lib.labels));
    const double ef = enrichment_factor(lib, x_pct);
    sum += ef;
    sum_sq += ef * ef;
  }
  BaselineEstimate est;
  est.trials = trials;
  est.mean = sum / static_cast<double>(trials);
  if (trials > 1) {
    const double var = (sum_sq - sum * sum / static_cast<double>(trials)) /
                       static_cast<double>(trials - 1);
    est.stddev = std::sqrt(std::max(0.0, var));
  }
  return est;
}

}  // namespace vscreen::synth
