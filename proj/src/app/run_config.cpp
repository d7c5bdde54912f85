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
#include <cmath>

#include <json.hpp>

#include "app/internal.hpp"
#include "vscreen/app.hpp"
#include "vscreen/csv.hpp"
#include "vscreen/error.hpp"
#include "vscreen/ml/model.hpp"

namespace vscreen::app {

namespace fs = std::filesystem;

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

std::vector<std::string> string_list(const nlohmann::json& j) {
  if (j.is_string()) return {j.get<std::string>()};
  return j.get<std::vector<std::string>>();
}

}  // namespace

void RunConfig::validate() const {
  if (!(metrics.alpha > 0.0) || !std::isfinite(metrics.alpha)) {
    throw ConfigError("alpha must be positive");
  }
  for (double x : metrics.extra_ef_percents) {
    if (!(x > 0.0 && x <= 100.0)) throw ConfigError("EF percentages must lie in (0, 100]");
  }
  if (!(inactive_fraction > 0.0 && inactive_fraction <= 1.0)) {
    throw ConfigError("inactive_fraction must lie in (0, 1]");
  }
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ConfigError("train_fraction must lie strictly between 0 and 1");
  }
  if (!(decision_threshold > 0.0 && decision_threshold < 1.0)) {
    throw ConfigError("decision threshold must lie strictly between 0 and 1");
  }
  if (baseline_ef1 && !(*baseline_ef1 > 0.0)) throw ConfigError("baseline EF1% must be positive");
  if (nets.empty()) throw ConfigError("no network configured");
  for (const auto& n : nets) {
    try {
      n.validate();
    } catch (const ArgumentError& e) {
      throw ConfigError(std::string("network ") + n.name + ": " + e.what());
    }
  }
  for (const auto& s : schemes) {
    const auto names = builtin_scheme_names();
    if (std::find(names.begin(), names.end(), s) == names.end()) {
      throw ConfigError("unknown consensus scheme '" + s + "'");
    }
  }
  for (const auto& p : inputs) {
    if (!fs::exists(p)) throw DataError("input file not found: " + p.string());
  }
  auto need = [](const std::optional<fs::path>& p, const char* what) {
    if (p && !fs::exists(*p)) throw ConfigError(std::string(what) + " not found: " + p->string());
  };
  need(scorers_file, "scorer spec file");
  need(recipe_file, "feature recipe");
  need(extra_results, "external results file");
  need(synth_spec, "synth spec");
  for (const auto& p : custom_schemes) {
    if (!fs::exists(p)) throw ConfigError("consensus spec not found: " + p.string());
  }
}

std::vector<std::string> normalize_schemes(const std::vector<std::string>& in) {
  const auto names = builtin_scheme_names();
  std::vector<std::string> out;
  for (const auto& s : in) {
    if (lower(s) == "all") return names;
    const auto it = std::find_if(names.begin(), names.end(),
                                 [&](const std::string& n) { return lower(n) == lower(s); });
    if (it == names.end()) throw ConfigError("unknown consensus scheme '" + s + "'");
    if (std::find(out.begin(), out.end(), *it) == out.end()) out.push_back(*it);
  }
  return out;
}

std::vector<PathwaySelection> normalize_pathways(const std::vector<std::string>& in) {
  std::vector<PathwaySelection> out;
  for (const auto& s : in) {
    const auto l = lower(s);
    if (l == "all") return {PathwaySelection::AutoDock, PathwaySelection::DiffDock};
    PathwaySelection p;
    try {
      p = parse_pathway_selection(l);
    } catch (const Error&) {
      throw ConfigError("unknown pathway '" + s + "'");
    }
    if (p == PathwaySelection::Both) continue;  // the Global scheme covers both
    if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
  }
  return out;
}

ml::NetConfig net_preset(std::string_view name) {
  const auto l = lower(name);
  if (l == "wnn" || l == "wide") return ml::NetConfig::wide();
  if (l == "deep") return ml::NetConfig::deep();
  throw ConfigError("unknown network preset '" + std::string(name) + "'");
}

namespace {

ml::NetConfig net_from_json(const nlohmann::json& j) {
  if (j.is_string()) return net_preset(j.get<std::string>());
  return ml::parse_net_config(j.dump());
}

}  // namespace

RunConfig parse_run_config(std::string_view json_text, const fs::path& base_dir) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("run config is not valid JSON: ") + e.what());
  }
  RunConfig c;
  try {
    if (!doc.is_object()) throw ConfigError("run config must be a JSON object");
    if (doc.contains("inputs")) {
      for (const auto& p : string_list(doc.at("inputs"))) c.inputs.push_back(resolve(base_dir, p));
    }
    if (doc.contains("scorers")) {
      const auto& s = doc.at("scorers");
      if (s.is_string()) {
        c.scorers_file = resolve(base_dir, s.get<std::string>());
        c.scorers = load_scorer_specs(*c.scorers_file);
      } else {
        c.scorers = parse_scorer_specs(nlohmann::json{{"scorers", s}}.dump());
      }
    }
    if (doc.contains("schemes")) c.schemes = normalize_schemes(string_list(doc.at("schemes")));
    if (doc.contains("pathways")) c.pathways = normalize_pathways(string_list(doc.at("pathways")));
    if (doc.contains("custom_schemes")) {
      for (const auto& p : string_list(doc.at("custom_schemes"))) {
        c.custom_schemes.push_back(resolve(base_dir, p));
      }
    }
    if (doc.contains("metrics")) {
      const auto& m = doc.at("metrics");
      c.metrics.alpha = m.value("alpha", c.metrics.alpha);
      if (m.contains("ef_percents")) {
        c.metrics.extra_ef_percents = m.at("ef_percents").get<std::vector<double>>();
      }
      if (m.contains("threshold_policy")) {
        const auto& t = m.at("threshold_policy");
        if (t.is_number()) {
          c.metrics.policy = ThresholdPolicy::score_at_least(t.get<double>());
        } else if (lower(t.get<std::string>()) != "top1percent") {
          throw ConfigError("threshold_policy must be \"top1percent\" or a number");
        }
      }
    }
    c.inactive_fraction = doc.value("inactive_fraction", c.inactive_fraction);
    if (doc.contains("ml")) {
      const auto& m = doc.at("ml");
      if (m.contains("recipe")) {
        c.recipe_file = resolve(base_dir, m.at("recipe").get<std::string>());
        c.recipe = ml::load_recipe(*c.recipe_file);
      }
      if (m.contains("nets")) {
        c.nets.clear();
        for (const auto& n : m.at("nets")) c.nets.push_back(net_from_json(n));
      }
      if (m.contains("patience")) {
        for (auto& n : c.nets) n.patience = m.at("patience").get<std::size_t>();
      }
      if (m.contains("max_epochs")) {
        for (auto& n : c.nets) n.max_epochs = m.at("max_epochs").get<std::size_t>();
      }
      c.train_fraction = m.value("train_fraction", c.train_fraction);
      c.decision_threshold = m.value("threshold", c.decision_threshold);
      c.baseline_scorer = m.value("baseline_scorer", c.baseline_scorer);
      if (m.contains("baseline_ef1")) c.baseline_ef1 = m.at("baseline_ef1").get<double>();
      if (m.contains("extra_results")) {
        c.extra_results = resolve(base_dir, m.at("extra_results").get<std::string>());
      }
    }
    if (doc.contains("synth")) c.synth_spec = resolve(base_dir, doc.at("synth").get<std::string>());
    if (doc.contains("model")) c.model_file = resolve(base_dir, doc.at("model").get<std::string>());
    c.seed = doc.value("seed", c.seed);
    if (doc.contains("out")) c.out = resolve(base_dir, doc.at("out").get<std::string>());
    c.jobs = doc.value("jobs", c.jobs);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed run config: ") + e.what());
  }
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const DataError&) {
    throw ConfigError("cannot open run config: " + path.string());
  }
  return parse_run_config(text, path.parent_path());
}

std::string resolved_config_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["scorers"] = nlohmann::ordered_json::parse(scorer_specs_to_json(c.scorers)).at("scorers");
  j["schemes"] = c.schemes;
  std::vector<std::string> paths;
  for (auto p : c.pathways) paths.emplace_back(to_string(p));
  j["pathways"] = paths;
  nlohmann::ordered_json custom = nlohmann::ordered_json::array();
  for (const auto& p : c.custom_schemes) {
    custom.push_back(nlohmann::ordered_json::parse(consensus_spec_to_json(load_consensus_spec(p))));
  }
  j["custom_schemes"] = custom;
  j["metrics"] = {{"alpha", c.metrics.alpha},
                  {"ef_percents", c.metrics.extra_ef_percents},
                  {"threshold_policy", c.metrics.policy.label()}};
  j["inactive_fraction"] = c.inactive_fraction;
  nlohmann::ordered_json ml;
  ml["recipe"] = nlohmann::ordered_json::parse(ml::recipe_to_json(c.recipe));
  ml["nets"] = nlohmann::ordered_json::array();
  for (const auto& n : c.nets) ml["nets"].push_back(nlohmann::ordered_json::parse(ml::net_config_to_json(n)));
  ml["train_fraction"] = c.train_fraction;
  ml["threshold"] = c.decision_threshold;
  ml["baseline_scorer"] = c.baseline_scorer;
  if (c.baseline_ef1) ml["baseline_ef1"] = *c.baseline_ef1;
  j["ml"] = std::move(ml);
  j["seed"] = c.seed;
  j["jobs"] = c.jobs;
  return j.dump(2);
}

}  // namespace vscreen::app
