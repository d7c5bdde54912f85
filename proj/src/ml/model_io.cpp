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

#include <json.hpp>

#include "vscreen/csv.hpp"
#include "vscreen/error.hpp"
#include "vscreen/ml/model.hpp"
#include "vscreen/numfmt.hpp"

namespace vscreen::ml {

using Json = nlohmann::ordered_json;

namespace {

Json config_json(const NetConfig& c) {
  Json j;
  j["name"] = c.name;
  j["widths"] = c.widths;
  j["dropout"] = c.dropout;
  j["batch_norm"] = c.batch_norm;
  j["learning_rate"] = c.learning_rate;
  j["weight_decay"] = c.weight_decay;
  j["weight_decay_mode"] = "decoupled";
  j["beta1"] = c.beta1;
  j["beta2"] = c.beta2;
  j["epsilon"] = c.epsilon;
  j["bn_momentum"] = c.bn_momentum;
  j["bn_epsilon"] = c.bn_epsilon;
  j["n_batches"] = c.n_batches;
  j["max_epochs"] = c.max_epochs;
  j["patience"] = c.patience;
  j["seed"] = c.seed;
  j["activation"] = "relu";
  j["output"] = "sigmoid";
  j["loss"] = "weighted_bce";
  j["init"] = "he_normal";
  return j;
}

// Missing keys keep the preset named by "preset" (or the wide network).
NetConfig config_from_json(const nlohmann::json& j) {
  NetConfig c = j.value("preset", std::string("wnn")) == "deep" ? NetConfig::deep()
                                                                : NetConfig::wide();
  if (j.contains("preset")) c.name = j.at("preset").get<std::string>();
  c.name = j.value("name", c.name);
  if (j.contains("widths")) c.widths = j.at("widths").get<std::vector<std::size_t>>();
  if (j.contains("dropout")) c.dropout = j.at("dropout").get<std::vector<double>>();
  if (j.contains("batch_norm")) c.batch_norm = j.at("batch_norm").get<std::vector<bool>>();
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.weight_decay = j.value("weight_decay", c.weight_decay);
  c.beta1 = j.value("beta1", c.beta1);
  c.beta2 = j.value("beta2", c.beta2);
  c.epsilon = j.value("epsilon", c.epsilon);
  c.bn_momentum = j.value("bn_momentum", c.bn_momentum);
  c.bn_epsilon = j.value("bn_epsilon", c.bn_epsilon);
  c.n_batches = j.value("n_batches", c.n_batches);
  c.max_epochs = j.value("max_epochs", c.max_epochs);
  c.patience = j.value("patience", c.patience);
  c.seed = j.value("seed", c.seed);
  return c;
}

Json vec_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd vec_from(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Row-major flat array plus shape.
Json mat_json(const Eigen::MatrixXd& m) {
  Json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) flat.push_back(m(r, c));
  }
  j["data"] = std::move(flat);
  return j;
}

Eigen::MatrixXd mat_from(const nlohmann::json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto flat = j.at("data").get<std::vector<double>>();
  if (static_cast<std::size_t>(rows * cols) != flat.size()) {
    throw ShapeError("stored matrix has the wrong number of entries");
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = flat[static_cast<std::size_t>(r * cols + c)];
  }
  return m;
}

}  // namespace

std::string net_config_to_json(const NetConfig& config) { return config_json(config).dump(2) + "\n"; }

NetConfig parse_net_config(std::string_view json_text) {
  NetConfig c;
  try {
    c = config_from_json(nlohmann::json::parse(json_text));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed network config: ") + e.what());
  }
  try {
    c.validate();
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("invalid network config: ") + e.what());
  }
  return c;
}

std::string model_to_json(const TrainedModel& model) {
  Json doc;
  doc["format"] = std::string(kModelFormat);
  doc["version"] = kModelFormatVersion;
  doc["config"] = config_json(model.config);
  doc["recipe"] = Json::parse(recipe_to_json(model.recipe));
  doc["scaler"] = {{"median", model.scaler.median}, {"iqr", model.scaler.iqr}};
  doc["pos_weight"] = model.pos_weight;
  doc["best_epoch"] = model.best_epoch;
  doc["bn_momentum"] = model.network.bn_momentum();
  doc["bn_epsilon"] = model.network.bn_epsilon();
  Json layers = Json::array();
  for (const auto& l : model.network.layers()) {
    Json j;
    j["weight"] = mat_json(l.weight);
    j["bias"] = vec_json(l.bias);
    j["dropout"] = l.dropout;
    j["batch_norm"] = l.batch_norm;
    if (l.batch_norm) {
      j["gamma"] = vec_json(l.gamma);
      j["beta"] = vec_json(l.beta);
      j["running_mean"] = vec_json(l.running_mean);
      j["running_var"] = vec_json(l.running_var);
    }
    layers.push_back(std::move(j));
  }
  doc["layers"] = std::move(layers);
  Json log = Json::array();
  for (const auto& e : model.log) {
    log.push_back({{"epoch", e.epoch},
                   {"train_loss", e.train_loss},
                   {"validation_ef1", e.validation_ef1},
                   {"best", e.best}});
  }
  doc["log"] = std::move(log);
  return doc.dump() + "\n";
}

TrainedModel parse_model(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (doc.value("format", std::string()) != kModelFormat) {
      throw ConfigError("not a vscreen model file");
    }
    const int version = doc.at("version").get<int>();
    if (version != kModelFormatVersion) {
      throw ConfigError("model file version " + std::to_string(version) +
                        " is not supported (expected " + std::to_string(kModelFormatVersion) +
                        ")");
    }
    TrainedModel m;
    m.config = config_from_json(doc.at("config"));
    m.recipe = parse_recipe(doc.at("recipe").dump());
    m.scaler.median = doc.at("scaler").at("median").get<std::vector<double>>();
    m.scaler.iqr = doc.at("scaler").at("iqr").get<std::vector<double>>();
    m.pos_weight = doc.at("pos_weight").get<double>();
    m.best_epoch = doc.at("best_epoch").get<std::size_t>();
    std::vector<DenseLayer> layers;
    for (const auto& j : doc.at("layers")) {
      DenseLayer l;
      l.weight = mat_from(j.at("weight"));
      l.bias = vec_from(j.at("bias"));
      l.dropout = j.at("dropout").get<double>();
      l.batch_norm = j.at("batch_norm").get<bool>();
      if (l.batch_norm) {
        l.gamma = vec_from(j.at("gamma"));
        l.beta = vec_from(j.at("beta"));
        l.running_mean = vec_from(j.at("running_mean"));
        l.running_var = vec_from(j.at("running_var"));
      }
      layers.push_back(std::move(l));
    }
    m.network = Mlp(std::move(layers), doc.at("bn_momentum").get<double>(),
                    doc.at("bn_epsilon").get<double>());
    for (const auto& e : doc.at("log")) {
      m.log.push_back({e.at("epoch").get<std::size_t>(), e.at("train_loss").get<double>(),
                       e.at("validation_ef1").get<double>(), e.at("best").get<bool>()});
    }
    if (m.scaler.width() != m.network.n_inputs() || m.recipe.width() != m.network.n_inputs()) {
      throw ConfigError("model file: recipe, scaler and network widths disagree");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed model file: ") + e.what());
  } catch (const ShapeError& e) {
    throw ConfigError(std::string("malformed model file: ") + e.what());
  }
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  write_text_file(path, model_to_json(model));
}

TrainedModel load_model(const std::filesystem::path& path) {
  return parse_model(read_text_file(path));
}

std::string format_training_log(std::span<const EpochLog> log) {
  std::string out = "epoch,train_loss,validation_ef1,best\n";
  for (const auto& e : log) {
    out += join_csv({std::to_string(e.epoch), format_real(e.train_loss),
                     format_real(e.validation_ef1), e.best ? "1" : "0"});
    out += "\n";
  }
  return out;
}

}  // namespace vscreen::ml
