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

#include "vscreen/ml/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include <fmt/format.h>

#include "vscreen/error.hpp"
#include "vscreen/metrics.hpp"

namespace vscreen::ml {

NetConfig NetConfig::wide() { return NetConfig{}; }

NetConfig NetConfig::deep() {
  NetConfig c;
  c.name = "deep";
  c.widths = {256, 128, 64, 1};
  c.dropout = {0.3, 0.2, 0.1};
  c.batch_norm = {false, false, false};
  return c;
}

void NetConfig::validate() const {
  if (widths.size() < 2) throw ArgumentError("network needs at least one hidden layer");
  if (widths.back() != 1) throw ArgumentError("final layer width must be 1");
  for (auto w : widths) {
    if (w == 0) throw ArgumentError("layer widths must be positive");
  }
  if (dropout.size() != n_hidden() || batch_norm.size() != n_hidden()) {
    throw ArgumentError("dropout and batch_norm need one entry per hidden layer");
  }
  for (double p : dropout) {
    if (!(p >= 0.0 && p < 1.0)) throw ArgumentError("dropout rates must lie in [0, 1)");
  }
  if (max_epochs == 0) throw ArgumentError("max_epochs must be at least 1");
  if (n_batches == 0) throw ArgumentError("n_batches must be at least 1");
  if (patience == 0) throw ArgumentError("patience must be at least 1");
  if (!(learning_rate > 0.0) || !(weight_decay >= 0.0)) {
    throw ArgumentError("learning rate must be positive and weight decay non-negative");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0) || !(epsilon > 0.0)) {
    throw ArgumentError("Adam betas must lie in [0, 1) and epsilon be positive");
  }
  if (!(bn_momentum > 0.0 && bn_momentum <= 1.0) || !(bn_epsilon > 0.0)) {
    throw ArgumentError("batch-norm momentum must lie in (0, 1] and epsilon be positive");
  }
}

Mlp::Mlp(std::size_t n_inputs, const NetConfig& config, Rng& init)
    : bn_momentum_(config.bn_momentum), bn_epsilon_(config.bn_epsilon) {
  config.validate();
  if (n_inputs == 0) throw ArgumentError("network needs at least one input");
  std::size_t fan_in = n_inputs;
  for (std::size_t l = 0; l < config.widths.size(); ++l) {
    const auto out = static_cast<Eigen::Index>(config.widths[l]);
    DenseLayer layer;
    layer.weight.resize(out, static_cast<Eigen::Index>(fan_in));
    const double sd = std::sqrt(2.0 / static_cast<double>(fan_in));
    for (Eigen::Index i = 0; i < out; ++i) {
      for (Eigen::Index j = 0; j < layer.weight.cols(); ++j) layer.weight(i, j) = sd * init.normal();
    }
    layer.bias = Eigen::VectorXd::Zero(out);
    if (l < config.n_hidden()) {
      layer.dropout = config.dropout[l];
      layer.batch_norm = config.batch_norm[l];
      if (layer.batch_norm) {
        layer.gamma = Eigen::VectorXd::Ones(out);
        layer.beta = Eigen::VectorXd::Zero(out);
        layer.running_mean = Eigen::VectorXd::Zero(out);
        layer.running_var = Eigen::VectorXd::Ones(out);
      }
    }
    layers_.push_back(std::move(layer));
    fan_in = config.widths[l];
  }
}

Mlp::Mlp(std::vector<DenseLayer> layers, double bn_momentum, double bn_epsilon)
    : layers_(std::move(layers)), bn_momentum_(bn_momentum), bn_epsilon_(bn_epsilon) {
  if (layers_.empty()) throw ArgumentError("network without layers");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    if (layer.bias.size() != layer.weight.rows()) throw ShapeError("bias/weight size mismatch");
    if (l > 0 && layer.weight.cols() != layers_[l - 1].weight.rows()) {
      throw ShapeError("consecutive layers do not connect");
    }
    if (layer.batch_norm &&
        (layer.gamma.size() != layer.bias.size() || layer.beta.size() != layer.bias.size() ||
         layer.running_mean.size() != layer.bias.size() ||
         layer.running_var.size() != layer.bias.size())) {
      throw ShapeError("batch-norm parameter size mismatch");
    }
  }
  if (layers_.back().weight.rows() != 1) throw ShapeError("output layer must have one unit");
}

std::size_t Mlp::n_inputs() const {
  return layers_.empty() ? 0 : static_cast<std::size_t>(layers_.front().weight.cols());
}

namespace {

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void check_width(const Mlp& net, const Eigen::MatrixXd& x) {
  if (static_cast<std::size_t>(x.cols()) != net.n_inputs()) {
    throw ShapeError(fmt::format("network expects {} features, matrix has {}", net.n_inputs(),
                                 x.cols()));
  }
}

Eigen::MatrixXd affine(const Eigen::MatrixXd& h, const DenseLayer& layer) {
  Eigen::MatrixXd a = h * layer.weight.transpose();
  a.rowwise() += layer.bias.transpose();
  return a;
}

struct LayerCache {
  Eigen::MatrixXd input;
  Eigen::MatrixXd xhat;
  Eigen::RowVectorXd inv_std;
  Eigen::MatrixXd pre_relu;
  Eigen::MatrixXd mask;
};

}  // namespace

Eigen::VectorXd Mlp::logits(const Eigen::MatrixXd& x) const {
  check_width(*this, x);
  Eigen::MatrixXd h = x;
  for (std::size_t l = 0; l + 1 < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    Eigen::MatrixXd a = affine(h, layer);
    if (layer.batch_norm) {
      const Eigen::RowVectorXd inv_std =
          (layer.running_var.array() + bn_epsilon_).rsqrt().matrix().transpose();
      a = ((a.rowwise() - layer.running_mean.transpose()).array().rowwise() * inv_std.array())
              .rowwise() *
          layer.gamma.transpose().array();
      a.rowwise() += layer.beta.transpose();
    }
    h = a.cwiseMax(0.0);
  }
  return affine(h, layers_.back()).col(0);
}

double weighted_bce(const Eigen::VectorXd& logits, std::span<const double> targets,
                    double pos_weight) {
  if (static_cast<std::size_t>(logits.size()) != targets.size() || targets.empty()) {
    throw ShapeError("logits and targets differ in length");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double z = logits(static_cast<Eigen::Index>(i));
    const double y = targets[i];
    sum += pos_weight * y * softplus(-z) + (1.0 - y) * softplus(z);
  }
  return sum / static_cast<double>(targets.size());
}

double loss_and_gradients(Mlp& net, const Eigen::MatrixXd& x, std::span<const double> targets,
                          double pos_weight, const ForwardMode& mode, Rng* dropout_rng,
                          std::vector<LayerGradients>* grads) {
  check_width(net, x);
  const Eigen::Index b = x.rows();
  if (b == 0 || static_cast<std::size_t>(b) != targets.size()) {
    throw ShapeError("batch and targets differ in length");
  }
  auto& layers = net.layers();
  const std::size_t n_hidden = layers.size() - 1;
  std::vector<LayerCache> caches(n_hidden);

  Eigen::MatrixXd h = x;
  for (std::size_t l = 0; l < n_hidden; ++l) {
    auto& layer = layers[l];
    auto& c = caches[l];
    c.input = std::move(h);
    Eigen::MatrixXd a = affine(c.input, layer);
    if (layer.batch_norm) {
      Eigen::RowVectorXd mean;
      Eigen::RowVectorXd var;
      if (mode.batch_statistics) {
        mean = a.colwise().mean();
        var = (a.rowwise() - mean).array().square().colwise().mean().matrix();
        if (mode.update_running) {
          const double m = net.bn_momentum();
          const double unbias = b > 1 ? static_cast<double>(b) / static_cast<double>(b - 1) : 1.0;
          layer.running_mean = (1.0 - m) * layer.running_mean + m * mean.transpose();
          layer.running_var = (1.0 - m) * layer.running_var + m * unbias * var.transpose();
        }
      } else {
        mean = layer.running_mean.transpose();
        var = layer.running_var.transpose();
      }
      c.inv_std = (var.array() + net.bn_epsilon()).rsqrt().matrix();
      c.xhat = ((a.rowwise() - mean).array().rowwise() * c.inv_std.array()).matrix();
      a = (c.xhat.array().rowwise() * layer.gamma.transpose().array()).matrix();
      a.rowwise() += layer.beta.transpose();
    }
    c.pre_relu = a;
    h = a.cwiseMax(0.0);
    if (mode.dropout && layer.dropout > 0.0) {
      if (dropout_rng == nullptr) throw ArgumentError("dropout needs a random generator");
      const double scale = 1.0 / (1.0 - layer.dropout);
      c.mask.resize(h.rows(), h.cols());
      for (Eigen::Index i = 0; i < h.rows(); ++i) {
        for (Eigen::Index j = 0; j < h.cols(); ++j) {
          c.mask(i, j) = dropout_rng->uniform() < layer.dropout ? 0.0 : scale;
        }
      }
      h = h.cwiseProduct(c.mask);
    }
  }
  auto& out_layer = layers.back();
  const Eigen::VectorXd z = affine(h, out_layer).col(0);
  const double loss = weighted_bce(z, targets, pos_weight);
  if (grads == nullptr) return loss;

  grads->assign(layers.size(), LayerGradients{});
  Eigen::MatrixXd dz(b, 1);
  for (Eigen::Index i = 0; i < b; ++i) {
    const double y = targets[static_cast<std::size_t>(i)];
    const double s = sigmoid(z(i));
    dz(i, 0) = (pos_weight * y * (s - 1.0) + (1.0 - y) * s) / static_cast<double>(b);
  }
  auto& g_out = grads->back();
  g_out.weight = dz.transpose() * h;
  g_out.bias = dz.colwise().sum().transpose();
  Eigen::MatrixXd dh = dz * out_layer.weight;

  for (std::size_t l = n_hidden; l-- > 0;) {
    const auto& layer = layers[l];
    const auto& c = caches[l];
    auto& g = (*grads)[l];
    if (c.mask.size() > 0) dh = dh.cwiseProduct(c.mask);
    Eigen::MatrixXd da = (c.pre_relu.array() > 0.0).select(dh, 0.0);
    if (layer.batch_norm) {
      g.gamma = da.cwiseProduct(c.xhat).colwise().sum().transpose();
      g.beta = da.colwise().sum().transpose();
      const Eigen::MatrixXd dxhat =
          (da.array().rowwise() * layer.gamma.transpose().array()).matrix();
      if (mode.batch_statistics) {
        const double n = static_cast<double>(b);
        const Eigen::RowVectorXd sum_d = dxhat.colwise().sum();
        const Eigen::RowVectorXd sum_dx = dxhat.cwiseProduct(c.xhat).colwise().sum();
        Eigen::MatrixXd t = n * dxhat;
        t.rowwise() -= sum_d;
        t -= (c.xhat.array().rowwise() * sum_dx.array()).matrix();
        da = (t.array().rowwise() * (c.inv_std.array() / n)).matrix();
      } else {
        da = (dxhat.array().rowwise() * c.inv_std.array()).matrix();
      }
    }
    g.weight = da.transpose() * c.input;
    g.bias = da.colwise().sum().transpose();
    if (l > 0) dh = da * layer.weight;
  }
  return loss;
}

std::vector<double*> parameter_pointers(Mlp& net) {
  std::vector<double*> out;
  auto push = [&](auto& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) out.push_back(m.data() + i);
  };
  for (auto& layer : net.layers()) {
    push(layer.weight);
    push(layer.bias);
    if (layer.batch_norm) {
      push(layer.gamma);
      push(layer.beta);
    }
  }
  return out;
}

std::vector<double> flatten_gradients(const std::vector<LayerGradients>& grads) {
  std::vector<double> out;
  auto push = [&](const auto& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) out.push_back(m.data()[i]);
  };
  for (const auto& g : grads) {
    push(g.weight);
    push(g.bias);
    push(g.gamma);
    push(g.beta);
  }
  return out;
}

double selection_ef1(std::span<const double> scores, std::span<const int> labels,
                     std::span<const std::string> target_ids,
                     std::span<const std::string> ligand_ids) {
  if (scores.size() != labels.size() || target_ids.size() != labels.size() ||
      ligand_ids.size() != labels.size()) {
    throw ShapeError("scores, labels and ids differ in length");
  }
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < labels.size(); ++i) groups[target_ids[i]].push_back(i);
  std::vector<double> efs;
  std::vector<double> s;
  std::vector<int> y;
  std::vector<std::string> ids;
  for (const auto& [target, rows] : groups) {
    s.clear();
    y.clear();
    ids.clear();
    for (auto r : rows) {
      s.push_back(scores[r]);
      y.push_back(labels[r]);
      ids.push_back(ligand_ids[r]);
    }
    if (std::find(y.begin(), y.end(), 1) == y.end()) continue;
    efs.push_back(enrichment_factor(ranked_library_from_scores(s, y, ids), 1.0));
  }
  if (efs.empty()) throw ArgumentError("validation set holds no actives");
  return median(efs);
}

namespace {

struct AdamState {
  std::vector<LayerGradients> m;
  std::vector<LayerGradients> v;
  std::size_t t = 0;
};

AdamState zero_state(const Mlp& net) {
  AdamState s;
  for (const auto& layer : net.layers()) {
    LayerGradients g;
    g.weight = Eigen::MatrixXd::Zero(layer.weight.rows(), layer.weight.cols());
    g.bias = Eigen::VectorXd::Zero(layer.bias.size());
    if (layer.batch_norm) {
      g.gamma = Eigen::VectorXd::Zero(layer.gamma.size());
      g.beta = Eigen::VectorXd::Zero(layer.beta.size());
    }
    s.m.push_back(g);
    s.v.push_back(g);
  }
  return s;
}

template <typename P, typename G>
void adam_update(P& p, const G& g, P& m, P& v, const NetConfig& cfg, double bc1, double bc2,
                 bool decay) {
  if (decay && cfg.weight_decay > 0.0) p *= (1.0 - cfg.learning_rate * cfg.weight_decay);
  m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
  v = cfg.beta2 * v + (1.0 - cfg.beta2) * g.cwiseProduct(g);
  p.array() -= cfg.learning_rate * (m.array() / bc1) / ((v.array() / bc2).sqrt() + cfg.epsilon);
}

void adam_step(Mlp& net, const std::vector<LayerGradients>& grads, AdamState& st,
               const NetConfig& cfg) {
  ++st.t;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(st.t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(st.t));
  auto& layers = net.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    auto& layer = layers[l];
    const auto& g = grads[l];
    adam_update(layer.weight, g.weight, st.m[l].weight, st.v[l].weight, cfg, bc1, bc2, true);
    adam_update(layer.bias, g.bias, st.m[l].bias, st.v[l].bias, cfg, bc1, bc2, false);
    if (layer.batch_norm) {
      adam_update(layer.gamma, g.gamma, st.m[l].gamma, st.v[l].gamma, cfg, bc1, bc2, false);
      adam_update(layer.beta, g.beta, st.m[l].beta, st.v[l].beta, cfg, bc1, bc2, false);
    }
  }
}

}  // namespace

TrainingResult train_mlp(const TrainingSet& train, const TrainingSet& validation,
                         const NetConfig& config) {
  config.validate();
  if (train.x == nullptr || train.x->rows() == 0) throw ArgumentError("empty training set");
  if (validation.x == nullptr || validation.x->rows() == 0) {
    throw ArgumentError("empty validation set");
  }
  const auto n = static_cast<std::size_t>(train.x->rows());
  if (train.labels.size() != n) throw ShapeError("training labels do not match the matrix");
  if (validation.x->cols() != train.x->cols()) {
    throw ShapeError("training and validation matrices differ in width");
  }
  const auto n_pos = static_cast<std::size_t>(std::count(train.labels.begin(), train.labels.end(), 1));
  if (n_pos == 0 || n_pos == n) throw ArgumentError("training set needs both classes");

  TrainingResult result;
  result.pos_weight = static_cast<double>(n - n_pos) / static_cast<double>(n_pos);

  Rng init(derive_seed(config.seed, 0));
  Rng shuffler(derive_seed(config.seed, 1));
  Rng dropout(derive_seed(config.seed, 2));
  Mlp net(static_cast<std::size_t>(train.x->cols()), config, init);
  AdamState state = zero_state(net);

  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = train.labels[i] == 1 ? 1.0 : 0.0;
  const std::size_t batch = (n + config.n_batches - 1) / config.n_batches;

  std::vector<std::size_t> perm(n);
  std::vector<double> yb;
  std::vector<double> val_scores(static_cast<std::size_t>(validation.x->rows()));
  std::vector<LayerGradients> grads;
  Eigen::MatrixXd xb;
  double best = -std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    shuffler.shuffle(std::span<std::size_t>(perm));
    double loss_sum = 0.0;
    std::size_t batch_no = 0;
    for (std::size_t start = 0; start < n; start += batch) {
      ++batch_no;
      const std::size_t end = std::min(n, start + batch);
      xb.resize(static_cast<Eigen::Index>(end - start), train.x->cols());
      yb.clear();
      for (std::size_t i = start; i < end; ++i) {
        xb.row(static_cast<Eigen::Index>(i - start)) = train.x->row(static_cast<Eigen::Index>(perm[i]));
        yb.push_back(y[perm[i]]);
      }
      const double loss =
          loss_and_gradients(net, xb, yb, result.pos_weight, ForwardMode{}, &dropout, &grads);
      if (!std::isfinite(loss)) {
        throw TrainingError(
            fmt::format("non-finite training loss at epoch {} batch {}", epoch, batch_no));
      }
      adam_step(net, grads, state, config);
      loss_sum += loss * static_cast<double>(end - start);
    }

    const Eigen::VectorXd z = net.logits(*validation.x);
    for (std::size_t i = 0; i < val_scores.size(); ++i) {
      val_scores[i] = z(static_cast<Eigen::Index>(i));
      if (!std::isfinite(val_scores[i])) {
        throw TrainingError(fmt::format("non-finite validation score after epoch {}", epoch));
      }
    }
    EpochLog rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(n);
    rec.validation_ef1 =
        selection_ef1(val_scores, validation.labels, validation.target_ids, validation.ligand_ids);
    if (rec.validation_ef1 > best) {
      best = rec.validation_ef1;
      rec.best = true;
      result.network = net;
      result.best_epoch = epoch;
      since_best = 0;
    } else {
      ++since_best;
    }
    result.log.push_back(rec);
    if (since_best >= config.patience) break;
  }
  return result;
}

}  // namespace vscreen::ml
