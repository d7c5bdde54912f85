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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vscreen/rng.hpp"

namespace vscreen::ml {

struct NetConfig {
  std::string name = "wnn";
  /// Hidden widths followed by the single output unit.
  std::vector<std::size_t> widths{512, 256, 128, 1};
  std::vector<double> dropout{0.3, 0.21, 0.15};  ///< one per hidden layer
  std::vector<bool> batch_norm{true, true, true};
  double learning_rate = 1e-3;
  double weight_decay = 1e-5;  ///< decoupled, weight matrices only
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double bn_momentum = 0.1;
  double bn_epsilon = 1e-5;
  std::size_t n_batches = 4;  ///< batch size = ceil(N_train / n_batches)
  std::size_t max_epochs = 30;
  std::size_t patience = 5;
  std::uint64_t seed = 0;

  /// 512-256-128-1 with batch norm and dropout 0.3 / 0.21 / 0.15.
  static NetConfig wide();
  /// 256-128-64-1 without batch norm, dropout 0.3 / 0.2 / 0.1.
  static NetConfig deep();

  std::size_t n_hidden() const { return widths.empty() ? 0 : widths.size() - 1; }
  /// Throws ArgumentError.
  void validate() const;
  bool operator==(const NetConfig&) const = default;
};

struct DenseLayer {
  Eigen::MatrixXd weight;  ///< out x in
  Eigen::VectorXd bias;
  double dropout = 0.0;
  bool batch_norm = false;
  Eigen::VectorXd gamma;
  Eigen::VectorXd beta;
  Eigen::VectorXd running_mean;
  Eigen::VectorXd running_var;
};

/// Feed-forward network: hidden layers Linear -> [BatchNorm] -> ReLU ->
/// Dropout, then a single linear output unit producing a logit.
class Mlp {
 public:
  Mlp() = default;
  /// He-normal weights drawn layer by layer in row-major order; zero biases.
  Mlp(std::size_t n_inputs, const NetConfig& config, Rng& init);
  explicit Mlp(std::vector<DenseLayer> layers, double bn_momentum = 0.1, double bn_epsilon = 1e-5);

  std::size_t n_inputs() const;
  double bn_momentum() const { return bn_momentum_; }
  double bn_epsilon() const { return bn_epsilon_; }
  std::vector<DenseLayer>& layers() { return layers_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }

  /// Inference: dropout off, batch norm on running statistics. Rows are
  /// samples. Throws ShapeError on a width mismatch.
  Eigen::VectorXd logits(const Eigen::MatrixXd& x) const;

 private:
  std::vector<DenseLayer> layers_;
  double bn_momentum_ = 0.1;
  double bn_epsilon_ = 1e-5;
};

struct LayerGradients {
  Eigen::MatrixXd weight;
  Eigen::VectorXd bias;
  Eigen::VectorXd gamma;
  Eigen::VectorXd beta;
};

struct ForwardMode {
  bool dropout = true;
  bool batch_statistics = true;  ///< false: normalise with running statistics
  bool update_running = true;
};

/// Positive-weighted binary cross-entropy on logits, averaged over rows:
/// mean(w * y * softplus(-z) + (1 - y) * softplus(z)).
double weighted_bce(const Eigen::VectorXd& logits, std::span<const double> targets,
                    double pos_weight);

/// One forward/backward pass over a batch. Returns the loss; fills `grads`
/// (one entry per layer) when non-null. `dropout_rng` is required when
/// mode.dropout is set.
double loss_and_gradients(Mlp& net, const Eigen::MatrixXd& x, std::span<const double> targets,
                          double pos_weight, const ForwardMode& mode, Rng* dropout_rng,
                          std::vector<LayerGradients>* grads);

/// Every trainable scalar, layer by layer: weight (column-major), bias,
/// then gamma and beta for batch-norm layers. flatten_gradients uses the
/// same order.
std::vector<double*> parameter_pointers(Mlp& net);
std::vector<double> flatten_gradients(const std::vector<LayerGradients>& grads);

struct EpochLog {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double validation_ef1 = 0.0;
  bool best = false;
};

struct TrainingResult {
  Mlp network;  ///< parameters of the best epoch
  std::vector<EpochLog> log;
  std::size_t best_epoch = 0;
  double pos_weight = 1.0;
};

/// EF1% used for model selection: per-target EF1% (ties by ligand id) and
/// the median over targets that hold at least one active.
double selection_ef1(std::span<const double> scores, std::span<const int> labels,
                     std::span<const std::string> target_ids,
                     std::span<const std::string> ligand_ids);

struct TrainingSet {
  const Eigen::MatrixXd* x = nullptr;  ///< scaled features, rows are samples
  std::span<const int> labels;
  std::span<const std::string> target_ids;  ///< validation only
  std::span<const std::string> ligand_ids;  ///< validation only
};

/// Adam with decoupled weight decay, per-epoch seeded shuffling, early
/// stopping on validation EF1%. Throws TrainingError on a non-finite loss,
/// ArgumentError on an empty validation set or a train set without both
/// classes.
TrainingResult train_mlp(const TrainingSet& train, const TrainingSet& validation,
                         const NetConfig& config);

}  // namespace vscreen::ml
