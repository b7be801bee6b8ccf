// Copyright 2026 The grobust Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "grobust/diffmodel.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "grobust/error.h"

namespace grobust {
namespace {

constexpr double kLogProbFloor = -27.631021115928547;  // log(1e-12)

std::string Shape(const Eigen::MatrixXd& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

Eigen::MatrixXd HiddenActivations(const Layer& layer,
                                  const Eigen::MatrixXd& features) {
  Eigen::MatrixXd a = features * layer.weight.transpose();
  a.rowwise() += layer.bias.transpose();
  return a.array().tanh().matrix();
}

}  // namespace

std::string ArchitectureName(Architecture arch) {
  return arch == Architecture::kLinear ? "linear" : "one_hidden";
}

Architecture ParseArchitecture(const std::string& name) {
  if (name == "linear") return Architecture::kLinear;
  if (name == "one_hidden") return Architecture::kOneHidden;
  throw InvalidArgument("unknown architecture '" + name +
                        "' (expected linear or one_hidden)");
}

Model Model::Zeros(Architecture arch, int input_dim, int num_classes,
                   int hidden_units) {
  if (input_dim < 1 || num_classes < 2) {
    throw InvalidArgument("model needs input_dim >= 1 and num_classes >= 2");
  }
  std::vector<Layer> layers;
  if (arch == Architecture::kLinear) {
    layers.push_back({Eigen::MatrixXd::Zero(num_classes, input_dim),
                      Eigen::VectorXd::Zero(num_classes)});
  } else {
    if (hidden_units < 1) throw InvalidArgument("hidden_units must be >= 1");
    layers.push_back({Eigen::MatrixXd::Zero(hidden_units, input_dim),
                      Eigen::VectorXd::Zero(hidden_units)});
    layers.push_back({Eigen::MatrixXd::Zero(num_classes, hidden_units),
                      Eigen::VectorXd::Zero(num_classes)});
  }
  return Model(arch, std::move(layers));
}

Model Model::Random(Architecture arch, int input_dim, int num_classes,
                    Rng& rng, double init_scale, int hidden_units) {
  Model model = Zeros(arch, input_dim, num_classes, hidden_units);
  for (Layer& layer : model.layers_) {
    // Row-major fill order so the draw sequence is layout independent.
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
        layer.weight(r, c) = init_scale * (2.0 * UniformUnit(rng) - 1.0);
      }
    }
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) {
      layer.bias(r) = init_scale * (2.0 * UniformUnit(rng) - 1.0);
    }
  }
  return model;
}

int Model::input_dim() const {
  return static_cast<int>(layers_.front().weight.cols());
}

int Model::num_classes() const {
  return static_cast<int>(layers_.back().weight.rows());
}

int Model::hidden_units() const {
  return arch_ == Architecture::kOneHidden
             ? static_cast<int>(layers_.front().weight.rows())
             : 0;
}

std::size_t Model::NumParameters() const {
  std::size_t n = 0;
  for (const Layer& layer : layers_) {
    n += layer.weight.size() + layer.bias.size();
  }
  return n;
}

Eigen::VectorXd Model::Flatten() const {
  Eigen::VectorXd out(NumParameters());
  Eigen::Index k = 0;
  for (const Layer& layer : layers_) {
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
        out(k++) = layer.weight(r, c);
      }
    }
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) out(k++) = layer.bias(r);
  }
  return out;
}

void Model::Unflatten(const Eigen::VectorXd& values) {
  if (static_cast<std::size_t>(values.size()) != NumParameters()) {
    throw DimensionError("Unflatten: expected " +
                         std::to_string(NumParameters()) + " values, got " +
                         std::to_string(values.size()));
  }
  Eigen::Index k = 0;
  for (Layer& layer : layers_) {
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
        layer.weight(r, c) = values(k++);
      }
    }
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) layer.bias(r) = values(k++);
  }
}

bool Model::AllFinite() const {
  for (const Layer& layer : layers_) {
    if (!layer.weight.allFinite() || !layer.bias.allFinite()) return false;
  }
  return true;
}

bool Model::SameShape(const Model& other) const {
  if (arch_ != other.arch_ || layers_.size() != other.layers_.size()) {
    return false;
  }
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (layers_[i].weight.rows() != other.layers_[i].weight.rows() ||
        layers_[i].weight.cols() != other.layers_[i].weight.cols()) {
      return false;
    }
  }
  return true;
}

double Model::MaxAbsDifference(const Model& other) const {
  if (!SameShape(other)) {
    throw DimensionError("MaxAbsDifference: models differ in shape");
  }
  return (Flatten() - other.Flatten()).cwiseAbs().maxCoeff();
}

PredictionBatch Forward(const Model& model, const Eigen::MatrixXd& features) {
  if (features.cols() != model.input_dim()) {
    throw DimensionError("forward: expected " +
                         std::to_string(model.input_dim()) +
                         " feature columns, got " +
                         std::to_string(features.cols()));
  }
  const auto& layers = model.layers();
  PredictionBatch out;
  if (model.architecture() == Architecture::kLinear) {
    out.logits = features * layers[0].weight.transpose();
    out.logits.rowwise() += layers[0].bias.transpose();
  } else {
    const Eigen::MatrixXd hidden = HiddenActivations(layers[0], features);
    out.logits = hidden * layers[1].weight.transpose();
    out.logits.rowwise() += layers[1].bias.transpose();
  }
  const Eigen::VectorXd row_max = out.logits.rowwise().maxCoeff();
  Eigen::MatrixXd shifted = out.logits.colwise() - row_max;
  out.probabilities = shifted.array().exp().matrix();
  const Eigen::VectorXd sums = out.probabilities.rowwise().sum();
  for (Eigen::Index i = 0; i < out.probabilities.rows(); ++i) {
    out.probabilities.row(i) /= sums(i);
  }
  return out;
}

Eigen::VectorXd PerExampleLoss(const PredictionBatch& pred,
                               const Eigen::MatrixXd& targets) {
  if (targets.rows() != pred.logits.rows() ||
      targets.cols() != pred.logits.cols()) {
    throw DimensionError("loss: targets are " + Shape(targets) +
                         " but predictions are " + Shape(pred.logits));
  }
  const Eigen::Index n = pred.logits.rows();
  const Eigen::Index num_classes = pred.logits.cols();
  Eigen::VectorXd losses(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double row_max = pred.logits.row(i).maxCoeff();
    double sum = 0.0;
    for (Eigen::Index c = 0; c < num_classes; ++c) {
      sum += std::exp(pred.logits(i, c) - row_max);
    }
    const double log_norm = row_max + std::log(sum);
    double loss = 0.0;
    for (Eigen::Index c = 0; c < num_classes; ++c) {
      const double t = targets(i, c);
      if (t == 0.0) continue;
      loss -= t * std::max(pred.logits(i, c) - log_norm, kLogProbFloor);
    }
    losses(i) = loss;
  }
  return losses;
}

LossResult WeightedSoftCrossEntropy(const PredictionBatch& pred,
                                    const Eigen::MatrixXd& targets,
                                    const Eigen::VectorXd& weights) {
  if (weights.size() != pred.logits.rows()) {
    throw DimensionError("loss: " + std::to_string(weights.size()) +
                         " weights for " + std::to_string(pred.logits.rows()) +
                         " examples");
  }
  if ((weights.array() < 0.0).any()) {
    throw InvalidArgument("loss: sample weights must be nonnegative");
  }
  const double weight_sum = weights.sum();
  if (!(weight_sum > 0.0)) {
    throw InvalidArgument("loss: sample weights sum to zero");
  }
  LossResult result;
  result.per_example = PerExampleLoss(pred, targets);
  result.total = weights.dot(result.per_example) / weight_sum;
  return result;
}

Model Backward(const Model& model, const Eigen::MatrixXd& features,
               const Eigen::MatrixXd& logit_grad) {
  if (features.cols() != model.input_dim()) {
    throw DimensionError("backward: expected " +
                         std::to_string(model.input_dim()) +
                         " feature columns, got " +
                         std::to_string(features.cols()));
  }
  if (logit_grad.rows() != features.rows() ||
      logit_grad.cols() != model.num_classes()) {
    throw DimensionError("backward: logit gradient is " + Shape(logit_grad));
  }
  Model grad = model;
  auto& g = grad.layers();
  const auto& layers = model.layers();
  if (model.architecture() == Architecture::kLinear) {
    g[0].weight.noalias() = logit_grad.transpose() * features;
    g[0].bias = logit_grad.colwise().sum().transpose();
    return grad;
  }
  const Eigen::MatrixXd hidden = HiddenActivations(layers[0], features);
  g[1].weight.noalias() = logit_grad.transpose() * hidden;
  g[1].bias = logit_grad.colwise().sum().transpose();
  Eigen::MatrixXd pre_grad = logit_grad * layers[1].weight;
  pre_grad.array() *= 1.0 - hidden.array().square();
  g[0].weight.noalias() = pre_grad.transpose() * features;
  g[0].bias = pre_grad.colwise().sum().transpose();
  return grad;
}

Model LossGradient(const Model& model, const Eigen::MatrixXd& features,
                   const Eigen::MatrixXd& targets,
                   const Eigen::VectorXd& weights) {
  const PredictionBatch pred = Forward(model, features);
  if (targets.rows() != pred.logits.rows() ||
      targets.cols() != pred.logits.cols()) {
    throw DimensionError("gradient: targets are " + Shape(targets) +
                         " but predictions are " + Shape(pred.logits));
  }
  if (weights.size() != features.rows()) {
    throw DimensionError("gradient: weight count does not match examples");
  }
  if ((weights.array() < 0.0).any()) {
    throw InvalidArgument("gradient: sample weights must be nonnegative");
  }
  const double weight_sum = weights.sum();
  if (!(weight_sum > 0.0)) {
    throw InvalidArgument("gradient: sample weights sum to zero");
  }
  // d/dz of -sum_c t_c log softmax(z)_c is p * sum(t) - t.
  Eigen::MatrixXd logit_grad(pred.logits.rows(), pred.logits.cols());
  for (Eigen::Index i = 0; i < logit_grad.rows(); ++i) {
    const double scale = weights(i) / weight_sum;
    const double mass = targets.row(i).sum();
    logit_grad.row(i) =
        scale * (pred.probabilities.row(i) * mass - targets.row(i));
  }
  return Backward(model, features, logit_grad);
}

Model SgdStep(const Model& params, const Model& gradient, double lr) {
  if (!(lr > 0.0)) throw InvalidArgument("sgd_step: lr must be positive");
  if (!params.SameShape(gradient)) {
    throw DimensionError("sgd_step: gradient shape does not match params");
  }
  if (!gradient.AllFinite()) {
    throw NonFiniteError("sgd_step: non-finite gradient");
  }
  Model out = params;
  for (std::size_t l = 0; l < out.layers().size(); ++l) {
    out.layers()[l].weight -= lr * gradient.layers()[l].weight;
    out.layers()[l].bias -= lr * gradient.layers()[l].bias;
  }
  return out;
}

void AddWeightDecay(const Model& params, double decay, Model& gradient) {
  if (decay == 0.0) return;
  for (std::size_t l = 0; l < gradient.layers().size(); ++l) {
    gradient.layers()[l].weight += decay * params.layers()[l].weight;
  }
}

Eigen::MatrixXd OneHot(const std::vector<int>& labels, int num_classes) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(
      static_cast<Eigen::Index>(labels.size()), num_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= num_classes) {
      throw InvalidArgument("label " + std::to_string(labels[i]) +
                            " outside [0, " + std::to_string(num_classes) +
                            ")");
    }
    out(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
  }
  return out;
}

void ValidateSoftLabels(const Eigen::MatrixXd& targets, double tol) {
  for (Eigen::Index i = 0; i < targets.rows(); ++i) {
    if ((targets.row(i).array() < 0.0).any()) {
      throw InvalidArgument("soft label row " + std::to_string(i) +
                            " has a negative entry");
    }
    if (std::abs(targets.row(i).sum() - 1.0) > tol) {
      throw InvalidArgument("soft label row " + std::to_string(i) +
                            " does not sum to 1");
    }
  }
}

std::vector<int> ArgmaxRows(const Eigen::MatrixXd& m) {
  std::vector<int> out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Eigen::Index best;
    m.row(i).maxCoeff(&best);
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

}  // namespace grobust
