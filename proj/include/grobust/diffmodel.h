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

// Small differentiable classifiers with exact analytic gradients.
//
// Two architectures are supported: multinomial logistic regression and a
// one-hidden-layer tanh network. Both the predictor and the group assigner
// are represented by `Model`; gradients reuse the same type.

#ifndef GROBUST_DIFFMODEL_H_
#define GROBUST_DIFFMODEL_H_

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "grobust/random.h"

namespace grobust {

enum class Architecture { kLinear, kOneHidden };

std::string ArchitectureName(Architecture arch);
Architecture ParseArchitecture(const std::string& name);

// Weight is [out x in], bias is [out].
struct Layer {
  Eigen::MatrixXd weight;
  Eigen::VectorXd bias;
};

class Model {
 public:
  Model() = default;

  // All-zero parameters.
  static Model Zeros(Architecture arch, int input_dim, int num_classes,
                     int hidden_units = 32);
  // Entries uniform in [-init_scale, init_scale].
  static Model Random(Architecture arch, int input_dim, int num_classes,
                      Rng& rng, double init_scale = 0.1,
                      int hidden_units = 32);

  Architecture architecture() const { return arch_; }
  int input_dim() const;
  int num_classes() const;
  int hidden_units() const;

  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }

  std::size_t NumParameters() const;
  // Row-major weights then bias, layer by layer.
  Eigen::VectorXd Flatten() const;
  void Unflatten(const Eigen::VectorXd& values);

  bool AllFinite() const;
  bool SameShape(const Model& other) const;
  double MaxAbsDifference(const Model& other) const;

 private:
  Model(Architecture arch, std::vector<Layer> layers)
      : arch_(arch), layers_(std::move(layers)) {}

  Architecture arch_ = Architecture::kLinear;
  std::vector<Layer> layers_;
};

struct PredictionBatch {
  Eigen::MatrixXd logits;         // [n x C]
  Eigen::MatrixXd probabilities;  // [n x C], rows on the simplex
};

struct LossResult {
  double total = 0.0;
  Eigen::VectorXd per_example;
};

// Throws DimensionError when the feature width does not match the model.
PredictionBatch Forward(const Model& model, const Eigen::MatrixXd& features);

// Soft-target cross-entropy. `targets` rows are distributions over classes
// (one-hot for hard labels). total = sum_i w_i l_i / sum_i w_i.
LossResult WeightedSoftCrossEntropy(const PredictionBatch& pred,
                                    const Eigen::MatrixXd& targets,
                                    const Eigen::VectorXd& weights);

// Per-example cross-entropy without weighting.
Eigen::VectorXd PerExampleLoss(const PredictionBatch& pred,
                               const Eigen::MatrixXd& targets);

// Backpropagates an upstream gradient on the logits through the model.
Model Backward(const Model& model, const Eigen::MatrixXd& features,
               const Eigen::MatrixXd& logit_grad);

// Gradient of WeightedSoftCrossEntropy with respect to every parameter.
Model LossGradient(const Model& model, const Eigen::MatrixXd& features,
                   const Eigen::MatrixXd& targets,
                   const Eigen::VectorXd& weights);

// params - lr * gradient. Throws NonFiniteError on a NaN/Inf gradient.
Model SgdStep(const Model& params, const Model& gradient, double lr);

// gradient += decay * weight for every weight matrix (biases untouched).
void AddWeightDecay(const Model& params, double decay, Model& gradient);

Eigen::MatrixXd OneHot(const std::vector<int>& labels, int num_classes);

// Checks that every row is nonnegative and sums to one within `tol`.
void ValidateSoftLabels(const Eigen::MatrixXd& targets, double tol = 1e-9);

std::vector<int> ArgmaxRows(const Eigen::MatrixXd& m);

}  // namespace grobust

#endif  // GROBUST_DIFFMODEL_H_
