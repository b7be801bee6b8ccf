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

// Trainers: ERM, group DRO with true groups, CVaR, JTT and the two-player
// Q-Diversity loop with a learned assigner and cross-group mixing.

#ifndef GROBUST_DRO_H_
#define GROBUST_DRO_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "grobust/assigner.h"
#include "grobust/datasets.h"
#include "grobust/diffmodel.h"
#include "grobust/group_losses.h"
#include "grobust/mixing.h"

namespace grobust {

enum class Method { kErm, kOracleDro, kCvar, kJtt, kQDiversity };

std::string MethodName(Method method);
Method ParseMethod(const std::string& name);

struct TrainConfig {
  Method method = Method::kErm;
  int epochs = 30;
  int batch_size = 64;
  double lr = 0.01;
  double weight_decay = 0.1;
  Architecture architecture = Architecture::kLinear;
  int hidden_units = 32;
  double init_scale = 0.1;
  std::uint64_t seed = 0;

  // Group weights.
  double q_step = 0.1;
  GroupMode group_mode = GroupMode::kGhatByLabel;

  // Assigner.
  double assigner_lr = 0.01;
  int assigner_steps = 5;
  double beta = 1.0;
  double assigner_prior = 0.2;
  AssignerObjective assigner_objective = AssignerObjective::kAdversarial;
  AssignerFeatures assigner_features = AssignerFeatures::kLabelConditioned;

  MixSpec mix;

  double cvar_alpha = 0.2;
  int jtt_epochs = 2;
  double jtt_upweight = 20.0;

  void Validate() const;
};

struct EpochRecord {
  int epoch = 0;
  double average_accuracy = 0.0;
  double robust_accuracy = 0.0;  // NaN when the monitor set has no groups
  Eigen::VectorXd group_losses;  // groups used by the trainer
  Eigen::VectorXd q;             // empty for ungrouped trainers
};

struct TrainResult {
  Model theta;
  std::optional<Model> phi;
  std::optional<GroupAssignment> assignment;
  std::vector<std::size_t> error_set;  // JTT only
  std::vector<EpochRecord> history;
  std::vector<std::string> log;
};

struct TrainOptions {
  // Evaluated after every epoch for the history. Defaults to the training
  // data.
  const Dataset* monitor = nullptr;
};

struct EvalResult {
  double average = 0.0;
  double robust = 0.0;
  std::vector<double> per_group;  // NaN for empty groups
  std::vector<std::size_t> group_sizes;
};

// Needs true group labels.
EvalResult Evaluate(const Model& theta, const Dataset& data);

TrainResult TrainErm(const Dataset& data, const TrainConfig& cfg,
                     const TrainOptions& options = {});
TrainResult TrainOracleDro(const Dataset& data, const TrainConfig& cfg,
                           const TrainOptions& options = {});
TrainResult TrainCvar(const Dataset& data, const TrainConfig& cfg,
                      const TrainOptions& options = {});
TrainResult TrainJtt(const Dataset& data, const TrainConfig& cfg,
                     const TrainOptions& options = {});
TrainResult TrainQDiversity(const Dataset& data, const TrainConfig& cfg,
                            const TrainOptions& options = {});

// Dispatches on cfg.method.
TrainResult Train(const Dataset& data, const TrainConfig& cfg,
                  const TrainOptions& options = {});

// Indices of the ceil(alpha * n) largest losses, ties broken by index.
std::vector<std::size_t> TopLossIndices(const Eigen::VectorXd& losses,
                                        double alpha);

}  // namespace grobust

#endif  // GROBUST_DRO_H_
