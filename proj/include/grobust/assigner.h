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

// The learned group assigner: a two-class model over (x, y) whose class 0
// probability is the chance that an example belongs to the minority side.

#ifndef GROBUST_ASSIGNER_H_
#define GROBUST_ASSIGNER_H_

#include <string>

#include <Eigen/Dense>

#include "grobust/assignment.h"
#include "grobust/datasets.h"
#include "grobust/diffmodel.h"
#include "grobust/group_losses.h"
#include "grobust/random.h"

namespace grobust {

// kConcat:           [x, onehot(y)], width d + C
// kLabelConditioned: [x * onehot(y) blocks, onehot(y)], width d * C + C.
// The second lets a linear assigner use a different direction per label,
// which is what "attribute disagrees with label" requires.
enum class AssignerFeatures { kConcat, kLabelConditioned };

std::string AssignerFeaturesName(AssignerFeatures mode);
AssignerFeatures ParseAssignerFeatures(const std::string& name);

int AssignerInputDim(int d, int num_classes, AssignerFeatures mode);
Eigen::MatrixXd AssignerInput(const Dataset& data, AssignerFeatures mode);

// Linear two-class model with small random weights. The bias is set so a
// zero input maps to p_minority = prior.
Model InitAssigner(int d, int num_classes, AssignerFeatures mode, Rng& rng,
                   double prior, double init_scale = 0.1);

GroupAssignment Assign(const Model& phi, const Dataset& data,
                       AssignerFeatures mode);

struct LabelMarginals {
  Eigen::VectorXd given_majority;  // P(y | ghat = 1)
  Eigen::VectorXd given_minority;  // P(y | ghat = 0)
  Eigen::VectorXd overall;         // P(y)
};

// Soft-count Bayes rule. Throws DegenerateAssignmentError when one side has
// no probability mass.
LabelMarginals ConditionalLabelMarginals(const GroupAssignment& assignment,
                                         const std::vector<int>& labels,
                                         int num_classes);

// KL(P(y|ghat=1) || P(y)) + KL(P(y|ghat=0) || P(y)), with 0 log 0 = 0.
double BalanceLoss(const LabelMarginals& marginals);

// kCooperative minimizes the q-weighted soft group loss, kAdversarial
// maximizes it. Both add beta * balance loss.
enum class AssignerObjective { kAdversarial, kCooperative };

std::string AssignerObjectiveName(AssignerObjective objective);
AssignerObjective ParseAssignerObjective(const std::string& name);

struct AssignerLossResult {
  double loss = 0.0;
  double group_term = 0.0;    // sum_g q_g L_g (before the objective sign)
  double balance_term = 0.0;  // L_bal (before beta)
  Model gradient;             // d loss / d phi
};

struct AssignerLossOptions {
  double beta = 1.0;
  AssignerObjective objective = AssignerObjective::kAdversarial;
  AssignerFeatures features = AssignerFeatures::kLabelConditioned;
  GroupMode group_mode = GroupMode::kGhatByLabel;
};

// `per_example` holds the frozen predictor's losses on `data`.
AssignerLossResult AssignerLoss(const Model& phi,
                                const Eigen::VectorXd& per_example,
                                const Dataset& data, const GroupWeights& q,
                                const AssignerLossOptions& options);

AssignerLossResult AssignerLoss(const Model& phi, const Model& theta,
                                const Dataset& data, const GroupWeights& q,
                                const AssignerLossOptions& options);

// Balanced accuracy of the hard assignment against a true minority mask.
double AssignmentBalancedAccuracy(const GroupAssignment& assignment,
                                  const std::vector<bool>& true_minority);

}  // namespace grobust

#endif  // GROBUST_ASSIGNER_H_
