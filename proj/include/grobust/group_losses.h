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

// Per-group losses and the exponentiated-gradient update of the group
// weights q.

#ifndef GROBUST_GROUP_LOSSES_H_
#define GROBUST_GROUP_LOSSES_H_

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "grobust/assignment.h"
#include "grobust/datasets.h"
#include "grobust/diffmodel.h"

namespace grobust {

// How examples are bucketed for reweighting.
//   kGhatByLabel: id = ghat * C + y, m = 2C
//   kGhat:        id = ghat, m = 2
//   kOracle:      id = true group, m = data.group_count
enum class GroupMode { kGhatByLabel, kGhat, kOracle };

std::string GroupModeName(GroupMode mode);
GroupMode ParseGroupMode(const std::string& name);
int GroupCountFor(GroupMode mode, const Dataset& data);

struct GroupWeights {
  Eigen::VectorXd q;

  static GroupWeights Uniform(int m);
  // Throws InvalidArgument unless q >= 0 and sums to 1 within tol.
  void Validate(double tol = 1e-9) const;
};

struct GroupLossResult {
  Eigen::VectorXd losses;   // 0 for empty groups
  Eigen::VectorXd mass;     // member count, or soft mass
  std::vector<bool> empty;
};

// Mean of per_example over the members of each group.
GroupLossResult GroupLossesFromPerExample(const Eigen::VectorXd& per_example,
                                          const std::vector<int>& group_ids,
                                          int m);

GroupLossResult GroupLosses(const Model& theta, const Dataset& data,
                            const std::vector<int>& group_ids, int m);

// [n x m] soft membership weights for ghat-based modes.
Eigen::MatrixXd SoftMembership(const GroupAssignment& assignment,
                               const std::vector<int>& labels, int num_classes,
                               GroupMode mode);

// Groups with total soft mass below 1e-9 are flagged empty.
GroupLossResult SoftGroupLossesFromPerExample(
    const Eigen::VectorXd& per_example, const Eigen::MatrixXd& membership);

GroupLossResult SoftGroupLosses(const Model& theta, const Dataset& data,
                                const GroupAssignment& assignment,
                                GroupMode mode);

// Hard ids for an assignment under a ghat-based mode.
std::vector<int> AssignedGroupIds(const GroupAssignment& assignment,
                                  const std::vector<int>& labels,
                                  int num_classes, GroupMode mode);

// q'_j proportional to q_j * exp(q_step * L_j). Entries flagged in `frozen`
// keep their value; the remaining mass is renormalized among the others.
GroupWeights UpdateQ(const GroupWeights& q, const Eigen::VectorXd& losses,
                     double q_step, const std::vector<bool>* frozen = nullptr);

}  // namespace grobust

#endif  // GROBUST_GROUP_LOSSES_H_
