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

#ifndef GROBUST_ASSIGNMENT_H_
#define GROBUST_ASSIGNMENT_H_

#include <vector>

#include <Eigen/Dense>

namespace grobust {

// Estimated group 0 is the minority side, 1 the majority side.
inline constexpr int kMinority = 0;
inline constexpr int kMajority = 1;

struct GroupAssignment {
  Eigen::VectorXd p_minority;  // probability of the minority side
  std::vector<int> hard;       // majority iff p_minority <= 0.5

  std::size_t size() const { return hard.size(); }
  std::size_t MinorityCount() const;
};

// Applies the threshold rule; ties at exactly 0.5 go to the majority.
GroupAssignment AssignmentFromProbabilities(const Eigen::VectorXd& p_minority);

}  // namespace grobust

#endif  // GROBUST_ASSIGNMENT_H_
