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

// Cross-group mixup. The second element of every pair comes from the
// estimated minority side; when the first element is a majority example the
// minority element always receives the larger coefficient.

#ifndef GROBUST_MIXING_H_
#define GROBUST_MIXING_H_

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "grobust/assignment.h"
#include "grobust/datasets.h"
#include "grobust/random.h"

namespace grobust {

struct MixSpec {
  double alpha = 9.0;
  double mix_fraction = 0.5;

  void Validate() const;
};

enum class PairKind { kMajMin, kMinMin };

// Beta(alpha, alpha) as a ratio of gamma draws, strictly inside (0, 1).
double SampleLambda(double alpha, Rng& rng);

// Coefficient actually applied to x_i.
double EffectiveCoefficient(double lambda, PairKind kind);

struct MixedPoint {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  double coef_first = 0.0;
};

MixedPoint MixPair(const Eigen::VectorXd& xi, const Eigen::VectorXd& yi,
                   const Eigen::VectorXd& xj, const Eigen::VectorXd& yj,
                   double lambda, PairKind kind);

struct MixedBatch {
  Eigen::MatrixXd features;     // [k x d]
  Eigen::MatrixXd soft_labels;  // [k x C]
  // Minority cell of the argmax mixed label: kMinority * C + argmax.
  std::vector<int> group_ids;
  std::vector<std::size_t> first;
  std::vector<std::size_t> second;
  std::vector<double> coef_first;
  std::vector<PairKind> kinds;

  std::size_t size() const { return group_ids.size(); }
};

// k = round(mix_fraction * n) pairs; first element uniform over all of the
// data, second uniform over the minority side, both with replacement.
// Throws EmptyMinorityError when no example is on the minority side.
MixedBatch BuildMixedGroups(const Dataset& data,
                            const GroupAssignment& assignment,
                            const MixSpec& spec, Rng& rng);

}  // namespace grobust

#endif  // GROBUST_MIXING_H_
