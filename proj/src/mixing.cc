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

#include "grobust/mixing.h"

#include <algorithm>
#include <cmath>

#include "grobust/diffmodel.h"
#include "grobust/error.h"

namespace grobust {

void MixSpec::Validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw InvalidArgument("mix alpha must be positive");
  }
  if (!(mix_fraction >= 0.0 && mix_fraction <= 1.0)) {
    throw InvalidArgument("mix_fraction must lie in [0, 1]");
  }
}

double SampleLambda(double alpha, Rng& rng) {
  if (!(alpha > 0.0)) throw InvalidArgument("alpha must be positive");
  while (true) {
    const double a = Gamma(rng, alpha);
    const double b = Gamma(rng, alpha);
    const double lambda = a / (a + b);
    if (lambda > 0.0 && lambda < 1.0) return lambda;
  }
}

double EffectiveCoefficient(double lambda, PairKind kind) {
  return kind == PairKind::kMajMin ? std::min(lambda, 1.0 - lambda) : lambda;
}

MixedPoint MixPair(const Eigen::VectorXd& xi, const Eigen::VectorXd& yi,
                   const Eigen::VectorXd& xj, const Eigen::VectorXd& yj,
                   double lambda, PairKind kind) {
  if (xi.size() != xj.size() || yi.size() != yj.size()) {
    throw DimensionError("mix_pair: operand shapes differ");
  }
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw InvalidArgument("mix_pair: lambda must lie in (0, 1)");
  }
  MixedPoint out;
  out.coef_first = EffectiveCoefficient(lambda, kind);
  const double rest = 1.0 - out.coef_first;
  out.x = out.coef_first * xi + rest * xj;
  out.y = out.coef_first * yi + rest * yj;
  return out;
}

MixedBatch BuildMixedGroups(const Dataset& data,
                            const GroupAssignment& assignment,
                            const MixSpec& spec, Rng& rng) {
  spec.Validate();
  if (assignment.size() != data.size()) {
    throw DimensionError("mixing: assignment size differs from data");
  }
  const std::size_t n = data.size();
  const int c = data.num_classes;
  const auto k = static_cast<std::size_t>(
      std::llround(spec.mix_fraction * static_cast<double>(n)));
  MixedBatch out;
  out.features.resize(static_cast<Eigen::Index>(k), data.dim());
  out.soft_labels.resize(static_cast<Eigen::Index>(k), c);
  if (k == 0) return out;

  std::vector<std::size_t> minority;
  for (std::size_t i = 0; i < n; ++i) {
    if (assignment.hard[i] == kMinority) minority.push_back(i);
  }
  if (minority.empty()) {
    throw EmptyMinorityError("mixing: the minority side is empty");
  }

  const Eigen::MatrixXd targets = OneHot(data.labels, c);
  out.group_ids.resize(k);
  out.first.resize(k);
  out.second.resize(k);
  out.coef_first.resize(k);
  out.kinds.resize(k);
  for (std::size_t t = 0; t < k; ++t) {
    const std::size_t i = UniformIndex(rng, n);
    const std::size_t j = minority[UniformIndex(rng, minority.size())];
    const double lambda = SampleLambda(spec.alpha, rng);
    const PairKind kind = assignment.hard[i] == kMinority ? PairKind::kMinMin
                                                          : PairKind::kMajMin;
    const auto r = static_cast<Eigen::Index>(t);
    const auto ri = static_cast<Eigen::Index>(i);
    const auto rj = static_cast<Eigen::Index>(j);
    const double a = EffectiveCoefficient(lambda, kind);
    out.features.row(r) =
        a * data.features.row(ri) + (1.0 - a) * data.features.row(rj);
    out.soft_labels.row(r) = a * targets.row(ri) + (1.0 - a) * targets.row(rj);
    Eigen::Index top;
    out.soft_labels.row(r).maxCoeff(&top);
    out.group_ids[t] = kMinority * c + static_cast<int>(top);
    out.first[t] = i;
    out.second[t] = j;
    out.coef_first[t] = a;
    out.kinds[t] = kind;
  }
  return out;
}

}  // namespace grobust
