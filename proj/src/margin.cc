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

#include "grobust/margin.h"

#include <algorithm>
#include <limits>

#include "grobust/error.h"

namespace grobust {

std::vector<double> SignedMargins(const Model& theta, const Dataset& data) {
  if (theta.architecture() != Architecture::kLinear) {
    throw InvalidArgument("margin probe: unsupported architecture '" +
                          ArchitectureName(theta.architecture()) +
                          "' (linear models only)");
  }
  const Eigen::MatrixXd logits = Forward(theta, data.features).logits;
  const Eigen::MatrixXd& w = theta.layers()[0].weight;
  std::vector<double> out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const int y = data.labels[i];
    int rival = -1;
    for (int k = 0; k < data.num_classes; ++k) {
      if (k != y && (rival < 0 || logits(r, k) > logits(r, rival))) rival = k;
    }
    const double norm = (w.row(y) - w.row(rival)).norm();
    const double diff = logits(r, y) - logits(r, rival);
    out[i] = norm > 0.0 ? diff / norm : 0.0;
  }
  return out;
}

MarginProbeResult MarginProbe(const Model& theta, const Dataset& data,
                              const std::vector<bool>& minority) {
  if (minority.size() != data.size()) {
    throw DimensionError("margin probe: mask size differs from data");
  }
  const std::vector<double> margins = SignedMargins(theta, data);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  MarginProbeResult out{kInf, kInf, 0.0, 0.0};
  std::size_t n_min = 0, n_maj = 0;
  for (std::size_t i = 0; i < margins.size(); ++i) {
    if (minority[i]) {
      out.minority = std::min(out.minority, margins[i]);
      out.minority_mean += margins[i];
      ++n_min;
    } else {
      out.majority = std::min(out.majority, margins[i]);
      out.majority_mean += margins[i];
      ++n_maj;
    }
  }
  if (n_min == 0 || n_maj == 0) {
    throw InvalidArgument("margin probe needs both sides to be nonempty");
  }
  out.minority_mean /= static_cast<double>(n_min);
  out.majority_mean /= static_cast<double>(n_maj);
  return out;
}

MarginProbeResult MarginProbe(const Model& theta, const Dataset& data) {
  return MarginProbe(theta, data, TrueMinorityMask(data));
}

}  // namespace grobust
