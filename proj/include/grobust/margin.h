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

#ifndef GROBUST_MARGIN_H_
#define GROBUST_MARGIN_H_

#include <vector>

#include "grobust/datasets.h"
#include "grobust/diffmodel.h"

namespace grobust {

struct MarginProbeResult {
  double majority = 0.0;  // minimum signed distance within the side
  double minority = 0.0;
  double majority_mean = 0.0;
  double minority_mean = 0.0;
};

// Signed distance of each example to the boundary between its label and the
// strongest competing class: (z_y - z_k) / ||w_y - w_k||. Negative when
// misclassified. Linear models only.
std::vector<double> SignedMargins(const Model& theta, const Dataset& data);

MarginProbeResult MarginProbe(const Model& theta, const Dataset& data,
                              const std::vector<bool>& minority);

// Uses the true minority cells of `data`.
MarginProbeResult MarginProbe(const Model& theta, const Dataset& data);

}  // namespace grobust

#endif  // GROBUST_MARGIN_H_
